"""Exception hierarchy shared by every module of the package."""


class HornetError(Exception):
    """Base class for all errors raised by :mod:`hornets`."""


class MultisetOverflow(HornetError, OverflowError):
    pass


class NetError(HornetError):
    """Malformed object net or invalid object-level operation."""


class AlgebraError(HornetError):
    """Term evaluation or net operator failure."""


class UniverseOverflow(AlgebraError):
    """An operator needed a place outside a closed place universe."""


class GuardError(HornetError):
    """A guard could not be evaluated (unknown transition, division by zero)."""


class FiringError(HornetError):
    """Attempt to fire an event in a mode that is not enabled."""


class ModeLimitExceeded(HornetError):
    """Mode enumeration for a single event exceeded the configured cap."""


class LimitExceeded(HornetError):
    """State-space exploration hit a resource limit."""


class ModelError(HornetError):
    """Model file problem, carrying an optional source location."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)
