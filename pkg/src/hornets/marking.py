"""Nested markings and their projections."""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable
from typing import NamedTuple

from .errors import NetError
from .multiset import EMPTY, Multiset, format_multiset, ms_add, ms_leq, ms_sub, ms_sum
from .objectnet import ObjectNet


class Addend(NamedTuple):
    """One net-token ``place[net, marking]``."""

    place: str
    net: ObjectNet
    marking: Multiset

    @property
    def sort_key(self):
        return (self.place, self.net.digest, tuple(self.marking.sorted_items()))

    def describe(self, name=None) -> str:
        n = name(self.net) if name else self.net.display
        return f"{self.place}[{n}, {format_multiset(self.marking)}]"

    def __str__(self):
        return self.describe()


def token(place: str, net: ObjectNet, marking=None) -> Addend:
    """Convenience constructor; ``marking`` may be a place id, list or mapping."""
    if marking is None:
        m = EMPTY
    elif isinstance(marking, Multiset):
        m = marking
    elif isinstance(marking, str):
        m = Multiset([marking])
    elif isinstance(marking, dict):
        m = Multiset(marking)
    else:
        m = Multiset(list(marking))
    return Addend(place, net, m)


class NestedMarking:
    """Immutable multiset of net-tokens with canonical form.

    Each addend's marking must only use places of its own net.  Kind
    consistency against system places is checked by the system net.
    """

    __slots__ = ("addends", "_enc", "_digest")

    def __init__(self, addends: Multiset | Iterable[Addend] | None = None):
        if addends is None:
            ms = EMPTY
        elif isinstance(addends, Multiset):
            ms = addends
        else:
            ms = Multiset(list(addends))
        for a in ms:
            if not isinstance(a, Addend):
                raise TypeError(f"not an addend: {a!r}")
            bad = set(a.marking) - a.net.places
            if bad:
                raise NetError(f"marking of {a.net.display} on {a.place} uses foreign places {sorted(bad)}")
        self.addends = ms
        self._enc = None
        self._digest = None

    @classmethod
    def of(cls, *addends: Addend) -> NestedMarking:
        return cls(addends)

    def __add__(self, other: NestedMarking) -> NestedMarking:
        return NestedMarking(ms_add(self.addends, other.addends))

    def __sub__(self, other: NestedMarking) -> NestedMarking:
        return NestedMarking(ms_sub(self.addends, other.addends))

    def __le__(self, other: NestedMarking) -> bool:
        return ms_leq(self.addends, other.addends)

    def __eq__(self, other):
        if isinstance(other, NestedMarking):
            return self.addends == other.addends
        return NotImplemented

    def __hash__(self):
        return hash(self.addends)

    def __bool__(self):
        return bool(self.addends)

    def __iter__(self):
        return iter(self.addends.elements())

    def __len__(self):
        return self.addends.cardinality

    def sorted_addends(self) -> list:
        """(addend, count) pairs in canonical order."""
        return sorted(self.addends.items(), key=lambda kv: kv[0].sort_key)

    def encode(self) -> str:
        """Deterministic text encoding (JSON) of the canonical form."""
        if self._enc is None:
            rows = [[a.place, a.net.digest, [[q, n] for q, n in a.marking.sorted_items()], c]
                    for a, c in self.sorted_addends()]
            self._enc = json.dumps(rows, separators=(",", ":"))
        return self._enc

    @property
    def digest(self) -> str:
        if self._digest is None:
            self._digest = hashlib.sha256(self.encode().encode()).hexdigest()
        return self._digest

    @property
    def sort_key(self):
        return self.encode()

    def pretty(self, name=None) -> str:
        """Canonical print; ``name`` maps a net to its displayed name."""
        if not self.addends:
            return "0"
        parts = []
        for a, c in self.sorted_addends():
            text = a.describe(name)
            parts.append(text if c == 1 else f"{c}*{text}")
        return " + ".join(parts)

    def __str__(self):
        return self.pretty()

    def __repr__(self):
        return f"NestedMarking({self.pretty()})"

    def nets(self) -> set:
        return {a.net for a in self.addends}

    def on_place(self, place: str) -> list:
        return [(a, c) for a, c in self.sorted_addends() if a.place == place]


def proj1(mu: NestedMarking, net: ObjectNet) -> Multiset:
    """Multiset of system places holding ``net``."""
    out = {}
    for a, c in mu.addends.items():
        if a.net == net:
            out[a.place] = out.get(a.place, 0) + c
    return Multiset(out)


def proj2_net(mu: NestedMarking, net: ObjectNet) -> Multiset:
    """Sum of the markings of all net-tokens of ``net``."""
    return ms_sum(a.marking.scale(c) for a, c in mu.addends.items() if a.net == net)


def proj2_kind(mu: NestedMarking, kind) -> Multiset:
    """Sum of the markings of all net-tokens of a kind (Kind or kind name)."""
    name = getattr(kind, "name", kind)
    return ms_sum(a.marking.scale(c) for a, c in mu.addends.items() if a.net.kind.name == name)


def place_net_counts(mu: NestedMarking) -> Multiset:
    """Multiset of (place, net) pairs: the first projection for all nets at once."""
    return mu.addends.map(lambda a: (a.place, a.net))


EMPTY_MARKING = NestedMarking()
