"""System-net rates derived from transformation complexity.

A transition's complexity is the number of net-operator applications in
its arc inscriptions (and guard); its rate is ``gamma ** complexity``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Op, guard_nodes
from .engine import SystemNet
from .errors import HornetError
from .objectnet import Rate, as_rate


@dataclass(frozen=True)
class MapeConfig:
    gamma: Rate
    # strict: every function symbol in a guard counts, not only net operators
    strict_guards: bool = False

    def __post_init__(self):
        g = as_rate(self.gamma)
        if not 0 <= g <= 1:
            raise HornetError(f"gamma must lie in [0, 1], got {g}")
        object.__setattr__(self, "gamma", g)


def term_op_count(term) -> int:
    if isinstance(term, Op):
        return 1 + sum(term_op_count(a) for a in term.args)
    return 0


def transformation_complexity(sys: SystemNet, t: str, strict_guards: bool = False) -> int:
    tr = sys.transitions[t]
    # guard atoms only read rates of bound nets: no net operators inside
    tc = guard_nodes(tr.guard) if strict_guards else 0
    for arcs in (tr.pre, tr.post):
        for terms in arcs.values():
            tc += sum(term_op_count(term) for term in terms)
    return tc


def mape_rate(sys: SystemNet, t: str, cfg: MapeConfig) -> Rate:
    tc = transformation_complexity(sys, t, cfg.strict_guards)
    if cfg.gamma == 0 and tc > 0:
        raise HornetError(f"gamma = 0 gives transition {t!r} (complexity {tc}) a zero rate")
    return cfg.gamma ** tc


def apply_mape_rates(sys: SystemNet, cfg: MapeConfig) -> SystemNet:
    """Copy of ``sys`` with every transition rate replaced by ``gamma ** TC``."""
    return sys.with_rates({t: mape_rate(sys, t, cfg) for t in sys.transitions})
