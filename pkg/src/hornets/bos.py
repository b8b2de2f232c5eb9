"""Battle-of-sexes self-adaptation scenario.

The net-token is ``(a0 XOR b0) || (a1 XOR b1)`` extended by a ``restart``
transition from its final back to its initial place.  System places:

``ready``   the two choices are open; four ``play_*`` transitions
            synchronise with one branch of each choice.
``won_*``   an outcome with a nonzero payoff waits for its ``reward_*``
            transition, which adds the payoff to the chosen branch rates.
``done``    the round is over; ``next_round`` synchronises with
            ``restart``; ``adapt_a0``/``adapt_b0`` replace agent 0's choice
            by a fixed branch once that branch's share exceeds the threshold.

System rates come from :func:`hornets.mape.apply_mape_rates`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Cmp, Num, Arith, RateOf, Op, Var, op_parallel, op_xor
from .engine import SysTransition, SystemNet
from .mape import MapeConfig, apply_mape_rates
from .marking import NestedMarking, token
from .objectnet import Kind, ObjectNet, Rate, as_rate
from .stochastic import Simulator

AGENT0 = ("a0", "b0")
AGENT1 = ("a1", "b1")
CHANNELS = frozenset(AGENT0 + AGENT1 + ("restart",))
KIND = Kind("WF", channels=CHANNELS, open=True)

DEFAULT_PAYOFF = (((3, 1), (0, 0)),
                  ((0, 0), (1, 3)))


@dataclass(frozen=True)
class BosParams:
    A0: Rate = Fraction(70)
    B0: Rate = Fraction(30)
    A1: Rate = Fraction(55)
    B1: Rate = Fraction(45)
    payoff: tuple = DEFAULT_PAYOFF
    threshold: Rate = Fraction(4, 5)
    gamma: Rate = Fraction(1, 2)
    horizon: int = 200

    def __post_init__(self):
        for name in ("A0", "B0", "A1", "B1"):
            v = as_rate(getattr(self, name))
            if not v > 0:
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, v)
        th = as_rate(self.threshold)
        if not 0 < th < 1:
            raise ValueError("threshold must lie in (0, 1)")
        object.__setattr__(self, "threshold", th)
        object.__setattr__(self, "gamma", as_rate(self.gamma))
        try:
            pay = tuple(tuple((as_rate(p), as_rate(q)) for p, q in row) for row in self.payoff)
            if len(pay) != 2 or any(len(r) != 2 for r in pay):
                raise ValueError
        except (TypeError, ValueError):
            raise ValueError("payoff must be a 2x2 matrix of reward pairs") from None
        if any(v < 0 for row in pay for pair in row for v in pair):
            raise ValueError("payoffs must be nonnegative")
        object.__setattr__(self, "payoff", pay)


def action(name: str) -> ObjectNet:
    """Single-step workflow performing one action, synchronised on its own channel."""
    return ObjectNet.build(KIND, {name: (f"{name}_i", f"{name}_f")}, label={name: name}, name=name)


def with_restart(net: ObjectNet, name: str | None = None) -> ObjectNet:
    """Close a workflow net into a cycle with a ``restart`` transition."""
    (src,), (snk,) = net.source_places(), net.sink_places()
    pre = dict(net.pre, restart=[snk])
    post = dict(net.post, restart=[src])
    return ObjectNet(net.kind, net.places, pre, post, rate=net.rate,
                     label=dict(net.label, restart="restart"), name=name or net.name)


def game_net(p: BosParams) -> ObjectNet:
    x0 = op_xor(action("a0"), action("b0"), p.A0, p.B0)
    x1 = op_xor(action("a1"), action("b1"), p.A1, p.B1)
    return with_restart(op_parallel(x0, x1), "N1")


def _share(var: str, mine: str, other: str):
    return Arith("/", RateOf(var, mine), Arith("+", RateOf(var, mine), RateOf(var, other)))


def build_bos_model(p: BosParams = BosParams()) -> tuple[SystemNet, NestedMarking]:
    """System net and initial marking (both choices open, rates from ``p``)."""
    x = Var("x", KIND.name)
    places = {q: KIND for q in ("ready", "done")}
    trans = []
    for i, act0 in enumerate(AGENT0):
        for j, act1 in enumerate(AGENT1):
            r0, r1 = p.payoff[i][j]
            outcome = f"{act0}_{act1}"
            sync = ((x, act0), (x, act1))
            if r0 == 0 and r1 == 0:
                trans.append(SysTransition(f"play_{outcome}", {"ready": (x,)}, {"done": (x,)},
                                           sync=sync))
                continue
            won = f"won_{outcome}"
            places[won] = KIND
            trans.append(SysTransition(f"play_{outcome}", {"ready": (x,)}, {won: (x,)}, sync=sync))
            upd = x
            for act, r in ((act0, r0), (act1, r1)):
                if r:
                    upd = Op("upd", (upd,), (act, r))
            trans.append(SysTransition(f"reward_{outcome}", {won: (x,)}, {"done": (upd,)}))
    trans.append(SysTransition("next_round", {"done": (x,)}, {"ready": (x,)},
                               sync=((x, "restart"),)))
    for keep, other in (AGENT0, AGENT0[::-1]):
        trans.append(SysTransition(f"adapt_{keep}", {"done": (x,)},
                                   {"done": (Op("fix", (x,), (keep,)),)},
                                   guard=Cmp(">", _share("x", keep, other), Num(p.threshold))))
    sys = apply_mape_rates(SystemNet(places, trans), MapeConfig(p.gamma))
    net = game_net(p)
    start = net.pre["a0"] + net.pre["a1"]
    return sys, NestedMarking.of(token("ready", net, start))


def bos_model(p: BosParams = BosParams()):
    """The scenario as a :class:`~hornets.modelfile.Model` (for export and printing)."""
    from .modelfile import Model, Options
    sys, mu0 = build_bos_model(p)
    opts = Options(gamma=p.gamma)
    return Model({KIND.name: KIND}, {"N1": game_token(mu0)}, sys, mu0, opts,
                 frozenset(sys.transitions))


def game_token(mu: NestedMarking) -> ObjectNet:
    (a,) = list(mu.addends)
    return a.net


def choice_state(net: ObjectNet, a: str, b: str) -> tuple[Rate, str]:
    has_a, has_b = a in net.transitions, b in net.transitions
    if has_a and has_b:
        ra, rb = net.rate[a], net.rate[b]
        return ra / (ra + rb), "xor"
    if has_a:
        return Fraction(1), f"fixed-{a}"
    return Fraction(0), f"fixed-{b}"


def bos_observer(mu: NestedMarking, enabled=()) -> dict:
    """Choice probabilities of the current net-token and agent 0's structure."""
    net = game_token(mu)
    pr0, flag = choice_state(net, *AGENT0)
    pr1, _ = choice_state(net, *AGENT1)
    adapt = any(getattr(ev, "transition", "").startswith("adapt_") for ev, _ in enabled)
    return {"prA0": pr0, "prA1": pr1, "structure": flag, "adapt_enabled": adapt,
            "rates": dict(net.rate)}


def run_bos(p: BosParams = BosParams(), seed: int = 0, steps: int | None = None,
            simulator: Simulator | None = None):
    """One seeded run; returns the simulation trace with observer values."""
    if simulator is None:
        sys, mu0 = build_bos_model(p)
        simulator = Simulator(sys, observer=bos_observer)
    else:
        mu0 = build_bos_model(p)[1]
    return simulator.run(mu0, seed, p.horizon if steps is None else steps)


def trace_rows(trace) -> list[tuple]:
    """(step, prA0, prA1, structureFlag) rows of a BoS trace."""
    return [(s.step, s.observed["prA0"], s.observed["prA1"], s.observed["structure"])
            for s in trace.steps]
