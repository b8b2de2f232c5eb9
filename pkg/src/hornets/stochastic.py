"""Event rates, firing probabilities, the induced discrete Markov chain and
seeded simulation.

Arithmetic follows the inputs: with :class:`~fractions.Fraction` rates
everything stays exact, a single float rate turns results into floats.
"""

from __future__ import annotations

import hashlib
import logging
import random
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from .engine import Event, Mode, ObjEvent, SystemNet, enabled_events, fire
from .errors import HornetError, LimitExceeded
from .marking import NestedMarking
from .objectnet import Rate

log = logging.getLogger(__name__)

RateFn = Callable[[SystemNet, Event], Rate]


def event_rate_product(sys: SystemNet, ev: Event) -> Rate:
    """Product rule: system rate times each synchronised object rate
    raised to its multiplicity.  Object-autonomous events use the
    pseudo-transition rate as system factor."""
    r = sys.pseudo_rate if isinstance(ev, ObjEvent) else sys.rate_of(ev.transition)
    for net, tset in ev.theta:
        for t, n in tset.items():
            r = r * net.rate[t] ** n
    return r


def event_rate_system(sys: SystemNet, ev: Event) -> Rate:
    """Alternative global rate: the system factor alone."""
    return sys.pseudo_rate if isinstance(ev, ObjEvent) else sys.rate_of(ev.transition)


def normalise(rates: list) -> list:
    total = sum(rates)
    return [r / total for r in rates]


def firing_probabilities(sys: SystemNet, mu: NestedMarking, rate_fn: RateFn = event_rate_product,
                         enabled=None) -> dict:
    """Map each enabled event to ``rate / sum of enabled rates`` (canonical order)."""
    if enabled is None:
        enabled = enabled_events(sys, mu)
    if not enabled:
        return {}
    probs = normalise([rate_fn(sys, ev) for ev, _ in enabled])
    return {ev: p for (ev, _), p in zip(enabled, probs)}


# -------------------------------------------------------------------- DMC

@dataclass(frozen=True)
class DmcEdge:
    src: int
    event: Event
    dst: int
    probability: Rate


@dataclass
class Dmc:
    """Reachability graph with per-edge probabilities.

    States are indexed in BFS discovery order from the initial marking
    (index 0).  ``expanded[i]`` tells whether state ``i``'s successors were
    computed; unexpanded states exist only when ``truncated`` is set.
    """

    states: list
    edges: list
    expanded: list
    truncated: bool = False
    initial: int = 0

    @property
    def frontier(self) -> int:
        return sum(1 for e in self.expanded if not e)

    def out_edges(self) -> dict:
        rows = {}
        for e in self.edges:
            rows.setdefault(e.src, []).append(e)
        return rows

    def deadlocks(self) -> list:
        rows = self.out_edges()
        return [i for i in range(len(self.states)) if self.expanded[i] and i not in rows]

    def row_sums(self) -> dict:
        sums = {}
        for e in self.edges:
            sums[e.src] = sums.get(e.src, 0) + e.probability
        return sums

    @property
    def exact(self) -> bool:
        return all(isinstance(e.probability, Fraction) for e in self.edges)

    def edge_set(self) -> set:
        """Structure of the graph: (src marking, event, dst marking) triples."""
        return {(self.states[e.src], e.event, self.states[e.dst]) for e in self.edges}

    def index(self, mu: NestedMarking) -> int:
        return self.states.index(mu)


def build_dmc(sys: SystemNet, mu0: NestedMarking, max_states: int = 100_000,
              max_depth: int | None = None, rate_fn: RateFn = event_rate_product,
              strict: bool = False) -> Dmc:
    """Breadth-first reachability graph decorated with probabilities.

    Each event's probability is split uniformly over its modes; edges
    with the same (source, event, target) are merged.  When a limit is
    hit the partial graph is returned with ``truncated`` set, or
    :class:`LimitExceeded` is raised if ``strict``.
    """
    if max_states < 1 or (max_depth is not None and max_depth < 0):
        raise ValueError("limits must be positive")
    sys.check_marking(mu0)
    states = [mu0]
    index = {mu0: 0}
    depth = [0]
    expanded = [False]
    edges = []
    queue = deque([0])
    truncated = False
    while queue:
        i = queue.popleft()
        mu = states[i]
        enabled = enabled_events(sys, mu)
        if max_depth is not None and depth[i] >= max_depth:
            if enabled:
                truncated = True
            else:
                expanded[i] = True
            continue
        probs = firing_probabilities(sys, mu, rate_fn, enabled)
        succ = []
        new = []
        for ev, modes in enabled:
            share = probs[ev] / len(modes)
            for mode in modes:
                nxt = fire(sys, mu, ev, mode)
                if nxt not in index and nxt not in new:
                    new.append(nxt)
                succ.append((ev, nxt, share))
        if len(states) + len(new) > max_states:
            truncated = True
            queue.appendleft(i)
            break
        for nxt in new:
            index[nxt] = len(states)
            states.append(nxt)
            depth.append(depth[i] + 1)
            expanded.append(False)
            queue.append(index[nxt])
        merged = {}
        for ev, nxt, share in succ:
            key = (ev, index[nxt])
            merged[key] = merged.get(key, 0) + share
        for (ev, j), p in merged.items():
            edges.append(DmcEdge(i, ev, j, p))
        expanded[i] = True
    d = Dmc(states, edges, expanded, truncated)
    if truncated:
        log.info("reachability graph truncated: %d states, frontier %d", len(states), d.frontier)
        if strict:
            raise LimitExceeded(f"state-space limit hit with {len(states)} states, "
                                f"frontier {d.frontier}")
    return d


def transient_distribution(d: Dmc, steps: int, allow_truncated: bool = False) -> dict:
    """Distribution over state indices after ``steps`` steps from the initial
    state.  Deadlocks (and, when allowed, unexpanded states) are absorbing."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if d.truncated and not allow_truncated:
        raise LimitExceeded("transient analysis on a truncated chain; pass allow_truncated=True")
    rows = d.out_edges()
    one = Fraction(1) if d.exact else 1.0
    dist = {d.initial: one}
    for _ in range(steps):
        nxt = {}
        for s, p in dist.items():
            out = rows.get(s)
            if not out:
                nxt[s] = nxt.get(s, 0) + p
                continue
            for e in out:
                nxt[e.dst] = nxt.get(e.dst, 0) + p * e.probability
        dist = nxt
    return dist


def expectation(d: Dmc, dist: dict, f: Callable[[NestedMarking], Rate]) -> Rate:
    return sum(p * f(d.states[s]) for s, p in dist.items())


# -------------------------------------------------------------- simulation

@dataclass
class TraceStep:
    step: int
    event: str
    mode: str
    probability: Rate
    mode_probability: Rate
    observed: dict = field(default_factory=dict)


@dataclass
class Trace:
    seed: int
    steps: list
    final: NestedMarking
    deadlock: bool

    def observations(self, key: str) -> list:
        return [s.observed.get(key) for s in self.steps]


def mode_digest(mode: Mode) -> str:
    raw = (mode.lam.encode() + "=>" + mode.rho.encode()).encode()
    return hashlib.sha256(raw).hexdigest()[:16]


class Simulator:
    """Seeded random walk over the firing rule.

    Enabled events and their probabilities are memoised per marking so
    many short runs over the same model stay cheap.  ``observer`` is
    called as ``observer(marking, enabled)`` for the initial state and
    after every step; its dict result is stored in the trace.
    """

    def __init__(self, sys: SystemNet, rate_fn: RateFn = event_rate_product, observer=None,
                 cache_size: int = 50_000):
        self.sys = sys
        self.rate_fn = rate_fn
        self.observer = observer
        self.cache_size = cache_size
        self._cache = {}
        self._succ = {}

    def _enabled(self, mu):
        hit = self._cache.get(mu)
        if hit is None:
            enabled = enabled_events(self.sys, mu)
            probs = firing_probabilities(self.sys, mu, self.rate_fn, enabled)
            cum = []
            acc = 0.0
            for ev, _ in enabled:
                acc += float(probs[ev])
                cum.append(acc)
            hit = (enabled, probs, cum)
            if len(self._cache) >= self.cache_size:
                self._cache.clear()
            self._cache[mu] = hit
        return hit

    def _step(self, mu, ev, mode, k, m):
        key = (mu, k, m)
        hit = self._succ.get(key)
        if hit is None:
            hit = (fire(self.sys, mu, ev, mode), str(ev), mode_digest(mode))
            if len(self._succ) >= self.cache_size:
                self._succ.clear()
            self._succ[key] = hit
        return hit

    def _observe(self, mu, enabled) -> dict:
        return dict(self.observer(mu, enabled)) if self.observer else {}

    def run(self, mu0: NestedMarking, seed: int, max_steps: int) -> Trace:
        rng = random.Random(seed)
        mu = mu0
        enabled, probs, cum = self._enabled(mu)
        steps = [TraceStep(0, "", "", 1, 1, self._observe(mu, enabled))]
        for n in range(1, max_steps + 1):
            if not enabled:
                break
            u = rng.random() * cum[-1]
            k = next((j for j, c in enumerate(cum) if u < c), len(cum) - 1)
            ev, modes = enabled[k]
            m = rng.randrange(len(modes))
            mu, ev_text, digest = self._step(mu, ev, modes[m], k, m)
            enabled, probs_next, cum = self._enabled(mu)
            steps.append(TraceStep(n, ev_text, digest, probs[ev],
                                   probs[ev] / len(modes), self._observe(mu, enabled)))
            probs = probs_next
        return Trace(seed, steps, mu, not enabled)


def simulate(sys: SystemNet, mu0: NestedMarking, seed: int, max_steps: int, observer=None,
             rate_fn: RateFn = event_rate_product) -> Trace:
    """Single seeded run; deterministic given the seed."""
    if max_steps < 0:
        raise HornetError("max_steps must be nonnegative")
    return Simulator(sys, rate_fn, observer).run(mu0, seed, max_steps)
