"""System nets, nested events and the firing rule.

An event is either a :class:`SyncEvent` (a system transition with binding
and synchronisation map; system-autonomous events have an empty map) or an
:class:`ObjEvent` (an unlabelled object transition firing inside one
net-token).  A :class:`Mode` fixes the consumed and produced sub-markings.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .algebra import (TRUE, AlgebraError, Var, eval_guard, eval_term, guard_vars, term_kind,
                      term_vars)
from .errors import FiringError, GuardError, HornetError, ModeLimitExceeded
from .marking import Addend, NestedMarking, place_net_counts, proj2_kind
from .multiset import EMPTY, Multiset, format_multiset, ms_add, ms_leq, ms_sub, multisets_of_size, \
    sub_multisets
from .objectnet import Kind, ObjectNet, Rate, positive_rate, post_sharp, pre_sharp

DEFAULT_MAX_MODES = 10_000


@dataclass(frozen=True)
class SysTransition:
    """System-net transition.

    ``pre``/``post`` map a place to a tuple of terms (a multiset of
    inscriptions); ``sync`` is a tuple of ``(term, channel)`` pairs.
    """

    name: str
    pre: Mapping = field(default_factory=dict)
    post: Mapping = field(default_factory=dict)
    guard: object = TRUE
    sync: tuple = ()
    rate: Rate = 1

    def variables(self) -> set:
        out = set()
        for terms in self.pre.values():
            for term in terms:
                out |= term_vars(term)
        return out


class SystemNet:
    """Algebraic system net with typed places.

    ``places`` maps place ids to :class:`Kind` objects.  Construction
    validates kinds of arc inscriptions, variable scoping and channels.
    """

    def __init__(self, places: Mapping[str, Kind], transitions, pseudo_rate=1,
                 max_modes: int = DEFAULT_MAX_MODES):
        self.places = dict(places)
        if isinstance(transitions, Mapping):
            transitions = list(transitions.values())
        self.transitions = {t.name: t for t in transitions}
        self.kinds = {}
        for k in self.places.values():
            old = self.kinds.setdefault(k.name, k)
            if old != k:
                raise HornetError(f"conflicting definitions of kind {k.name!r}")
        self.pseudo_rate = positive_rate(pseudo_rate, "pseudo-transition rate")
        self.max_modes = max_modes
        for t in self.transitions.values():
            self._validate(t)
        self.transitions = {t.name: SysTransition(t.name, t.pre, t.post, t.guard, t.sync,
                                                  positive_rate(t.rate, f"rate of {t.name!r}"))
                            for t in self.transitions.values()}

    def _validate(self, t: SysTransition):
        var_kinds = {}
        for arcs in (t.pre, t.post):
            for p, terms in arcs.items():
                if p not in self.places:
                    raise HornetError(f"transition {t.name!r} refers to unknown place {p!r}")
                for term in terms:
                    try:
                        k = term_kind(term)
                    except AlgebraError as exc:
                        raise HornetError(f"transition {t.name!r}: {exc}") from None
                    if k != self.places[p].name:
                        raise HornetError(f"transition {t.name!r}: inscription {term} of kind {k!r} "
                                          f"on place {p!r} of kind {self.places[p].name!r}")
                    self._collect_vars(term, var_kinds, t.name)
        bound = t.variables()
        for term, channel in t.sync:
            free = term_vars(term) - bound
            if free:
                raise HornetError(f"transition {t.name!r}: sync uses unbound variables {sorted(free)}")
            k = self.kinds.get(term_kind(term))
            if k is None or channel not in k.channels:
                raise HornetError(f"transition {t.name!r}: unknown channel {channel!r}")
        for arcs in (t.post,):
            for terms in arcs.values():
                for term in terms:
                    free = term_vars(term) - bound
                    if free:
                        raise HornetError(f"transition {t.name!r}: output uses unbound variables "
                                          f"{sorted(free)}")
        free = guard_vars(t.guard) - bound
        if free:
            raise HornetError(f"transition {t.name!r}: guard uses unbound variables {sorted(free)}")

    @staticmethod
    def _collect_vars(term, var_kinds, tname):
        if isinstance(term, Var):
            old = var_kinds.setdefault(term.name, term.kind)
            if old != term.kind:
                raise HornetError(f"transition {tname!r}: variable {term.name!r} used with kinds "
                                  f"{old!r} and {term.kind!r}")
        for a in getattr(term, "args", ()):
            SystemNet._collect_vars(a, var_kinds, tname)

    def with_rates(self, rates: Mapping[str, Rate]) -> SystemNet:
        trans = [SysTransition(t.name, t.pre, t.post, t.guard, t.sync, rates.get(t.name, t.rate))
                 for t in self.transitions.values()]
        return SystemNet(self.places, trans, self.pseudo_rate, self.max_modes)

    def check_marking(self, mu: NestedMarking):
        for a in mu.addends:
            if a.place not in self.places:
                raise HornetError(f"marking uses unknown place {a.place!r}")
            if a.net.kind != self.places[a.place]:
                raise HornetError(f"net {a.net.display} of kind {a.net.kind.name!r} on place "
                                  f"{a.place!r} of kind {self.places[a.place].name!r}")

    def rate_of(self, t: str) -> Rate:
        return self.transitions[t].rate


# ----------------------------------------------------------------- events

def _display(n: ObjectNet) -> str:
    return n.display


def _theta_str(theta, name=_display) -> str:
    return "; ".join(f"{name(n)}:{format_multiset(m)}" for n, m in theta)


@dataclass(frozen=True)
class SyncEvent:
    """``t^alpha[theta]``; ``binding`` and ``theta`` are sorted tuples."""

    transition: str
    binding: tuple = ()
    theta: tuple = ()

    @property
    def alpha(self) -> dict:
        return dict(self.binding)

    @property
    def sort_key(self):
        return (0, self.transition,
                tuple((v, n.digest) for v, n in self.binding),
                tuple((n.digest, m.sorted_items()) for n, m in self.theta))

    def describe(self, name=_display) -> str:
        b = ",".join(f"{v}={name(n)}" for v, n in self.binding)
        return f"{self.transition}^{{{b}}}[{_theta_str(self.theta, name)}]"

    def __str__(self):
        return self.describe()


@dataclass(frozen=True)
class ObjEvent:
    """Object-autonomous event ``id_{p,N}[t]``."""

    place: str
    net: ObjectNet
    transition: str

    @property
    def theta(self) -> tuple:
        return ((self.net, Multiset([self.transition])),)

    @property
    def sort_key(self):
        return (1, self.place, self.net.digest, self.transition)

    def describe(self, name=_display) -> str:
        n = name(self.net)
        return f"id_{{{self.place},{n}}}[{n}:{self.transition}]"

    def __str__(self):
        return self.describe()


Event = Union[SyncEvent, ObjEvent]


class Mode(NamedTuple):
    lam: NestedMarking
    rho: NestedMarking

    @property
    def sort_key(self):
        return (self.lam.encode(), self.rho.encode())

    def describe(self, name=_display) -> str:
        return f"({self.lam.pretty(name)} => {self.rho.pretty(name)})"

    def __str__(self):
        return self.describe()


def make_sync_event(t: str, alpha: Mapping[str, ObjectNet], theta: Mapping | tuple = ()) -> SyncEvent:
    if isinstance(theta, Mapping):
        theta = theta.items()
    th = tuple(sorted(((n, m if isinstance(m, Multiset) else Multiset(m)) for n, m in theta if m),
                      key=lambda nm: nm[0].digest))
    return SyncEvent(t, tuple(sorted(alpha.items())), th)


def format_firing(ev: Event, mode: Mode) -> str:
    return f"{ev}{mode}"


# ------------------------------------------------------ evaluated arcs

def pre_alpha(sys: SystemNet, ev: Event) -> Multiset:
    """Multiset of (place, net) consumed by the event; raises AlgebraError."""
    if isinstance(ev, ObjEvent):
        return Multiset({(ev.place, ev.net): 1})
    return _eval_arcs(sys.transitions[ev.transition].pre, ev.alpha)


def post_alpha(sys: SystemNet, ev: Event) -> Multiset:
    if isinstance(ev, ObjEvent):
        return Multiset({(ev.place, ev.net): 1})
    return _eval_arcs(sys.transitions[ev.transition].post, ev.alpha)


def _eval_arcs(arcs: Mapping, alpha) -> Multiset:
    out = {}
    for p, terms in arcs.items():
        for term in terms:
            key = (p, eval_term(term, alpha))
            out[key] = out.get(key, 0) + 1
    return Multiset(out)


def _theta_by_kind(theta) -> tuple[dict, dict]:
    pre_k, post_k = {}, {}
    for net, tset in theta:
        k = net.kind.name
        pre_k[k] = ms_add(pre_k.get(k, EMPTY), pre_sharp(net, tset))
        post_k[k] = ms_add(post_k.get(k, EMPTY), post_sharp(net, tset))
    return pre_k, post_k


def _guard_holds(sys: SystemNet, ev: Event) -> bool:
    if isinstance(ev, ObjEvent):
        return True
    try:
        return eval_guard(sys.transitions[ev.transition].guard, ev.alpha)
    except GuardError:
        # undefined guard (e.g. rateOf a removed transition) does not hold
        return False


# -------------------------------------------------------- enabling predicate

def check_phi(sys: SystemNet, ev: Event, lam: NestedMarking, rho: NestedMarking) -> bool:
    """Evaluate the four conjuncts of the enabling predicate exactly."""
    try:
        pre, post = pre_alpha(sys, ev), post_alpha(sys, ev)
    except AlgebraError:
        return False
    if place_net_counts(lam) != pre or place_net_counts(rho) != post:
        return False
    pre_k, post_k = _theta_by_kind(ev.theta)
    kinds = set(sys.kinds) | set(pre_k) | {a.net.kind.name for a in lam.addends} \
        | {a.net.kind.name for a in rho.addends}
    for k in kinds:
        lk = proj2_kind(lam, k)
        need = pre_k.get(k, EMPTY)
        if not ms_leq(need, lk):
            return False
        # (lam + post) - pre; exact because lam covers pre
        if proj2_kind(rho, k) != ms_sub(ms_add(lk, post_k.get(k, EMPTY)), need):
            return False
    return True


# ------------------------------------------------------------ enumeration

def enumerate_bindings(sys: SystemNet, t: str, mu: NestedMarking) -> list[dict]:
    """Bindings of the input variables of ``t`` to nets present in ``mu``
    under which the input arcs can be covered by ``mu``."""
    tr = sys.transitions[t]
    var_kind = {}
    bare = {}
    for p, terms in tr.pre.items():
        for term in terms:
            if isinstance(term, Var):
                bare.setdefault(term.name, []).append(p)
            for v in _vars_with_kinds(term):
                var_kind[v.name] = v.kind
    by_place = {}
    for a in mu.addends:
        by_place.setdefault(a.place, set()).add(a.net)
    candidates = []
    names = sorted(var_kind)
    for v in names:
        if v in bare:
            cand = None
            for p in bare[v]:
                s = by_place.get(p, set())
                cand = s if cand is None else cand & s
        else:
            cand = {a.net for a in mu.addends if a.net.kind.name == var_kind[v]}
        candidates.append(sorted(cand, key=lambda n: n.digest))
    have = place_net_counts(mu)
    out = []
    for combo in itertools.product(*candidates):
        alpha = dict(zip(names, combo))
        try:
            need = _eval_arcs(tr.pre, alpha)
        except AlgebraError:
            continue
        if ms_leq(need, have):
            out.append(alpha)
    return out


def _vars_with_kinds(term) -> Iterator[Var]:
    if isinstance(term, Var):
        yield term
    for a in getattr(term, "args", ()):
        yield from _vars_with_kinds(a)


def _lambda_choices(mu: NestedMarking, pre: Multiset) -> list[NestedMarking]:
    """All sub-markings of ``mu`` made of whole net-tokens matching ``pre`` exactly."""
    slots = []
    for (p, net), c in pre.sorted_items():
        avail = Multiset({a: n for a, n in mu.addends.items() if a.place == p and a.net == net})
        opts = list(sub_multisets(avail, c))
        if not opts:
            return []
        slots.append(opts)
    out = []
    for combo in itertools.product(*slots):
        acc = EMPTY
        for m in combo:
            acc = ms_add(acc, m)
        out.append(NestedMarking(acc))
    return out


def _covers(lam: NestedMarking, pre_k: dict) -> bool:
    return all(ms_leq(need, proj2_kind(lam, k)) for k, need in pre_k.items())


def _label_demand(sys: SystemNet, tr: SysTransition, alpha) -> dict:
    demand = {}
    for term, channel in tr.sync:
        net = eval_term(term, alpha)
        demand.setdefault(net, {})
        demand[net][channel] = demand[net].get(channel, 0) + 1
    return demand


def enumerate_theta(sys: SystemNet, t: str, alpha: Mapping, mu: NestedMarking) -> list[tuple]:
    """Label-matching synchronisation maps, as sorted ``((net, tset), ...)``
    tuples, that some admissible consumed sub-marking can enable."""
    tr = sys.transitions[t]
    try:
        demand = _label_demand(sys, tr, alpha)
        pre = _eval_arcs(tr.pre, alpha)
    except AlgebraError:
        return []
    per_net = []
    for net in sorted(demand, key=lambda n: n.digest):
        choices = [EMPTY]
        for channel, n in sorted(demand[net].items()):
            opts = list(multisets_of_size(net.transitions_with_label(channel), n))
            if not opts:
                return []
            choices = [ms_add(c, o) for c in choices for o in opts]
        per_net.append([(net, c) for c in choices])
    lams = _lambda_choices(mu, pre)
    out = []
    for combo in itertools.product(*per_net):
        theta = tuple(combo)
        pre_k, _ = _theta_by_kind(theta)
        if any(_covers(lam, pre_k) for lam in lams):
            out.append(theta)
    return out


def _compositions(n: int, k: int) -> Iterator[tuple]:
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def enumerate_modes(sys: SystemNet, ev: Event, mu: NestedMarking) -> list[Mode]:
    """All modes (lam, rho) with lam a sub-marking of mu satisfying the
    enabling predicate; the guard is not checked here."""
    try:
        pre, post = pre_alpha(sys, ev), post_alpha(sys, ev)
    except AlgebraError:
        return []
    pre_k, post_k = _theta_by_kind(ev.theta)
    slots = list(post.elements())
    slot_kinds = {}
    for i, (_, net) in enumerate(slots):
        slot_kinds.setdefault(net.kind.name, []).append(i)
    modes = set()
    for lam in _lambda_choices(mu, pre):
        if not _covers(lam, pre_k):
            continue
        kinds = set(slot_kinds) | set(pre_k) | {a.net.kind.name for a in lam.addends}
        per_kind = []
        feasible = True
        for k in sorted(kinds):
            lk = proj2_kind(lam, k)
            residual = ms_sub(ms_add(lk, post_k.get(k, EMPTY)), pre_k.get(k, EMPTY))
            idx = slot_kinds.get(k, [])
            if not idx:
                if residual:
                    feasible = False
                    break
                continue
            place_opts = []
            for q, n in residual.sorted_items():
                homes = [i for i in idx if q in slots[i][1].places]
                if not homes:
                    feasible = False
                    break
                place_opts.append([(q, homes, split) for split in _compositions(n, len(homes))])
            if not feasible:
                break
            per_kind.append(place_opts)
        if not feasible:
            continue
        flat = [opts for place_opts in per_kind for opts in place_opts]
        for combo in itertools.product(*flat):
            marks = [dict() for _ in slots]
            for q, homes, split in combo:
                for i, c in zip(homes, split):
                    if c:
                        marks[i][q] = c
            rho = NestedMarking([Addend(p, net, Multiset(m)) for (p, net), m in zip(slots, marks)])
            modes.add(Mode(lam, rho))
            if len(modes) > sys.max_modes:
                raise ModeLimitExceeded(f"event {ev} has more than {sys.max_modes} modes")
    return sorted(modes, key=lambda m: m.sort_key)


def enabled_events(sys: SystemNet, mu: NestedMarking) -> list[tuple[Event, list[Mode]]]:
    """Every enabled event with its modes, in canonical order."""
    out = []
    for t in sorted(sys.transitions):
        for alpha in enumerate_bindings(sys, t, mu):
            ev0 = make_sync_event(t, alpha)
            if not _guard_holds(sys, ev0):
                continue
            for theta in enumerate_theta(sys, t, alpha, mu):
                ev = SyncEvent(t, ev0.binding, theta)
                modes = enumerate_modes(sys, ev, mu)
                if modes:
                    out.append((ev, modes))
    seen = set()
    for a in mu.addends:
        if (a.place, a.net) in seen:
            continue
        seen.add((a.place, a.net))
        for t in a.net.transitions:
            if t in a.net.label:
                continue
            ev = ObjEvent(a.place, a.net, t)
            modes = enumerate_modes(sys, ev, mu)
            if modes:
                out.append((ev, modes))
    out.sort(key=lambda em: em[0].sort_key)
    return out


def fire(sys: SystemNet, mu: NestedMarking, ev: Event, mode: Mode) -> NestedMarking:
    """Successor marking ``mu - lam + rho``; raises FiringError if not enabled."""
    lam, rho = mode
    if not lam <= mu:
        raise FiringError(f"{ev}: consumed sub-marking {lam} is not part of {mu}")
    if not _guard_holds(sys, ev):
        raise FiringError(f"{ev}: guard does not hold")
    if not check_phi(sys, ev, lam, rho):
        raise FiringError(f"{ev}: mode {mode} violates the enabling predicate")
    return (mu - lam) + rho
