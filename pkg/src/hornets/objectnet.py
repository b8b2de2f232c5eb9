"""Object nets: p/t nets carrying per-transition rates and channel labels."""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Union

from .errors import NetError
from .multiset import EMPTY, Multiset, ms_add, ms_leq, ms_sum

Rate = Union[Fraction, float]


def as_rate(x) -> Rate:
    """Normalise a numeric literal: ints, decimals and strings become exact."""
    if isinstance(x, bool):
        raise TypeError("boolean is not a rate")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, (str, Decimal)):
        return Fraction(x)
    raise TypeError(f"not a numeric rate: {x!r}")


def positive_rate(x, what="rate") -> Rate:
    r = as_rate(x)
    if not r > 0:
        raise NetError(f"{what} must be strictly positive, got {r}")
    return r


def rate_str(r: Rate) -> str:
    """Exact textual form shared by digests and exporters."""
    return str(Fraction(r))


def rate_literal(r: Rate) -> str:
    """Readable literal that parses back to the same value."""
    if isinstance(r, float):
        return repr(r)
    if r.denominator == 1:
        return str(r.numerator)
    # decimal form when finite, else a quotient
    d = r.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        return format(Decimal(r.numerator) / Decimal(r.denominator), "f")
    return f"{r.numerator}/{r.denominator}"


@dataclass(frozen=True)
class Kind:
    """A net type with its place universe and channel set.

    An ``open`` kind also admits place ids outside ``places``; operators
    that allocate fresh places require this unless the fresh ids were
    declared up front.
    """

    name: str
    places: frozenset = frozenset()
    channels: frozenset = frozenset()
    open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "places", frozenset(self.places))
        object.__setattr__(self, "channels", frozenset(self.channels))

    def admits(self, place: str) -> bool:
        return self.open or place in self.places


def universe_bound(kind: Kind) -> int:
    """Upper bound 2^(2^(4|P_k|)) on the number of nets of a kind.

    For open kinds only the declared places are counted.
    """
    return 2 ** (2 ** (4 * len(kind.places)))


def _as_ms(x) -> Multiset:
    if isinstance(x, Multiset):
        return x
    if isinstance(x, str):
        return Multiset([x])
    if isinstance(x, Mapping):
        return Multiset(x)
    return Multiset(list(x))


class ObjectNet:
    """Immutable p/t net with rates and labels.

    Identity is structural: two nets are equal iff their digests match.
    The digest covers kind, places, arcs, rates and labels; ``name`` is a
    display label only.
    """

    __slots__ = ("kind", "places", "pre", "post", "rate", "label", "name",
                 "_digest", "_sdigest", "_transitions")

    def __init__(self, kind: Kind, places: Iterable[str], pre: Mapping, post: Mapping,
                 rate: Mapping | None = None, label: Mapping | None = None,
                 name: str | None = None):
        pre = {t: _as_ms(m) for t, m in pre.items()}
        post = {t: _as_ms(m) for t, m in post.items()}
        if set(pre) != set(post):
            raise NetError("pre and post must be defined on the same transitions")
        rate = dict(rate or {})
        label = {t: c for t, c in (label or {}).items() if c is not None}
        unknown = (set(rate) | set(label)) - set(pre)
        if unknown:
            raise NetError(f"rate/label given for unknown transitions {sorted(unknown)}")
        places = frozenset(places)
        for t in pre:
            for q in list(pre[t]) + list(post[t]):
                if q not in places:
                    raise NetError(f"transition {t!r} uses place {q!r} not in the net")
            rate[t] = positive_rate(rate.get(t, 1), f"rate of {t!r}")
        for q in places:
            if not kind.admits(q):
                raise NetError(f"place {q!r} is outside the universe of kind {kind.name!r}")
        for t, c in label.items():
            if c not in kind.channels:
                raise NetError(f"label {c!r} of {t!r} is not a channel of kind {kind.name!r}")
        if set(places) & set(pre):
            raise NetError("places and transitions must be disjoint")
        self.kind = kind
        self.places = places
        self.pre = pre
        self.post = post
        self.rate = rate
        self.label = label
        self.name = name
        self._digest = None
        self._sdigest = None
        self._transitions = tuple(sorted(pre))

    @classmethod
    def build(cls, kind: Kind, arcs: Mapping, rate=None, label=None, name=None, places=None):
        """Build from ``{t: (pre, post)}``; places default to those on arcs."""
        pre = {t: _as_ms(p) for t, (p, _) in arcs.items()}
        post = {t: _as_ms(q) for t, (_, q) in arcs.items()}
        if places is None:
            places = set()
            for m in list(pre.values()) + list(post.values()):
                places.update(m)
        return cls(kind, places, pre, post, rate, label, name)

    @property
    def transitions(self) -> tuple:
        return self._transitions

    def _encode(self, with_rates: bool) -> str:
        trans = []
        for t in self._transitions:
            row = [t,
                   [[q, n] for q, n in self.pre[t].sorted_items()],
                   [[q, n] for q, n in self.post[t].sorted_items()],
                   self.label.get(t)]
            if with_rates:
                row.append(rate_str(self.rate[t]))
            trans.append(row)
        doc = {"kind": self.kind.name, "places": sorted(self.places), "transitions": trans}
        return json.dumps(doc, separators=(",", ":"), sort_keys=True)

    @property
    def digest(self) -> str:
        """SHA-256 over the canonical JSON encoding (rates included)."""
        if self._digest is None:
            self._digest = hashlib.sha256(self._encode(True).encode()).hexdigest()
        return self._digest

    @property
    def structure_digest(self) -> str:
        """Digest that ignores rates; used for deterministic fresh naming."""
        if self._sdigest is None:
            self._sdigest = hashlib.sha256(self._encode(False).encode()).hexdigest()
        return self._sdigest

    def canonical(self) -> str:
        return self._encode(True)

    @property
    def display(self) -> str:
        return self.name if self.name else f"N#{self.digest[:8]}"

    def __eq__(self, other):
        if isinstance(other, ObjectNet):
            return self.digest == other.digest
        return NotImplemented

    def __hash__(self):
        return hash(self.digest)

    def __repr__(self):
        return f"ObjectNet({self.display})"

    def replace(self, **changes) -> ObjectNet:
        args = dict(kind=self.kind, places=self.places, pre=self.pre, post=self.post,
                    rate=self.rate, label=self.label, name=self.name)
        args.update(changes)
        return ObjectNet(**args)

    def with_rate(self, t: str, r) -> ObjectNet:
        if t not in self.pre:
            raise NetError(f"unknown transition {t!r}")
        rate = dict(self.rate)
        rate[t] = r
        return self.replace(rate=rate)

    # workflow structure
    def source_places(self) -> list:
        produced = set()
        for m in self.post.values():
            produced.update(m)
        return sorted(self.places - produced)

    def sink_places(self) -> list:
        consumed = set()
        for m in self.pre.values():
            consumed.update(m)
        return sorted(self.places - consumed)

    def consumers(self, place: str) -> list:
        return [t for t in self._transitions if place in self.pre[t]]

    def transitions_with_label(self, channel: str) -> list:
        return [t for t in self._transitions if self.label.get(t) == channel]


def _check_tset(net: ObjectNet, tset: Multiset):
    for t in tset:
        if t not in net.pre:
            raise NetError(f"net {net.display} has no transition {t!r}")


def pre_sharp(net: ObjectNet, tset: Multiset) -> Multiset:
    _check_tset(net, tset)
    return ms_sum(net.pre[t].scale(n) for t, n in tset.items())


def post_sharp(net: ObjectNet, tset: Multiset) -> Multiset:
    _check_tset(net, tset)
    return ms_sum(net.post[t].scale(n) for t, n in tset.items())


def obj_enabled(net: ObjectNet, m: Multiset, tset: Multiset) -> bool:
    """True iff ``m`` covers the summed preset of the transition multiset."""
    return ms_leq(pre_sharp(net, tset), m)


def obj_fire_effect(net: ObjectNet, tset: Multiset) -> tuple[Multiset, Multiset]:
    """(consumed, produced) object tokens for firing ``tset`` concurrently."""
    return pre_sharp(net, tset), post_sharp(net, tset)


def obj_fire(net: ObjectNet, m: Multiset, t: str) -> Multiset:
    if t not in net.pre:
        raise NetError(f"net {net.display} has no transition {t!r}")
    if not ms_leq(net.pre[t], m):
        raise NetError(f"transition {t!r} not enabled in {net.display}")
    return ms_add(m - net.pre[t], net.post[t])


def reachable_markings(net: ObjectNet, m0: Multiset, limit: int = 10_000) -> set:
    """Plain reachability set of a single object net (bounded BFS)."""
    seen = {m0}
    todo = [m0]
    while todo:
        m = todo.pop()
        for t in net.transitions:
            if ms_leq(net.pre[t], m):
                m2 = ms_add(m - net.pre[t], net.post[t])
                if m2 not in seen:
                    if len(seen) >= limit:
                        raise NetError("object reachability limit exceeded")
                    seen.add(m2)
                    todo.append(m2)
    return seen


__all__ = ["Kind", "ObjectNet", "Rate", "as_rate", "positive_rate", "universe_bound",
           "obj_enabled", "obj_fire_effect", "obj_fire", "pre_sharp", "post_sharp",
           "reachable_markings", "rate_str", "rate_literal", "EMPTY"]
