"""Finite multisets with canonical sparse storage.

A :class:`Multiset` is an immutable mapping from elements to positive
counts.  Zero counts are never stored, so two multisets are equal exactly
when their mappings are equal.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping
from itertools import combinations_with_replacement
from typing import Any

from .errors import MultisetOverflow

MAX_COUNT = 2**63 - 1


def canon_key(x: Any):
    """Total-order key used for canonical sorting of heterogeneous elements."""
    if isinstance(x, str):
        return (0, x)
    if isinstance(x, int):
        return (1, x)
    digest = getattr(x, "digest", None)
    if digest is not None:
        return (2, digest)
    sort_key = getattr(x, "sort_key", None)
    if sort_key is not None:
        return (3, sort_key)
    if isinstance(x, tuple):
        return (4, tuple(canon_key(e) for e in x))
    return (5, repr(x))


def _checked(n: int) -> int:
    if n > MAX_COUNT:
        raise MultisetOverflow(f"multiset count {n} exceeds {MAX_COUNT}")
    return n


class Multiset(Mapping):
    """Immutable finite multiset.

    Construct from a mapping of counts, or from an iterable of elements
    (each occurrence counts once)::

        >>> Multiset({"x": 2}) + Multiset(["x", "y"])
        Multiset({'x': 3, 'y': 1})
    """

    __slots__ = ("_d", "_hash", "_items")

    def __init__(self, data: Mapping | Iterable | None = None):
        d: dict = {}
        if data is None:
            pass
        elif isinstance(data, Multiset):
            d = dict(data._d)
        elif isinstance(data, Mapping):
            for k, n in data.items():
                if not isinstance(n, int) or isinstance(n, bool):
                    raise TypeError(f"multiset count for {k!r} must be int, got {n!r}")
                if n < 0:
                    raise ValueError(f"negative count {n} for {k!r}")
                if n:
                    d[k] = _checked(d.get(k, 0) + n)
        else:
            for k in data:
                d[k] = _checked(d.get(k, 0) + 1)
        self._d = d
        self._hash = None
        self._items = None

    # Mapping protocol; missing elements have count 0
    def __getitem__(self, key):
        return self._d.get(key, 0)

    def __iter__(self) -> Iterator:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __contains__(self, key) -> bool:
        return key in self._d

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Multiset):
            return self._d == other._d
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self._d)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k!r}: {n}" for k, n in self.sorted_items())
        return f"Multiset({{{inner}}})"

    @property
    def cardinality(self) -> int:
        """|m|, the sum of all counts."""
        return sum(self._d.values())

    def sorted_items(self) -> tuple:
        if self._items is None:
            self._items = tuple(sorted(self._d.items(), key=lambda kv: canon_key(kv[0])))
        return self._items

    def elements(self) -> Iterator:
        """Every element repeated by its count, in canonical order."""
        for k, n in self.sorted_items():
            for _ in range(n):
                yield k

    def __add__(self, other: Multiset) -> Multiset:
        return ms_add(self, other)

    def __sub__(self, other: Multiset) -> Multiset:
        return ms_sub(self, other)

    def __le__(self, other: Multiset) -> bool:
        return ms_leq(self, other)

    def __ge__(self, other: Multiset) -> bool:
        return ms_leq(other, self)

    def scale(self, k: int) -> Multiset:
        if k < 0:
            raise ValueError("scale factor must be nonnegative")
        return Multiset({e: _checked(n * k) for e, n in self._d.items()})

    def map(self, f) -> Multiset:
        """Multiset homomorphism induced by ``f`` on elements."""
        out: dict = {}
        for e, n in self._d.items():
            fe = f(e)
            out[fe] = _checked(out.get(fe, 0) + n)
        return Multiset(out)


EMPTY = Multiset()


def ms_add(a: Multiset, b: Multiset) -> Multiset:
    if not b:
        return a
    if not a:
        return b
    d = dict(a._d)
    for k, n in b._d.items():
        d[k] = _checked(d.get(k, 0) + n)
    out = Multiset.__new__(Multiset)
    out._d, out._hash, out._items = d, None, None
    return out


def ms_sub(a: Multiset, b: Multiset) -> Multiset:
    """Truncated difference: counts never drop below zero."""
    if not b:
        return a
    d = {}
    for k, n in a._d.items():
        r = n - b._d.get(k, 0)
        if r > 0:
            d[k] = r
    out = Multiset.__new__(Multiset)
    out._d, out._hash, out._items = d, None, None
    return out


def ms_leq(a: Multiset, b: Multiset) -> bool:
    return all(b._d.get(k, 0) >= n for k, n in a._d.items())


def ms_sum(items: Iterable[Multiset]) -> Multiset:
    out = EMPTY
    for m in items:
        out = ms_add(out, m)
    return out


def sub_multisets(m: Multiset, size: int | None = None) -> Iterator[Multiset]:
    """All sub-multisets of ``m`` (optionally only those of a given cardinality)."""
    items = m.sorted_items()

    def rec(i, remaining):
        if i == len(items):
            if remaining is None or remaining == 0:
                yield {}
            return
        k, n = items[i]
        hi = n if remaining is None else min(n, remaining)
        for c in range(hi + 1):
            rest = None if remaining is None else remaining - c
            for tail in rec(i + 1, rest):
                if c:
                    tail = dict(tail)
                    tail[k] = c
                yield tail

    for d in rec(0, size):
        yield Multiset(d)


def multisets_of_size(elements: Iterable[Hashable], size: int) -> Iterator[Multiset]:
    """All multisets of exactly ``size`` elements drawn from ``elements``."""
    pool = sorted(set(elements), key=canon_key)
    for combo in combinations_with_replacement(pool, size):
        yield Multiset(combo)


def format_multiset(m: Multiset, show=str) -> str:
    """Formal-sum rendering, e.g. ``s + 2*v``; the empty multiset is ``0``."""
    if not m:
        return "0"
    parts = []
    for k, n in m.sorted_items():
        parts.append(show(k) if n == 1 else f"{n}*{show(k)}")
    return " + ".join(parts)
