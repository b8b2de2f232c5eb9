import pytest
from hypothesis import given, strategies as st

from hornets.errors import MultisetOverflow
from hornets.multiset import (EMPTY, MAX_COUNT, Multiset, format_multiset, ms_add, ms_leq, ms_sub,
                              multisets_of_size, sub_multisets)

elements = st.sampled_from(["a", "b", "c", "d"])
multisets = st.dictionaries(elements, st.integers(0, 5)).map(Multiset)


@given(multisets, multisets)
def test_sum_is_commutative(a, b):
    assert a + b == b + a


@given(multisets, multisets, multisets)
def test_sum_is_associative(a, b, c):
    assert (a + b) + c == a + (b + c)


@given(multisets)
def test_empty_is_neutral(a):
    assert a + EMPTY == a
    assert a - EMPTY == a
    assert EMPTY - a == EMPTY


@given(multisets, multisets)
def test_cardinality_is_additive(a, b):
    assert (a + b).cardinality == a.cardinality + b.cardinality


@given(multisets, multisets)
def test_truncated_difference(a, b):
    d = ms_sub(a, b)
    for x in "abcd":
        assert d[x] == max(a[x] - b[x], 0)
    assert ms_leq(d, a)


@given(multisets, multisets)
def test_sum_then_difference_restores(a, b):
    assert (a + b) - b == a


@given(multisets, multisets)
def test_inclusion_is_pointwise(a, b):
    assert ms_leq(a, b) == all(a[x] <= b[x] for x in "abcd")
    assert ms_leq(a, a + b)


@given(multisets, multisets)
def test_inclusion_antisymmetric(a, b):
    if a <= b and b <= a:
        assert a == b


@given(multisets)
def test_equal_multisets_hash_equal(a):
    b = Multiset(dict(reversed(list(a.items()))))
    assert a == b and hash(a) == hash(b)


def test_zero_counts_are_dropped():
    assert Multiset({"a": 0, "b": 2}) == Multiset(["b", "b"])
    assert len(Multiset({"a": 0})) == 0
    assert Multiset()["zz"] == 0


def test_negative_count_rejected():
    with pytest.raises(ValueError):
        Multiset({"a": -1})


def test_count_overflow_raises():
    big = Multiset({"a": MAX_COUNT})
    with pytest.raises(MultisetOverflow):
        ms_add(big, Multiset(["a"]))


@given(multisets)
def test_sub_multisets_are_all_included_and_distinct(m):
    subs = list(sub_multisets(m))
    expect = 1
    for _, n in m.items():
        expect *= n + 1
    assert len(subs) == expect == len(set(subs))
    assert all(ms_leq(s, m) for s in subs)


def test_sub_multisets_of_fixed_size():
    m = Multiset({"a": 2, "b": 1})
    assert sorted(map(format_multiset, sub_multisets(m, 2))) == ["2*a", "a + b"]


def test_multisets_of_size_counts_combinations_with_repetition():
    # C(n + k - 1, k) with n = 3, k = 2
    assert len(list(multisets_of_size(["r", "s", "t"], 2))) == 6
    assert list(multisets_of_size([], 1)) == []
    assert list(multisets_of_size(["r"], 0)) == [EMPTY]


def test_format_is_canonical():
    assert format_multiset(Multiset(["v", "s", "v"])) == "s + 2*v"
    assert format_multiset(EMPTY) == "0"
