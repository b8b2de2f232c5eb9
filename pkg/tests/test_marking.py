import pytest
from hypothesis import given, strategies as st

from hornets.errors import HornetError
from hornets.marking import (NestedMarking, place_net_counts, proj1, proj2_kind, proj2_net,
                             token)
from hornets.multiset import Multiset
from hornets.objectnet import Kind, ObjectNet

K = Kind("WFN", frozenset({"i", "v", "s", "f"}))
N1 = ObjectNet.build(K, {"c": ("v", "f")}, name="N1")
N2 = ObjectNet.build(K, {"e": ("s", "f")}, name="N2")



@st.composite
def addends(draw):
    net = draw(st.sampled_from([N1, N2]))
    m = draw(st.lists(st.sampled_from(sorted(net.places)), max_size=3))
    return token(draw(st.sampled_from(["p", "q", "r"])), net, Multiset(m))


addends = addends()
markings = st.lists(addends, max_size=4).map(NestedMarking)


def test_fig2_initial_marking_prints_canonically():
    mu = NestedMarking.of(token("q", N2, "s"), token("p", N1, "v"))
    assert mu.pretty() == "p[N1, v] + q[N2, s]"


def test_marking_outside_net_places_rejected():
    with pytest.raises(HornetError):
        NestedMarking.of(token("p", N2, "v"))


def test_projections():
    mu = NestedMarking.of(token("p", N1, "v"), token("q", N2, "s"), token("r", N1, ["f", "f"]))
    assert proj1(mu, N1) == Multiset(["p", "r"])
    assert proj2_net(mu, N1) == Multiset({"v": 1, "f": 2})
    assert proj2_kind(mu, K) == Multiset({"v": 1, "s": 1, "f": 2})
    assert proj2_kind(mu, "WFN") == proj2_kind(mu, K)
    assert place_net_counts(mu) == Multiset({("p", N1): 1, ("q", N2): 1, ("r", N1): 1})


@given(st.lists(addends, max_size=5), st.randoms())
def test_canonical_form_ignores_order(items, rnd):
    shuffled = list(items)
    rnd.shuffle(shuffled)
    a, b = NestedMarking(items), NestedMarking(shuffled)
    assert a == b
    assert a.digest == b.digest
    assert a.pretty() == b.pretty()
    assert hash(a) == hash(b)


@given(markings, markings)
def test_projections_are_additive(a, b):
    assert proj2_kind(a + b, K) == proj2_kind(a, K) + proj2_kind(b, K)
    assert place_net_counts(a + b) == place_net_counts(a) + place_net_counts(b)


@given(markings, markings)
def test_sum_difference_and_inclusion(a, b):
    assert a <= a + b
    assert (a + b) - b == a


def test_distinct_markings_have_distinct_digests():
    a = NestedMarking.of(token("p", N1, "v"))
    b = NestedMarking.of(token("p", N1, "f"))
    assert a.digest != b.digest
    assert NestedMarking().pretty() == "0"


def test_multiple_identical_tokens_are_counted():
    t = token("p", N1, "v")
    mu = NestedMarking.of(t, t)
    assert mu.pretty() == "2*p[N1, v]"
    assert len(mu) == 2
