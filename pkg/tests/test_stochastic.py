import math
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from hornets.algebra import Var
from hornets.engine import ObjEvent, SysTransition, SystemNet, enabled_events
from hornets.errors import HornetError, LimitExceeded
from hornets.marking import NestedMarking, token
from hornets.modelfile import parse_model
from hornets.objectnet import Kind, ObjectNet
from hornets.stochastic import (Simulator, build_dmc, event_rate_product, event_rate_system,
                                expectation, firing_probabilities, simulate,
                                transient_distribution)

from conftest import bundled
from oracle import random_model

FIG3 = {"a^{x=N}[N:r]": Fraction(1, 6), "a^{x=N}[N:s]": Fraction(7, 30),
        "b^{x=N}[N:r]": Fraction(1, 4), "b^{x=N}[N:s]": Fraction(7, 20)}


def test_fig3_probabilities_exact(fig3):
    probs = firing_probabilities(fig3.system, fig3.marking)
    assert {str(e): p for e, p in probs.items()} == FIG3
    assert all(isinstance(p, Fraction) for p in probs.values())


def test_fig3_product_rule_rates(fig3):
    rates = {str(e): event_rate_product(fig3.system, e)
             for e, _ in enabled_events(fig3.system, fig3.marking)}
    assert rates == {"a^{x=N}[N:r]": 10, "a^{x=N}[N:s]": 14,
                     "b^{x=N}[N:r]": 15, "b^{x=N}[N:s]": 21}


def test_system_rate_alternative_ignores_object_rates(fig3):
    probs = firing_probabilities(fig3.system, fig3.marking, event_rate_system)
    assert sorted(probs.values()) == [Fraction(1, 5)] * 2 + [Fraction(3, 10)] * 2


def test_float_mode_probabilities(fig3):
    m = parse_model(bundled("fig3"), arithmetic="float")
    probs = firing_probabilities(m.system, m.marking)
    assert all(isinstance(p, float) for p in probs.values())
    for e, p in probs.items():
        assert p == pytest.approx(float(FIG3[str(e)]), abs=1e-15)


def test_multiplicity_becomes_an_exponent():
    k = Kind("K", frozenset({"i", "o"}), frozenset({"c"}))
    n = ObjectNet.build(k, {"r": ("i", "o")}, rate={"r": 5}, label={"r": "c"})
    x = Var("x", "K")
    sys = SystemNet({"p": k}, [SysTransition("t", {"p": (x,)}, {"p": (x,)},
                                             sync=((x, "c"), (x, "c")), rate=2)])
    mu = NestedMarking.of(token("p", n, {"i": 2}))
    (ev, _), = enabled_events(sys, mu)
    assert event_rate_product(sys, ev) == 2 * 5 ** 2


def test_object_autonomous_events_use_the_pseudo_rate(fig2):
    evs = [e for e, _ in enabled_events(fig2.system, fig2.marking)]
    obj = [e for e in evs if isinstance(e, ObjEvent)]
    assert all(event_rate_product(fig2.system, e) == 1 for e in obj)
    fast = SystemNet(fig2.system.places, fig2.system.transitions, pseudo_rate=3)
    probs = firing_probabilities(fast, fig2.marking)
    assert sorted(probs.values()) == [Fraction(1, 7), Fraction(3, 7), Fraction(3, 7)]


def test_fig3_chain(fig3):
    d = build_dmc(fig3.system, fig3.marking)
    assert len(d.states) == 5 and len(d.edges) == 4
    assert sorted(e.probability for e in d.edges) == sorted(FIG3.values())
    assert d.deadlocks() == [1, 2, 3, 4]
    assert d.exact and not d.truncated


def test_fig3_transient_one_step(fig3):
    d = build_dmc(fig3.system, fig3.marking)
    dist = transient_distribution(d, 1)
    assert sorted(dist.values()) == sorted(FIG3.values())
    assert transient_distribution(d, 0) == {0: 1}
    # absorbing afterwards
    assert transient_distribution(d, 5) == dist


def test_transient_expectation(fig3):
    d = build_dmc(fig3.system, fig3.marking)
    dist = transient_distribution(d, 1)
    on_pa = expectation(d, dist, lambda mu: 1 if mu.on_place("pa") else 0)
    assert on_pa == Fraction(2, 5)


def test_fig2_chain_rows_sum_to_one(fig2):
    d = build_dmc(fig2.system, fig2.marking)
    assert len(d.states) == 9
    assert all(s == 1 for s in d.row_sums().values())


def test_depth_limit_marks_frontier(fig2):
    d = build_dmc(fig2.system, fig2.marking, max_depth=1)
    assert d.truncated and d.frontier == 3
    with pytest.raises(LimitExceeded):
        transient_distribution(d, 2)
    assert sum(transient_distribution(d, 1, allow_truncated=True).values()) == 1


def test_state_limit(fig2):
    d = build_dmc(fig2.system, fig2.marking, max_states=3)
    assert d.truncated and len(d.states) <= 3
    with pytest.raises(LimitExceeded):
        build_dmc(fig2.system, fig2.marking, max_states=3, strict=True)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_random_chains_are_stochastic(seed):
    sys, mu = random_model(random.Random(seed))
    d = build_dmc(sys, mu, max_states=300)
    sums = d.row_sums()
    for i in range(len(d.states)):
        if d.expanded[i] and i not in d.deadlocks():
            assert sums[i] == 1


def test_simulation_is_deterministic(fig2):
    a = simulate(fig2.system, fig2.marking, seed=7, max_steps=10)
    b = simulate(fig2.system, fig2.marking, seed=7, max_steps=10)
    assert [(s.event, s.mode) for s in a.steps] == [(s.event, s.mode) for s in b.steps]
    assert a.final == b.final


def test_simulation_stops_at_deadlock(fig2):
    d = build_dmc(fig2.system, fig2.marking)
    dead = {d.states[i] for i in d.deadlocks()}
    for seed in range(10):
        tr = simulate(fig2.system, fig2.marking, seed=seed, max_steps=50)
        assert tr.deadlock and tr.final in dead
        assert len(tr.steps) <= 5


def test_simulation_follows_chain_edges(fig2):
    d = build_dmc(fig2.system, fig2.marking)
    edges = {(d.states[e.src], str(e.event)) for e in d.edges}
    sim = Simulator(fig2.system)
    for seed in range(30):
        tr = sim.run(fig2.marking, seed, 10)
        mu = fig2.marking
        for step in tr.steps[1:]:
            assert (mu, step.event) in edges
            nxt = [d.states[e.dst] for e in d.edges
                   if d.states[e.src] == mu and str(e.event) == step.event]
            mu = nxt[0]
        assert mu == tr.final


def test_empirical_frequencies_fit(fig3):
    n = 60_000
    sim = Simulator(fig3.system)
    counts = Counter(sim.run(fig3.marking, s, 1).steps[1].event for s in range(n))
    p = FIG3["a^{x=N}[N:r]"]
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(counts["a^{x=N}[N:r]"] / n - p) < 3 * sigma
    names = sorted(FIG3)
    _, pval = chisquare([counts[k] for k in names], [float(FIG3[k]) * n for k in names])
    assert pval > 0.001


def test_negative_steps_rejected(fig3):
    with pytest.raises(HornetError):
        simulate(fig3.system, fig3.marking, seed=0, max_steps=-1)
