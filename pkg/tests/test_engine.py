import random

import pytest
from hypothesis import given, settings, strategies as st

from hornets.algebra import Op, Var, parse_guard
from hornets.engine import (Mode, ObjEvent, SyncEvent, SysTransition, SystemNet, check_phi,
                            enabled_events, enumerate_bindings, enumerate_modes, fire,
                            make_sync_event)
from hornets.errors import FiringError, HornetError, ModeLimitExceeded
from hornets.marking import NestedMarking, token
from hornets.multiset import Multiset
from hornets.objectnet import Kind, ObjectNet

from oracle import engine_enabled, random_model, reference_enabled


def test_fig2_enabled_event_families(fig2):
    got = [str(ev) for ev, _ in enabled_events(fig2.system, fig2.marking)]
    assert got == ["t^{x=N1,y=N2}[]", "id_{p,N1}[N1:c]", "id_{q,N2}[N2:e]"]


def test_fig2_firing_displays(fig2):
    sys, mu = fig2.system, fig2.marking
    by_name = {str(ev): (ev, modes) for ev, modes in enabled_events(sys, mu)}
    ev, (mode,) = by_name["t^{x=N1,y=N2}[]"]
    assert fire(sys, mu, ev, mode).pretty() == "r[(N1||N2), s + v]"
    ev, (mode,) = by_name["id_{q,N2}[N2:e]"]
    assert fire(sys, mu, ev, mode).pretty() == "p[N1, v] + q[N2, f2]"


def test_fig2_merged_net_is_the_named_constant(fig2):
    sys, mu = fig2.system, fig2.marking
    ev, (mode,) = enabled_events(sys, mu)[0]
    nxt = fire(sys, mu, ev, mode)
    assert nxt.pretty(fig2.namer()) == "r[N3, s + v]"


def test_fig3_has_four_synchronised_events(fig3):
    got = [str(ev) for ev, _ in enabled_events(fig3.system, fig3.marking)]
    assert got == ["a^{x=N}[N:r]", "a^{x=N}[N:s]", "b^{x=N}[N:r]", "b^{x=N}[N:s]"]


def test_firing_rejects_foreign_mode(fig2):
    sys, mu = fig2.system, fig2.marking
    ev, (mode,) = enabled_events(sys, mu)[0]
    bad = Mode(mode.lam, NestedMarking())
    with pytest.raises(FiringError):
        fire(sys, mu, ev, bad)
    with pytest.raises(FiringError):
        fire(sys, NestedMarking(), ev, mode)


# a small two-output system for the predicate and the mode enumeration
K = Kind("K", frozenset({"a", "b", "c"}), frozenset({"go"}))
N = ObjectNet.build(K, {"u": ("a", "b"), "g": ("b", "c")}, label={"g": "go"}, name="N")
x = Var("x", "K")
SPLIT = SystemNet({"p": K, "q": K}, [SysTransition("t", {"p": (x,)}, {"q": (x, x)}),
                                     SysTransition("s", {"p": (x,)}, {"q": (x,)},
                                                   sync=((x, "go"),))])


def test_modes_distribute_tokens_over_outputs():
    mu = NestedMarking.of(token("p", N, ["a", "b"]))
    ev = make_sync_event("t", {"x": N})
    rhos = sorted(m.rho.pretty() for m in enumerate_modes(SPLIT, ev, mu))
    assert rhos == ["q[N, 0] + q[N, a + b]", "q[N, a] + q[N, b]"]


def test_synchronisation_moves_object_tokens():
    mu = NestedMarking.of(token("p", N, "b"))
    events = enabled_events(SPLIT, mu)
    sync = [(ev, m) for ev, m in events if isinstance(ev, SyncEvent) and ev.transition == "s"]
    assert len(sync) == 1
    ev, (mode,) = sync[0]
    assert fire(SPLIT, mu, ev, mode).pretty() == "q[N, c]"


def test_synchronisation_needs_object_enabledness():
    mu = NestedMarking.of(token("p", N, "a"))
    assert not any(isinstance(ev, SyncEvent) and ev.transition == "s"
                   for ev, _ in enabled_events(SPLIT, mu))


def test_predicate_conjuncts():
    mu = NestedMarking.of(token("p", N, "b"))
    ev = make_sync_event("s", {"x": N}, {N: Multiset(["g"])})
    lam = mu
    assert check_phi(SPLIT, ev, lam, NestedMarking.of(token("q", N, "c")))
    # wrong output place
    assert not check_phi(SPLIT, ev, lam, NestedMarking.of(token("p", N, "c")))
    # token balance violated
    assert not check_phi(SPLIT, ev, lam, NestedMarking.of(token("q", N, "b")))
    # consumed tokens do not cover the object step
    assert not check_phi(SPLIT, ev, NestedMarking.of(token("p", N, "a")),
                         NestedMarking.of(token("q", N, ["a", "c"])))


def test_object_autonomous_event_keeps_place():
    mu = NestedMarking.of(token("p", N, "a"))
    events = dict(enabled_events(SPLIT, mu))
    ev = ObjEvent("p", N, "u")
    (mode,) = events[ev]
    assert fire(SPLIT, mu, ev, mode).pretty() == "p[N, b]"


def test_bindings_range_over_tokens_on_the_input_place():
    M = N.with_rate("u", 2).replace(name="M")
    mu = NestedMarking.of(token("p", N), token("p", M), token("q", N))
    got = sorted(a["x"].display for a in enumerate_bindings(SPLIT, "t", mu))
    assert got == ["M", "N"]


def test_guard_filters_bindings():
    g = parse_guard("rateOf(x, u) > 1")
    sys = SystemNet({"p": K, "q": K}, [SysTransition("t", {"p": (x,)}, {"q": (x,)}, guard=g)])
    M = N.with_rate("u", 2).replace(name="M")
    mu = NestedMarking.of(token("p", N), token("p", M))
    got = [str(ev) for ev, _ in enabled_events(sys, mu) if isinstance(ev, SyncEvent)]
    assert got == ["t^{x=M}[]"]


def test_mode_limit_is_enforced():
    sys = SystemNet({"p": K, "q": K}, [SysTransition("t", {"p": (x,)}, {"q": (x, x, x)})],
                    max_modes=5)
    mu = NestedMarking.of(token("p", N, {"a": 3, "b": 3}))
    with pytest.raises(ModeLimitExceeded):
        enabled_events(sys, mu)


def test_operator_failure_disables_event():
    # N has no choice, so fix(x, u) is undefined
    fix = Op("fix", (x,), ("u",))
    sys = SystemNet({"p": K, "q": K}, [SysTransition("t", {"p": (x,)}, {"q": (fix,)})])
    mu = NestedMarking.of(token("p", N, "a"))
    assert not any(isinstance(ev, SyncEvent) for ev, _ in enabled_events(sys, mu))


@pytest.mark.parametrize("build", [
    lambda: SystemNet({"p": K}, [SysTransition("t", {"zz": (x,)}, {})]),
    lambda: SystemNet({"p": K}, [SysTransition("t", {"p": (x,)}, {"p": (Var("y", "K"),)})]),
    lambda: SystemNet({"p": K}, [SysTransition("t", {"p": (x,)}, {}, sync=((x, "nope"),))]),
    lambda: SystemNet({"p": K}, [SysTransition("t", {"p": (Var("x", "L"),)}, {})]),
    lambda: SystemNet({"p": K}, [SysTransition("t", {"p": (x,)}, {}, rate=0)]),
])
def test_system_net_validation(build):
    with pytest.raises(HornetError):
        build()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_enumeration_matches_brute_force(seed):
    sys, mu = random_model(random.Random(seed))
    assert engine_enabled(sys, mu) == reference_enabled(sys, mu)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_every_mode_fires_and_passes_the_predicate(seed):
    sys, mu = random_model(random.Random(seed))
    for ev, modes in enabled_events(sys, mu):
        for mode in modes:
            assert mode.lam <= mu
            assert check_phi(sys, ev, mode.lam, mode.rho)
            nxt = fire(sys, mu, ev, mode)
            assert nxt - mode.rho == mu - mode.lam
