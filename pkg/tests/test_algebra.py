from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hornets.algebra import (TRUE, And, Arith, Cmp, Const, Not, Num, Op, Or, RateOf, Var,
                             eval_guard, eval_term, guard_nodes, guard_vars, op_fix_choice,
                             op_parallel, op_update_rate, op_xor, parse_guard, parse_term,
                             term_kind, term_vars)
from hornets.errors import AlgebraError, GuardError, UniverseOverflow
from hornets.multiset import Multiset
from hornets.objectnet import Kind, ObjectNet, reachable_markings

W = Kind("W", frozenset({"i1", "f1", "i2", "f2"}), frozenset({"a", "b", "c", "d"}), open=True)


def act(name, i, f, rate=1):
    return ObjectNet.build(W, {name: (i, f)}, rate={name: rate}, label={name: name}, name=name)


A = act("a", "i1", "f1", 70)
B = act("b", "i2", "f2", 30)


def test_parallel_has_fork_and_join_and_keeps_operands():
    n = op_parallel(A, B)
    (src,), (snk,) = n.source_places(), n.sink_places()
    assert n.places >= A.places | B.places
    assert n.pre["a"] == A.pre["a"] and n.rate["a"] == 70
    reach = reachable_markings(n, Multiset([src]))
    assert Multiset([snk]) in reach
    assert Multiset(["f1", "f2"]) in reach
    assert len(n.transitions) == 4


def test_parallel_is_deterministic_and_named():
    assert op_parallel(A, B) == op_parallel(A, B)
    assert op_parallel(A, B).display == "(a||b)"


def test_parallel_rejects_overlapping_operands():
    with pytest.raises(AlgebraError):
        op_parallel(A, A)


def test_parallel_needs_workflow_operands():
    two_sources = ObjectNet.build(W, {"x": (["i1", "i2"], "f1")})
    with pytest.raises(AlgebraError):
        op_parallel(two_sources, act("b", "q1", "q2"))


def test_fresh_places_need_room_in_the_kind():
    closed = Kind("C", frozenset({"i1", "f1", "i2", "f2"}))
    a = ObjectNet.build(closed, {"a": ("i1", "f1")})
    b = ObjectNet.build(closed, {"b": ("i2", "f2")})
    with pytest.raises(UniverseOverflow):
        op_parallel(a, b)


def test_xor_shares_source_and_sink_and_sets_branch_rates():
    n = op_xor(A, B, 7, 3)
    (src,), (snk,) = n.source_places(), n.sink_places()
    assert n.consumers(src) == ["a", "b"]
    assert n.rate["a"] == 7 and n.rate["b"] == 3
    assert n.post["a"] == n.post["b"] == Multiset([snk])
    assert n.display == "(a XOR[7,3] b)"


def test_xor_rates_give_choice_probability():
    n = op_xor(A, B, Fraction(70), Fraction(30))
    assert n.rate["a"] / (n.rate["a"] + n.rate["b"]) == Fraction(7, 10)


def test_xor_rejects_nonpositive_rate():
    with pytest.raises(AlgebraError):
        op_xor(A, B, 0, 1)


def test_update_rate_adds_delta():
    n = op_update_rate(A, "a", 3)
    assert n.rate["a"] == 73
    assert op_update_rate(A, "a", 0) == A


def test_update_rate_must_stay_positive():
    with pytest.raises(AlgebraError):
        op_update_rate(A, "a", -70)
    with pytest.raises(AlgebraError):
        op_update_rate(A, "zz", 1)


def test_fix_choice_removes_rival_branch():
    n = op_xor(A, B, 70, 30)
    kept = op_fix_choice(n, "a")
    assert "b" not in kept.transitions and "a" in kept.transitions
    (src,) = kept.source_places()
    assert kept.consumers(src) == ["a"]
    assert "i2" not in kept.places and "f2" not in kept.places


def test_fix_choice_inside_parallel_keeps_other_component():
    x0 = op_xor(A, B, 70, 30)
    x1 = op_xor(act("c", "j1", "g1"), act("d", "j2", "g2"), 55, 45)
    fixed = op_fix_choice(op_parallel(x0, x1), "b")
    assert set(fixed.transitions) >= {"b", "c", "d"}
    assert "a" not in fixed.transitions


def test_fix_choice_without_choice_is_an_error():
    with pytest.raises(AlgebraError):
        op_fix_choice(A, "a")


def test_terms_evaluate_under_binding():
    x, y = Var("x", "W"), Var("y", "W")
    t = Op("par", (x, y))
    assert term_vars(t) == {"x", "y"}
    assert term_kind(t) == "W"
    assert eval_term(t, {"x": A, "y": B}) == op_parallel(A, B)
    assert eval_term(Const(A), {}) is A
    with pytest.raises(AlgebraError):
        eval_term(x, {})


def test_operator_arity_checked():
    with pytest.raises(AlgebraError):
        term_kind(Op("par", (Var("x", "W"),)))
    with pytest.raises(AlgebraError):
        term_kind(Op("nope", ()))


def test_parse_term_forms():
    resolve = lambda n: Var(n, "W")  # noqa: E731
    assert parse_term("x | y", resolve) == Op("par", (Var("x", "W"), Var("y", "W")))
    assert parse_term("xor(x, y, 70, 30.5)", resolve).params == (70, Fraction(61, 2))
    assert parse_term("upd(upd(x, a0, 3), a1, 1)", resolve).params == ("a1", 1)
    assert parse_term("fix(x, a0)", resolve).params == ("a0",)
    with pytest.raises(AlgebraError):
        parse_term("fix(x)", resolve)
    with pytest.raises(AlgebraError):
        parse_term("x +", resolve)


SHARE = "rateOf(x, a) / (rateOf(x, a) + rateOf(x, b)) > 0.8"


def test_guard_share_threshold():
    g = parse_guard(SHARE)
    n = op_xor(A, B, 70, 30)
    assert not eval_guard(g, {"x": n})
    assert eval_guard(g, {"x": op_update_rate(n, "a", 60)})
    assert guard_vars(g) == {"x"}


def test_guard_on_removed_transition_is_undefined():
    g = parse_guard(SHARE)
    fixed = op_fix_choice(op_xor(A, B, 70, 30), "a")
    with pytest.raises(GuardError):
        eval_guard(g, {"x": fixed})


def test_guard_division_by_zero_is_undefined():
    with pytest.raises(GuardError):
        eval_guard(parse_guard("1 / 0 > 0"), {})


def test_guard_counts_nodes():
    assert guard_nodes(TRUE) == 0
    # three rateOf atoms, one +, one /
    assert guard_nodes(parse_guard(SHARE)) == 5


def test_boolean_guards():
    assert eval_guard(parse_guard("True"), {})
    assert eval_guard(parse_guard("1 < 2 and not 2 < 1"), {})
    assert eval_guard(parse_guard("1 > 2 or 2 == 2"), {})
    assert eval_guard(parse_guard("1 < 2 < 3"), {})


nums = st.fractions(min_value=-5, max_value=5, max_denominator=7).map(Num)
atoms = st.one_of(nums, st.sampled_from([RateOf("x", "a"), RateOf("x", "b")]))
exprs = st.recursive(atoms, lambda e: st.builds(Arith, st.sampled_from("+-*/"), e, e),
                     max_leaves=5)
cmps = st.builds(Cmp, st.sampled_from(["<", "<=", "=", ">", ">=", "!="]), exprs, exprs)
guards = st.recursive(cmps, lambda g: st.one_of(
    st.builds(lambda xs: And(tuple(xs)), st.lists(g, min_size=2, max_size=3)),
    st.builds(lambda xs: Or(tuple(xs)), st.lists(g, min_size=2, max_size=3)),
    st.builds(Not, g)), max_leaves=4)


@given(guards)
def test_printed_guards_parse_back_to_equal_semantics(g):
    back = parse_guard(str(g))
    assert str(back) == str(parse_guard(str(back)))
    env = {"x": op_xor(A, B, 70, 30)}
    try:
        expected = eval_guard(g, env)
    except GuardError:
        with pytest.raises(GuardError):
            eval_guard(back, env)
        return
    assert eval_guard(back, env) == expected
