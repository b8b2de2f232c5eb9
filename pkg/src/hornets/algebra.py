"""Net algebra: terms over object nets, the built-in workflow operators,
and the guard language.

Terms are :class:`Var`, :class:`Const` or :class:`Op` nodes.  Operators
are looked up in :data:`OPERATORS`; each takes some net arguments followed
by literal parameters (rates or transition ids).
"""

from __future__ import annotations

import ast
import hashlib
import operator
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import AlgebraError, GuardError, UniverseOverflow
from .multiset import Multiset
from .objectnet import ObjectNet, Rate, as_rate, rate_literal

Binding = Mapping[str, ObjectNet]


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str
    kind: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    net: ObjectNet

    def __str__(self):
        return self.net.display


@dataclass(frozen=True)
class Op:
    name: str
    args: tuple
    params: tuple = ()

    def __str__(self):
        inner = [str(a) for a in self.args] + [_param_str(p) for p in self.params]
        return f"{self.name}({', '.join(inner)})"


NetTerm = Union[Var, Const, Op]


def _param_str(p) -> str:
    if isinstance(p, str):
        return p
    return rate_literal(as_rate(p))


@dataclass(frozen=True)
class OpDef:
    """Interpretation of an operator symbol.

    ``params`` lists the literal parameter types (``"rate"`` or
    ``"transition"``) that follow the ``arity`` net arguments.  All net
    arguments must share one kind, which is also the result kind.
    """

    name: str
    arity: int
    params: tuple
    semantics: Callable[..., ObjectNet]


OPERATORS: dict[str, OpDef] = {}


def register_op(opdef: OpDef) -> OpDef:
    OPERATORS[opdef.name] = opdef
    return opdef


def term_vars(t: NetTerm) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Op):
        out = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def term_kind(t: NetTerm) -> str:
    """Kind name of a term; raises AlgebraError if ill-kinded."""
    if isinstance(t, Var):
        return t.kind
    if isinstance(t, Const):
        return t.net.kind.name
    opdef = OPERATORS.get(t.name)
    if opdef is None:
        raise AlgebraError(f"unknown operator {t.name!r}")
    if len(t.args) != opdef.arity or len(t.params) != len(opdef.params):
        raise AlgebraError(f"operator {t.name!r} expects {opdef.arity} nets and "
                           f"{len(opdef.params)} parameters")
    kinds = {term_kind(a) for a in t.args}
    if len(kinds) != 1:
        raise AlgebraError(f"operator {t.name!r} applied to mixed kinds {sorted(kinds)}")
    return kinds.pop()


def eval_term(t: NetTerm, alpha: Binding) -> ObjectNet:
    if isinstance(t, Var):
        try:
            net = alpha[t.name]
        except KeyError:
            raise AlgebraError(f"unbound variable {t.name!r}") from None
        if net.kind.name != t.kind:
            raise AlgebraError(f"variable {t.name!r} of kind {t.kind!r} bound to a "
                               f"{net.kind.name!r} net")
        return net
    if isinstance(t, Const):
        return t.net
    opdef = OPERATORS.get(t.name)
    if opdef is None:
        raise AlgebraError(f"unknown operator {t.name!r}")
    if len(t.args) != opdef.arity or len(t.params) != len(opdef.params):
        raise AlgebraError(f"bad arity for operator {t.name!r}")
    nets = [eval_term(a, alpha) for a in t.args]
    if len({n.kind for n in nets}) > 1:
        raise AlgebraError(f"operator {t.name!r} applied to mixed kinds")
    return opdef.semantics(*nets, *t.params)


# ------------------------------------------------------------ operators

def _fresh_tag(prefix: str, *nets: ObjectNet) -> str:
    key = "|".join(sorted(n.structure_digest for n in nets))
    return f"{prefix}_{hashlib.sha256(key.encode()).hexdigest()[:8]}"


def _workflow_ends(net: ObjectNet) -> tuple[str, str]:
    src, snk = net.source_places(), net.sink_places()
    if len(src) != 1 or len(snk) != 1 or src == snk:
        raise AlgebraError(f"{net.display} is not a workflow net (needs one source and one sink place)")
    return src[0], snk[0]


def _check_disjoint(a: ObjectNet, b: ObjectNet, shared_places=()):
    if a.kind != b.kind:
        raise AlgebraError(f"operands of different kinds: {a.kind.name}, {b.kind.name}")
    common = (a.places & b.places) - set(shared_places)
    if common:
        raise AlgebraError(f"operands share places {sorted(common)}")
    common_t = set(a.transitions) & set(b.transitions)
    if common_t:
        raise AlgebraError(f"operands share transitions {sorted(common_t)}")


def _need_places(kind, names):
    for q in names:
        if not kind.admits(q):
            raise UniverseOverflow(f"fresh place {q!r} not available in the universe of kind {kind.name!r}")


def op_parallel(a: ObjectNet, b: ObjectNet) -> ObjectNet:
    """AND-composition: fresh source forks into both operands, both sinks join."""
    _check_disjoint(a, b)
    sa, fa = _workflow_ends(a)
    sb, fb = _workflow_ends(b)
    tag = _fresh_tag("par", a, b)
    i, f = f"{tag}_i", f"{tag}_f"
    _need_places(a.kind, (i, f))
    pre = {**a.pre, **b.pre, f"{tag}_fork": Multiset([i]), f"{tag}_join": Multiset([fa, fb])}
    post = {**a.post, **b.post, f"{tag}_fork": Multiset([sa, sb]), f"{tag}_join": Multiset([f])}
    names = sorted([a.display, b.display])
    return ObjectNet(a.kind, a.places | b.places | {i, f}, pre, post,
                     rate={**a.rate, **b.rate}, label={**a.label, **b.label},
                     name=f"({names[0]}||{names[1]})")


def op_xor(a: ObjectNet, b: ObjectNet, ra, rb) -> ObjectNet:
    """Rated exclusive choice; the sources and sinks of both branches are merged.

    The entry transitions of branch ``a`` get total rate ``ra`` (a single
    entry transition gets exactly ``ra``; several are rescaled keeping
    their relative weights), likewise for ``b``.
    """
    ra, rb = as_rate(ra), as_rate(rb)
    if not (ra > 0 and rb > 0):
        raise AlgebraError("XOR branch rates must be strictly positive")
    _check_disjoint(a, b)
    sa, fa = _workflow_ends(a)
    sb, fb = _workflow_ends(b)
    tag = _fresh_tag("xor", a, b)
    i, f = f"{tag}_i", f"{tag}_f"
    _need_places(a.kind, (i, f))
    ren = {sa: i, fa: f, sb: i, fb: f}

    def rn(m: Multiset) -> Multiset:
        return m.map(lambda q: ren.get(q, q))

    pre, post, rate = {}, {}, {}
    for net, r_total, src in ((a, ra, sa), (b, rb, sb)):
        entries = net.consumers(src)
        weight = sum(net.rate[t] for t in entries)
        for t in net.transitions:
            pre[t] = rn(net.pre[t])
            post[t] = rn(net.post[t])
            if t in entries:
                rate[t] = r_total if len(entries) == 1 else net.rate[t] * r_total / weight
            else:
                rate[t] = net.rate[t]
    places = (a.places | b.places | {i, f}) - {sa, fa, sb, fb}
    (n1, r1), (n2, r2) = sorted([(a.display, ra), (b.display, rb)], key=lambda x: x[0])
    name = f"({n1} XOR[{rate_literal(r1)},{rate_literal(r2)}] {n2})"
    return ObjectNet(a.kind, places, pre, post, rate=rate, label={**a.label, **b.label}, name=name)


def op_update_rate(a: ObjectNet, t: str, delta) -> ObjectNet:
    """Add ``delta`` to the rate of ``t``; the result rate must stay positive."""
    if t not in a.pre:
        raise AlgebraError(f"{a.display} has no transition {t!r}")
    delta = as_rate(delta)
    if delta == 0:
        return a
    new = a.rate[t] + delta
    if not new > 0:
        raise AlgebraError(f"rate of {t!r} would become {new}, rates must stay positive")
    rate = dict(a.rate)
    rate[t] = new
    return a.replace(rate=rate, name=None)


def _forward(net: ObjectNet, start: list, stop: set) -> set:
    seen = set(start)
    todo = list(start)
    while todo:
        t = todo.pop()
        for q in net.post[t]:
            if q in seen:
                continue
            seen.add(q)
            if q in stop:
                continue
            for u in net.consumers(q):
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
    return seen


def op_fix_choice(a: ObjectNet, keep: str) -> ObjectNet:
    """Remove the branches competing with ``keep`` in its XOR block."""
    if keep not in a.pre:
        raise AlgebraError(f"{a.display} has no transition {keep!r}")
    choice = {q for q in a.pre[keep] if len(a.consumers(q)) > 1}
    if not choice:
        raise AlgebraError(f"{keep!r} is not a branch of an XOR block in {a.display}")
    rivals = sorted({t for q in choice for t in a.consumers(q)} - {keep})
    reach_keep = _forward(a, [keep], choice)
    reach_rival = _forward(a, rivals, choice)
    doomed = set(rivals) | (reach_rival - reach_keep)
    dead_places = {x for x in doomed if x in a.places}
    dead_trans = {x for x in doomed if x in a.pre}
    for t in a.transitions:
        if (set(a.pre[t]) | set(a.post[t])) & dead_places:
            dead_trans.add(t)
    live = [t for t in a.transitions if t not in dead_trans]
    return ObjectNet(a.kind, a.places - dead_places,
                     {t: a.pre[t] for t in live}, {t: a.post[t] for t in live},
                     rate={t: a.rate[t] for t in live},
                     label={t: c for t, c in a.label.items() if t in live},
                     name=f"fix({a.display},{keep})")


register_op(OpDef("par", 2, (), op_parallel))
register_op(OpDef("xor", 2, ("rate", "rate"), op_xor))
register_op(OpDef("upd", 1, ("transition", "rate"), op_update_rate))
register_op(OpDef("fix", 1, ("transition",), op_fix_choice))


# ---------------------------------------------------------------- guards

@dataclass(frozen=True)
class Num:
    value: Rate

    def __str__(self):
        text = rate_literal(self.value)
        return f"({text})" if "/" in text else text


@dataclass(frozen=True)
class RateOf:
    var: str
    transition: str

    def __str__(self):
        return f"rateOf({self.var}, {self.transition})"


@dataclass(frozen=True)
class Arith:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class GTrue:
    def __str__(self):
        return "True"


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object

    def __str__(self):
        op = "==" if self.op == "=" else self.op
        return f"{self.left} {op} {self.right}"


@dataclass(frozen=True)
class And:
    items: tuple

    def __str__(self):
        return " and ".join(f"({g})" for g in self.items)


@dataclass(frozen=True)
class Or:
    items: tuple

    def __str__(self):
        return " or ".join(f"({g})" for g in self.items)


@dataclass(frozen=True)
class Not:
    item: object

    def __str__(self):
        return f"not ({self.item})"


Guard = Union[GTrue, Cmp, And, Or, Not]
TRUE = GTrue()

_ARITH = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}
_CMP = {"<": operator.lt, "<=": operator.le, "=": operator.eq, "==": operator.eq,
        ">": operator.gt, ">=": operator.ge, "!=": operator.ne}


def eval_arith(e, alpha: Binding) -> Rate:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, RateOf):
        net = alpha.get(e.var)
        if net is None:
            raise GuardError(f"unbound variable {e.var!r} in guard")
        if e.transition not in net.rate:
            raise GuardError(f"{net.display} has no transition {e.transition!r}")
        return net.rate[e.transition]
    if isinstance(e, Arith):
        l, r = eval_arith(e.left, alpha), eval_arith(e.right, alpha)
        if e.op == "/" and r == 0:
            raise GuardError("division by zero in guard")
        return _ARITH[e.op](l, r)
    raise GuardError(f"not an arithmetic expression: {e!r}")


def eval_guard(g, alpha: Binding) -> bool:
    if isinstance(g, GTrue):
        return True
    if isinstance(g, Cmp):
        return _CMP[g.op](eval_arith(g.left, alpha), eval_arith(g.right, alpha))
    if isinstance(g, And):
        return all(eval_guard(x, alpha) for x in g.items)
    if isinstance(g, Or):
        return any(eval_guard(x, alpha) for x in g.items)
    if isinstance(g, Not):
        return not eval_guard(g.item, alpha)
    raise GuardError(f"not a guard: {g!r}")


def guard_vars(g) -> set:
    if isinstance(g, RateOf):
        return {g.var}
    if isinstance(g, (Arith, Cmp)):
        return guard_vars(g.left) | guard_vars(g.right)
    if isinstance(g, (And, Or)):
        out = set()
        for x in g.items:
            out |= guard_vars(x)
        return out
    if isinstance(g, Not):
        return guard_vars(g.item)
    return set()


def guard_nodes(g) -> int:
    """Number of function symbols in a guard (arithmetic ops and rateOf atoms)."""
    if isinstance(g, RateOf):
        return 1
    if isinstance(g, Arith):
        return 1 + guard_nodes(g.left) + guard_nodes(g.right)
    if isinstance(g, Cmp):
        return guard_nodes(g.left) + guard_nodes(g.right)
    if isinstance(g, (And, Or)):
        return sum(guard_nodes(x) for x in g.items)
    if isinstance(g, Not):
        return guard_nodes(g.item)
    return 0


# ---------------------------------------------------------- concrete syntax

def _parse_expr(text: str) -> ast.expr:
    try:
        return ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise AlgebraError(f"syntax error in {text!r}: {exc.msg}") from None


def _literal(node) -> Rate:
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _literal(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return Fraction(repr(node.value)) if isinstance(node.value, float) else Fraction(node.value)
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        num, den = _literal(node.left), _literal(node.right)
        if den == 0:
            raise AlgebraError("division by zero in a literal")
        return num / den
    raise AlgebraError(f"expected a numeric literal, got {ast.unparse(node)!r}")


def parse_term(text: str, resolve: Callable[[str], NetTerm]) -> NetTerm:
    """Parse ``par(x, y)``, ``x | y``, ``xor(a, b, 70, 30)``, ``upd(x, t, 3)``,
    ``fix(x, t)``.  Bare names are resolved by ``resolve``."""

    def conv(node):
        if isinstance(node, ast.Name):
            return resolve(node.id)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.BitOr):
            return Op("par", (conv(node.left), conv(node.right)))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            opdef = OPERATORS.get(node.func.id)
            if opdef is None:
                raise AlgebraError(f"unknown operator {node.func.id!r}")
            if node.keywords or len(node.args) != opdef.arity + len(opdef.params):
                raise AlgebraError(f"operator {opdef.name!r} takes {opdef.arity} nets and "
                                   f"{len(opdef.params)} parameters")
            nets = tuple(conv(a) for a in node.args[:opdef.arity])
            params = []
            for ptype, a in zip(opdef.params, node.args[opdef.arity:]):
                if ptype == "transition":
                    if not isinstance(a, ast.Name):
                        raise AlgebraError(f"expected a transition name, got {ast.unparse(a)!r}")
                    params.append(a.id)
                else:
                    params.append(_literal(a))
            return Op(opdef.name, nets, tuple(params))
        raise AlgebraError(f"unsupported term syntax {ast.unparse(node)!r}")

    return conv(_parse_expr(text))


def parse_guard(text: str) -> Guard:
    """Parse guard text such as ``rateOf(x,a0)/(rateOf(x,a0)+rateOf(x,b0)) > 0.8``."""
    ops = {ast.Lt: "<", ast.LtE: "<=", ast.Eq: "=", ast.Gt: ">", ast.GtE: ">=", ast.NotEq: "!="}
    arith = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/"}

    def ex(node):
        try:
            return Num(_literal(node))
        except AlgebraError:
            pass
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "rateOf":
            if len(node.args) != 2 or not all(isinstance(a, ast.Name) for a in node.args):
                raise AlgebraError("rateOf takes a variable and a transition name")
            return RateOf(node.args[0].id, node.args[1].id)
        if isinstance(node, ast.BinOp) and type(node.op) in arith:
            return Arith(arith[type(node.op)], ex(node.left), ex(node.right))
        return Num(_literal(node))

    def gd(node):
        if isinstance(node, ast.Constant) and node.value is True:
            return TRUE
        if isinstance(node, ast.BoolOp):
            items = tuple(gd(v) for v in node.values)
            return And(items) if isinstance(node.op, ast.And) else Or(items)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
            return Not(gd(node.operand))
        if isinstance(node, ast.Compare):
            terms = [node.left] + list(node.comparators)
            parts = []
            for op, l, r in zip(node.ops, terms, terms[1:]):
                if type(op) not in ops:
                    raise AlgebraError("unsupported comparison in guard")
                parts.append(Cmp(ops[type(op)], ex(l), ex(r)))
            return parts[0] if len(parts) == 1 else And(tuple(parts))
        raise AlgebraError(f"unsupported guard syntax {ast.unparse(node)!r}")

    return gd(_parse_expr(text))
