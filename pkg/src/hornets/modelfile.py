"""Text format for eHornet models.

A model file is a sequence of sections.  Section headers start in column
one; their bodies are indented.  ``#`` starts a comment.

::

    kind WFN [open]
        places: i1, u, v, f1
        channels: c, e

    objectnet N1 : WFN
        places: i1, u, v, f1            # optional, defaults to arc places
        a: i1 -> u
        c: v -> f1  rate 5  label c     # rate defaults to 1, label to none
    objectnet N3 = N1 | N2               # constant defined by a term

    system
        pseudo_rate: 1                   # optional
        place p : WFN
        var z : WFN                      # optional kind for variables
        transition t  rate 2             # or "rate mape"
            in p: x
            out r: x | y, x              # comma separates inscriptions
            guard: rateOf(x, a) > 1
            sync: x.c, y.e               # term.channel

    marking
        p[N1, v]
        r[par(N1, N2), s + 2*v]

    options
        gamma: 0.5                       # used by "rate mape" transitions
        arithmetic: rational             # or float
        mode_split: uniform
        max_modes: 10000

Variables in input inscriptions take the kind of their place unless
declared with ``var``; output, guard and sync terms may only use
variables bound by the input.
"""

from __future__ import annotations

import ast
import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (And, Arith, Cmp, Const, Num, Not, Op, Or, Var,
                      eval_term, parse_guard, parse_term, TRUE)
from .engine import DEFAULT_MAX_MODES, SysTransition, SystemNet
from .errors import HornetError, ModelError
from .mape import MapeConfig, mape_rate
from .marking import Addend, NestedMarking
from .multiset import Multiset, format_multiset
from .objectnet import Kind, ObjectNet, Rate, rate_literal, rate_str

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_IDENT = re.compile(_NAME + r"$")
_COMMENT = re.compile(r"#.*$")


@dataclass(frozen=True)
class Options:
    gamma: Rate | None = None
    pseudo_rate: Rate = Fraction(1)
    arithmetic: str = "rational"
    mode_split: str = "uniform"
    max_modes: int = DEFAULT_MAX_MODES


@dataclass
class Model:
    kinds: dict
    nets: dict
    system: SystemNet
    marking: NestedMarking
    options: Options = field(default_factory=Options)
    mape: frozenset = frozenset()

    def namer(self):
        """Display function mapping nets equal to a named constant to that name."""
        names = {}
        for name, net in self.nets.items():
            names.setdefault(net.digest, name)
        return lambda net: names.get(net.digest, net.display)

    def digest(self) -> str:
        return hashlib.sha256(model_canonical(self).encode()).hexdigest()


# ------------------------------------------------------------ lines

@dataclass
class _Line:
    no: int
    indent: int
    text: str

    def error(self, msg, col=None):
        return ModelError(msg, self.no, col if col is not None else self.indent + 1)

    def col_of(self, needle: str) -> int:
        i = self.text.find(needle)
        return self.indent + 1 + (i if i >= 0 else 0)


def _lines(text: str) -> list[_Line]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = _COMMENT.sub("", raw).rstrip()
        if not body.strip():
            continue
        stripped = body.lstrip()
        out.append(_Line(no, len(body) - len(stripped), stripped))
    return out


def _sections(lines: list[_Line]) -> list[tuple[_Line, list[_Line]]]:
    secs = []
    for ln in lines:
        if ln.indent == 0:
            secs.append((ln, []))
        elif not secs:
            raise ln.error("indented line outside any section")
        else:
            secs[-1][1].append(ln)
    return secs


def _ident(ln: _Line, name: str, what: str) -> str:
    if not _IDENT.match(name):
        raise ln.error(f"invalid {what} name {name!r}", ln.col_of(name) if name else None)
    return name


def _names(ln: _Line, text: str, what: str) -> list[str]:
    items = [x.strip() for x in text.split(",") if x.strip()]
    return [_ident(ln, x, what) for x in items]


# ------------------------------------------------------------ parser

class _Parser:
    def __init__(self, text: str, arithmetic: str | None = None):
        self.kinds: dict[str, Kind] = {}
        self.nets: dict[str, ObjectNet] = {}
        self.options = Options()
        self.arithmetic = arithmetic
        self.secs = _sections(_lines(text))

    # numbers follow the arithmetic option
    def num(self, ln: _Line, text: str) -> Rate:
        try:
            v = Fraction(text.strip())
        except (ValueError, ZeroDivisionError):
            raise ln.error(f"expected a number, got {text.strip()!r}", ln.col_of(text.strip())) from None
        return float(v) if self.options.arithmetic == "float" else v

    def conv(self, v):
        return float(v) if self.options.arithmetic == "float" else v

    def parse(self) -> Model:
        if not any(h.text.split()[0] == "system" for h, _ in self.secs):
            raise ModelError("no system section", 1, 1)
        handlers = {"kind": self.kind, "objectnet": self.objectnet, "system": None,
                    "marking": None, "options": self.opts}
        for head, body in self.secs:
            word = head.text.split()[0]
            if word not in handlers:
                raise head.error(f"unknown section {word!r}")
        for head, body in self.secs:
            if head.text.split()[0] == "options":
                self.opts(head, body)
        if self.arithmetic is not None:
            if self.arithmetic not in ("rational", "float"):
                raise ModelError(f"unknown arithmetic {self.arithmetic!r}")
            self.options = _replace(self.options, arithmetic=self.arithmetic)
            if self.options.gamma is not None:
                self.options = _replace(self.options, gamma=self.conv(self.options.gamma))
        system = marking = None
        for head, body in self.secs:
            word = head.text.split()[0]
            if word == "system":
                if system is not None:
                    raise head.error("duplicate system section")
                system = self.system(head, body)
            elif word == "marking":
                if system is None:
                    raise head.error("marking section before system section")
                if marking is not None:
                    raise head.error("duplicate marking section")
                marking = self.marking(body, system[0])
            elif word in ("kind", "objectnet"):
                if system is not None:
                    raise head.error(f"{word} section after system section")
                handlers[word](head, body)
        sys, mape = system
        return Model(self.kinds, self.nets, sys, marking or NestedMarking(), self.options, mape)

    def opts(self, head, body):
        if head.text != "options":
            raise head.error("options header takes no arguments")
        vals = {}
        for ln in body:
            key, sep, val = ln.text.partition(":")
            key, val = key.strip(), val.strip()
            if not sep or not val:
                raise ln.error("expected 'key: value'")
            if key == "arithmetic":
                if val not in ("rational", "float"):
                    raise ln.error("arithmetic must be 'rational' or 'float'", ln.col_of(val))
                vals[key] = val
            elif key == "mode_split":
                if val != "uniform":
                    raise ln.error(f"unsupported mode split {val!r}", ln.col_of(val))
                vals[key] = val
            elif key == "max_modes":
                if not val.isdigit() or int(val) < 1:
                    raise ln.error("max_modes must be a positive integer", ln.col_of(val))
                vals[key] = int(val)
            elif key in ("gamma", "pseudo_rate"):
                vals[key] = (ln, val)
            else:
                raise ln.error(f"unknown option {key!r}")
        self.options = Options(arithmetic=vals.get("arithmetic", "rational"),
                               mode_split=vals.get("mode_split", "uniform"),
                               max_modes=vals.get("max_modes", DEFAULT_MAX_MODES))
        if "gamma" in vals:
            ln, val = vals["gamma"]
            g = self.num(ln, val)
            if not 0 <= g <= 1:
                raise ln.error("gamma must lie in [0, 1]", ln.col_of(val))
            self.options = _replace(self.options, gamma=g)
        if "pseudo_rate" in vals:
            ln, val = vals["pseudo_rate"]
            self.options = _replace(self.options, pseudo_rate=self.num(ln, val))

    def kind(self, head, body):
        m = re.fullmatch(rf"kind\s+({_NAME})(\s+open)?", head.text)
        if not m:
            raise head.error("expected 'kind NAME [open]'")
        name = m.group(1)
        if name in self.kinds:
            raise head.error(f"duplicate kind {name!r}", head.col_of(name))
        places, channels = [], []
        for ln in body:
            key, sep, val = ln.text.partition(":")
            if key.strip() == "places" and sep:
                places += _names(ln, val, "place")
            elif key.strip() == "channels" and sep:
                channels += _names(ln, val, "channel")
            else:
                raise ln.error("expected 'places:' or 'channels:'")
        self.kinds[name] = Kind(name, frozenset(places), frozenset(channels), bool(m.group(2)))

    def multiset(self, ln: _Line, text: str) -> Multiset:
        text = text.strip()
        if text == "0":
            return Multiset()
        counts = {}
        for part in text.split("+"):
            part = part.strip()
            n, star, q = part.partition("*")
            if star:
                if not n.strip().isdigit():
                    raise ln.error(f"bad multiplicity in {part!r}", ln.col_of(part))
                count, q = int(n), q.strip()
            else:
                count, q = 1, part
            _ident(ln, q, "place")
            counts[q] = counts.get(q, 0) + count
        return Multiset(counts)

    def resolve_const(self, ln):
        def resolve(name):
            if name not in self.nets:
                raise ln.error(f"unknown object net {name!r}", ln.col_of(name))
            return Const(self.nets[name])
        return resolve

    def objectnet(self, head, body):
        m = re.fullmatch(rf"objectnet\s+({_NAME})\s*(:|=)\s*(.+)", head.text)
        if not m:
            raise head.error("expected 'objectnet NAME : KIND' or 'objectnet NAME = TERM'")
        name, sep, rest = m.groups()
        if name in self.nets:
            raise head.error(f"duplicate object net {name!r}", head.col_of(name))
        if sep == "=":
            if body:
                raise body[0].error("a net defined by a term has no body")
            term = self.term(head, rest, self.resolve_const(head))
            try:
                net = eval_term(term, {})
            except HornetError as exc:
                raise head.error(str(exc), head.col_of(rest)) from None
            self.nets[name] = net.replace(name=name)
            return
        kind = self.kinds.get(rest.strip())
        if kind is None:
            raise head.error(f"unknown kind {rest.strip()!r}", head.col_of(rest))
        places, pre, post, rate, label = None, {}, {}, {}, {}
        for ln in body:
            key, _, val = ln.text.partition(":")
            if key.strip() == "places" and "->" not in val:
                places = (places or []) + _names(ln, val, "place")
                continue
            m = re.fullmatch(rf"({_NAME})\s*:\s*(.*?)\s*->\s*(.*)", ln.text)
            if not m:
                raise ln.error("expected 'T: PRE -> POST [rate R] [label C]'")
            t, lhs, rhs = m.groups()
            if t in pre:
                raise ln.error(f"duplicate transition {t!r}", ln.col_of(t))
            tail = re.split(r"\s+(?=(?:rate|label)\s)", rhs)
            pre[t] = self.multiset(ln, lhs)
            post[t] = self.multiset(ln, tail[0])
            for extra in tail[1:]:
                kw, val = extra.split(None, 1)
                if kw == "rate":
                    rate[t] = self.num(ln, val)
                else:
                    label[t] = _ident(ln, val.strip(), "channel")
        if places is None:
            places = set()
            for ms in list(pre.values()) + list(post.values()):
                places.update(ms)
        try:
            self.nets[name] = ObjectNet(kind, places, pre, post, rate, label, name)
        except HornetError as exc:
            raise head.error(f"object net {name!r}: {exc}") from None

    def term(self, ln, text, resolve):
        try:
            return self._numbers(parse_term(text, resolve))
        except ModelError:
            raise
        except HornetError as exc:
            raise ln.error(str(exc), ln.col_of(text)) from None

    def _numbers(self, t):
        if isinstance(t, Op):
            params = tuple(p if isinstance(p, str) else self.conv(p) for p in t.params)
            return Op(t.name, tuple(self._numbers(a) for a in t.args), params)
        return t

    def _guard_numbers(self, g):
        if isinstance(g, Num):
            return Num(self.conv(g.value))
        if isinstance(g, (Arith, Cmp)):
            return type(g)(g.op, self._guard_numbers(g.left), self._guard_numbers(g.right))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(self._guard_numbers(x) for x in g.items))
        if isinstance(g, Not):
            return Not(self._guard_numbers(g.item))
        return g

    def _split(self, ln, text) -> list[str]:
        """Top-level comma split of an inscription list."""
        try:
            node = ast.parse(text.strip(), mode="eval").body
        except SyntaxError as exc:
            raise ln.error(f"syntax error: {exc.msg}", ln.col_of(text.strip())) from None
        items = node.elts if isinstance(node, ast.Tuple) else [node]
        return [ast.unparse(x) for x in items]

    def system(self, head, body):
        if head.text != "system":
            raise head.error("system header takes no arguments")
        places, var_kinds, blocks = {}, {}, []
        pseudo = self.conv(self.options.pseudo_rate)
        for ln in body:
            word = ln.text.split()[0]
            if word == "place" or word == "var":
                m = re.fullmatch(rf"{word}\s+({_NAME})\s*:\s*({_NAME})", ln.text)
                if not m:
                    raise ln.error(f"expected '{word} NAME : KIND'")
                name, k = m.groups()
                if k not in self.kinds:
                    raise ln.error(f"unknown kind {k!r}", ln.col_of(k))
                target = places if word == "place" else var_kinds
                if name in target:
                    raise ln.error(f"duplicate {word} {name!r}", ln.col_of(name))
                target[name] = self.kinds[k] if word == "place" else k
            elif word == "transition":
                blocks.append((ln, []))
            elif word == "pseudo_rate:":
                pseudo = self.num(ln, ln.text.split(":", 1)[1])
            elif blocks and ln.indent > blocks[-1][0].indent:
                blocks[-1][1].append(ln)
            else:
                raise ln.error(f"unexpected {word!r} in system section")
        trans, mape = [], set()
        for tl, lines in blocks:
            tr, is_mape = self.transition(tl, lines, places, var_kinds)
            if tr.name in {t.name for t in trans}:
                raise tl.error(f"duplicate transition {tr.name!r}", tl.col_of(tr.name))
            try:
                SystemNet(places, [tr])
            except HornetError as exc:
                raise tl.error(str(exc)) from None
            trans.append(tr)
            if is_mape:
                mape.add(tr.name)
        try:
            sys = SystemNet(places, trans, pseudo, self.options.max_modes)
        except HornetError as exc:
            raise head.error(str(exc)) from None
        self.options = _replace(self.options, pseudo_rate=sys.pseudo_rate)
        if mape:
            if self.options.gamma is None:
                raise head.error(f"transitions {sorted(mape)} use 'rate mape' but no gamma option "
                                 "is set")
            cfg = MapeConfig(self.options.gamma)
            try:
                sys = sys.with_rates({t: self.conv(mape_rate(sys, t, cfg)) for t in mape})
            except HornetError as exc:
                raise head.error(str(exc)) from None
        return sys, frozenset(mape)

    def transition(self, tl, lines, places, var_kinds):
        m = re.fullmatch(rf"transition\s+({_NAME})(?:\s+rate\s+(\S+))?", tl.text)
        if not m:
            raise tl.error("expected 'transition NAME [rate R|mape]'")
        name, rate_text = m.groups()
        is_mape = rate_text == "mape"
        if rate_text is None or is_mape:
            rate = self.conv(Fraction(1))
        else:
            rate = self.num(tl, rate_text)
        pre, post, guard, sync = {}, {}, TRUE, []
        bound = {}
        arcs = []
        for ln in lines:
            m = re.fullmatch(rf"(in|out)\s+({_NAME})\s*:\s*(.+)", ln.text)
            if m:
                arcs.append((ln, *m.groups()))
                continue
            key, sep, val = ln.text.partition(":")
            if key.strip() == "guard" and sep:
                guard = (ln, val)
            elif key.strip() == "sync" and sep:
                sync.append((ln, val))
            else:
                raise ln.error("expected 'in P: ...', 'out P: ...', 'guard: ...' or 'sync: ...'")
        for direction in ("in", "out"):
            for ln, d, p, text in arcs:
                if d != direction:
                    continue
                if p not in places:
                    raise ln.error(f"unknown place {p!r}", ln.col_of(p))
                target = pre if d == "in" else post
                terms = [self.term(ln, x, self._resolver(ln, d, places[p], var_kinds, bound))
                         for x in self._split(ln, text)]
                target[p] = target.get(p, ()) + tuple(terms)
        if guard is not TRUE:
            ln, text = guard
            try:
                g = parse_guard(text)
            except HornetError as exc:
                raise ln.error(str(exc), ln.col_of(text.strip())) from None
            guard = self._guard_numbers(g)
        pairs = []
        for ln, text in sync:
            try:
                node = ast.parse(text.strip(), mode="eval").body
            except SyntaxError as exc:
                raise ln.error(f"syntax error: {exc.msg}", ln.col_of(text.strip())) from None
            items = node.elts if isinstance(node, ast.Tuple) else [node]
            for it in items:
                if not isinstance(it, ast.Attribute):
                    raise ln.error("sync items have the form TERM.CHANNEL", ln.col_of(ast.unparse(it)))
                term = self.term(ln, ast.unparse(it.value),
                                 self._resolver(ln, "sync", None, var_kinds, bound))
                pairs.append((term, it.attr))
        return SysTransition(name, pre, post, guard, tuple(pairs), rate), is_mape

    def _resolver(self, ln, direction, kind, var_kinds, bound):
        def resolve(name):
            if name in self.nets:
                return Const(self.nets[name])
            if direction == "in":
                k = var_kinds.get(name, kind.name)
                old = bound.setdefault(name, k)
                if old != k:
                    raise ln.error(f"variable {name!r} used with kinds {old!r} and {k!r}",
                                   ln.col_of(name))
                return Var(name, k)
            if name in bound:
                return Var(name, bound[name])
            raise ln.error(f"unknown identifier {name!r}", ln.col_of(name))
        return resolve

    def marking(self, body, sys: SystemNet) -> NestedMarking:
        adds = []
        for ln in body:
            m = re.fullmatch(rf"({_NAME})\[(.*),([^,\]]*)\]", ln.text)
            if not m:
                raise ln.error("expected 'PLACE[NET, MARKING]'")
            p, term_text, ms_text = m.groups()
            if p not in sys.places:
                raise ln.error(f"unknown place {p!r}")
            term = self.term(ln, term_text, self.resolve_const(ln))
            try:
                net = eval_term(term, {})
            except HornetError as exc:
                raise ln.error(str(exc), ln.col_of(term_text)) from None
            if net.kind != sys.places[p]:
                raise ln.error(f"net of kind {net.kind.name!r} on place {p!r} of kind "
                               f"{sys.places[p].name!r}", ln.col_of(term_text))
            ms = self.multiset(ln, ms_text)
            bad = set(ms) - net.places
            if bad:
                raise ln.error(f"marking uses places {sorted(bad)} not in the net",
                               ln.col_of(ms_text.strip()))
            adds.append(Addend(p, net, ms))
        return NestedMarking(adds)


def _replace(opts: Options, **kw) -> Options:
    d = dict(opts.__dict__)
    d.update(kw)
    return Options(**d)


def parse_model(text: str, arithmetic: str | None = None) -> Model:
    """Parse model text; raises :class:`ModelError` with a location on failure.

    ``arithmetic`` ("rational" or "float") overrides the file's option.
    """
    return _Parser(text, arithmetic).parse()


def load_model(path, arithmetic: str | None = None) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), arithmetic)


# ------------------------------------------------------------ printer

def _term_text(t, name) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return name(t.net)
    inner = [_term_text(a, name) for a in t.args]
    inner += [p if isinstance(p, str) else rate_literal(p) for p in t.params]
    return f"{t.name}({', '.join(inner)})"


def format_model(model: Model) -> str:
    """Print a model in the text format; parsing the result gives a
    digest-equal model."""
    out = []
    for k in model.kinds.values():
        out.append(f"kind {k.name}" + (" open" if k.open else ""))
        if k.places:
            out.append(f"    places: {', '.join(sorted(k.places))}")
        if k.channels:
            out.append(f"    channels: {', '.join(sorted(k.channels))}")
        out.append("")
    nets = dict(model.nets)
    known = {n.digest for n in nets.values()}
    extra = 0
    used = [a.net for a, _ in model.marking.sorted_addends()]
    for t in model.system.transitions.values():
        for arcs in (t.pre, t.post):
            for terms in arcs.values():
                for term in terms:
                    used += _consts(term)
        for term, _ in t.sync:
            used += _consts(term)
    for net in used:
        if net.digest not in known:
            extra += 1
            nets[f"_M{extra}"] = net
            known.add(net.digest)
    for name, net in nets.items():
        out.append(f"objectnet {name} : {net.kind.name}")
        out.append(f"    places: {', '.join(sorted(net.places))}")
        for t in net.transitions:
            line = f"    {t}: {format_multiset(net.pre[t])} -> {format_multiset(net.post[t])}"
            if net.rate[t] != 1:
                line += f"  rate {rate_literal(net.rate[t])}"
            if t in net.label:
                line += f"  label {net.label[t]}"
            out.append(line)
        out.append("")
    names = {}
    for name, net in nets.items():
        names.setdefault(net.digest, name)

    def name(net):
        return names[net.digest]

    sys = model.system
    out.append("system")
    if sys.pseudo_rate != 1:
        out.append(f"    pseudo_rate: {rate_literal(sys.pseudo_rate)}")
    for p, k in sys.places.items():
        out.append(f"    place {p} : {k.name}")
    for t in sys.transitions.values():
        head = f"    transition {t.name}"
        if t.name in model.mape:
            head += "  rate mape"
        elif t.rate != 1:
            head += f"  rate {rate_literal(t.rate)}"
        out.append(head)
        for word, arcs in (("in", t.pre), ("out", t.post)):
            for p, terms in arcs.items():
                if terms:
                    out.append(f"        {word} {p}: {', '.join(_term_text(x, name) for x in terms)}")
        if t.guard is not TRUE:
            out.append(f"        guard: {t.guard}")
        if t.sync:
            items = [f"{_sync_term(x, name)}.{c}" for x, c in t.sync]
            out.append(f"        sync: {', '.join(items)}")
    out.append("")
    out.append("marking")
    for a, c in model.marking.sorted_addends():
        for _ in range(c):
            out.append(f"    {a.place}[{name(a.net)}, {format_multiset(a.marking)}]")
    out.append("")
    opts = model.options
    out.append("options")
    if opts.gamma is not None:
        out.append(f"    gamma: {rate_literal(opts.gamma)}")
    out.append(f"    arithmetic: {opts.arithmetic}")
    out.append(f"    mode_split: {opts.mode_split}")
    out.append(f"    max_modes: {opts.max_modes}")
    return "\n".join(out) + "\n"


def _consts(t) -> list:
    if isinstance(t, Const):
        return [t.net]
    return [n for a in getattr(t, "args", ()) for n in _consts(a)]


def _sync_term(t, name) -> str:
    text = _term_text(t, name)
    return text if isinstance(t, (Var, Const)) else f"({text})"


# ------------------------------------------------------------ digest

def _term_enc(t):
    if isinstance(t, Var):
        return ["var", t.name, t.kind]
    if isinstance(t, Const):
        return ["net", t.net.digest]
    return ["op", t.name, [_term_enc(a) for a in t.args],
            [p if isinstance(p, str) else rate_str(p) for p in t.params]]


def model_canonical(model: Model) -> str:
    """Canonical JSON of everything that affects behaviour, plus constant names."""
    sys = model.system
    doc = {
        "kinds": sorted([k.name, sorted(k.places), sorted(k.channels), k.open]
                        for k in model.kinds.values()),
        "nets": sorted([n, net.digest] for n, net in model.nets.items()),
        "places": sorted([p, k.name] for p, k in sys.places.items()),
        "transitions": sorted(
            [t.name,
             sorted([p, sorted(json.dumps(_term_enc(x)) for x in ts)] for p, ts in t.pre.items() if ts),
             sorted([p, sorted(json.dumps(_term_enc(x)) for x in ts)] for p, ts in t.post.items() if ts),
             str(t.guard),
             sorted([json.dumps(_term_enc(x)), c] for x, c in t.sync),
             rate_str(t.rate)]
            for t in sys.transitions.values()),
        "pseudo_rate": rate_str(sys.pseudo_rate),
        "marking": model.marking.encode(),
        "options": [None if model.options.gamma is None else rate_str(model.options.gamma),
                    model.options.arithmetic, model.options.mode_split, model.options.max_modes],
        "mape": sorted(model.mape),
    }
    return json.dumps(doc, separators=(",", ":"), sort_keys=True)


def model_with_gamma(model: Model, gamma) -> Model:
    """Apply MAPE rates to every system transition (the ``--mape-gamma`` switch)."""
    from .mape import apply_mape_rates
    cfg = MapeConfig(gamma)
    sys = apply_mape_rates(model.system, cfg)
    if model.options.arithmetic == "float":
        sys = sys.with_rates({t: float(r.rate) for t, r in sys.transitions.items()})
    opts = _replace(model.options, gamma=cfg.gamma)
    return Model(model.kinds, model.nets, sys, model.marking, opts,
                 frozenset(sys.transitions))


__all__ = ["Model", "Options", "parse_model", "load_model", "format_model", "model_canonical",
           "model_with_gamma"]
