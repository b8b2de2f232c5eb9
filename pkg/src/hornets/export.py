"""DOT, JSON and CSV writers for chains, event tables and traces.

All writers are deterministic: states keep their discovery order, edges
their construction order, and numbers a fixed textual form.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .stochastic import Dmc, Trace


def fmt_number(v) -> str:
    """Exact fraction for rationals, 12 significant digits for floats."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def fmt_decimal(v) -> str:
    """Decimal form for plotting-oriented columns, whatever the arithmetic."""
    if isinstance(v, (Fraction, float)) and not isinstance(v, bool):
        return format(float(v), ".12g")
    return fmt_number(v)


def _dot_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dmc_to_dot(d: Dmc, name=None) -> str:
    """Graphviz digraph; edge labels carry the event and its probability."""
    lines = ["digraph dmc {", "  rankdir=LR;", '  node [shape=box, fontname="monospace"];']
    for i, mu in enumerate(d.states):
        attrs = [f"label={_dot_str(mu.pretty(name))}"]
        if i == d.initial:
            attrs.append("penwidth=2")
        if not d.expanded[i]:
            attrs.append("style=dashed")
        lines.append(f"  s{i} [{', '.join(attrs)}];")
    for e in d.edges:
        label = f"{e.event.describe(name) if name else e.event}\n{fmt_number(e.probability)}"
        lines.append(f"  s{e.src} -> s{e.dst} [label={_dot_str(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dmc_to_json(d: Dmc, name=None) -> str:
    states = [{"id": i, "marking": mu.pretty(name), "digest": mu.digest,
               "expanded": d.expanded[i]} for i, mu in enumerate(d.states)]
    edges = []
    for e in d.edges:
        row = {"from": e.src, "to": e.dst,
               "event": e.event.describe(name) if name else str(e.event)}
        if isinstance(e.probability, Fraction):
            row["p_num"] = e.probability.numerator
            row["p_den"] = e.probability.denominator
        else:
            row["p"] = e.probability
        edges.append(row)
    doc = {"initial": d.initial, "truncated": d.truncated, "states": states, "edges": edges}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def events_csv(probs: dict, modes: dict | None = None, name=None) -> str:
    """``event,probability,modes`` table in canonical event order."""
    rows = [("event", "probability", "modes")]
    for ev, p in probs.items():
        rows.append((ev.describe(name) if name else str(ev), fmt_number(p),
                     len(modes[ev]) if modes else 1))
    return _csv(rows)


def trace_csv(trace: Trace, columns: list[str] | None = None) -> str:
    """One row per step: step, event, mode digest, probability, observed columns."""
    if columns is None:
        columns = [k for k, v in trace.steps[0].observed.items()
                   if isinstance(v, (str, int, float, Fraction))] if trace.steps else []
    rows = [["step", "event", "mode", "probability", *columns]]
    for s in trace.steps:
        rows.append([s.step, s.event, s.mode, fmt_number(s.probability),
                     *(fmt_number(s.observed.get(c, "")) for c in columns)])
    return _csv(rows)


def bos_csv(rows) -> str:
    """``step,prA0,prA1,structureFlag`` rows of the battle-of-sexes scenario."""
    out = [("step", "prA0", "prA1", "structureFlag")]
    out += [(step, fmt_decimal(a), fmt_decimal(b), flag) for step, a, b, flag in rows]
    return _csv(out)


def transient_csv(d: Dmc, dist: dict, name=None) -> str:
    rows = [("state", "marking", "probability")]
    for s in sorted(dist):
        rows.append((s, d.states[s].pretty(name), fmt_number(dist[s])))
    return _csv(rows)
