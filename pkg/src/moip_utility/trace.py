"""Tab-separated export of a run's trace.

Columns: ``step``, ``#IP``, ``action``, ``f1..fk``, ``G^BEST``,
``f1^LB..fk^LB``, ``G^LB``, ``f1^UB..fk^UB``.  Bound and utility columns
are left empty when the value is unchanged from the row above; the first
row always carries every value.
"""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, List, Sequence

from .model import _Infinity

INFEASIBLE_CELL = "inf."


def columns(k: int) -> List[str]:
    f = [f"f{i}" for i in range(1, k + 1)]
    return (
        ["step", "#IP", "action"]
        + f
        + ["G^BEST"]
        + [f"f{i}^LB" for i in range(1, k + 1)]
        + ["G^LB"]
        + [f"f{i}^UB" for i in range(1, k + 1)]
    )


def format_value(v, decimals: int = 1) -> str:
    if v is None:
        return ""
    if isinstance(v, _Infinity):
        return str(v)
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        q = Decimal(v.numerator) / Decimal(v.denominator)
        return str(q.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_UP))
    return str(v)


def trace_rows(trace: Sequence, k: int, decimals: int = 1) -> List[List[str]]:
    rows = []
    prev = None
    for ev in trace:
        if ev.infeasible:
            vals = [INFEASIBLE_CELL] + [""] * (k - 1)
        elif ev.values is None:
            vals = [""] * k
        else:
            vals = [format_value(v, decimals) for v in ev.values]
        bounds = [ev.g_best, *ev.lb, ev.g_lb, *ev.ub]
        cells = [format_value(v) for v in bounds]
        if prev is not None:
            cells = ["" if b == p else c for b, p, c in zip(bounds, prev, cells)]
        prev = bounds
        ip = "" if ev.ip_count is None else str(ev.ip_count)
        rows.append([str(ev.step), ip, ev.action] + vals + cells)
    return rows


def write_trace_tsv(trace: Sequence, k: int, out=None, decimals: int = 1) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(columns(k))
    w.writerows(trace_rows(trace, k, decimals))
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def read_trace_tsv(text: str) -> List[dict]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(lines, delimiter="\t"))


def fill_forward(rows: Iterable[dict], cols: Sequence[str]) -> List[dict]:
    """Replace empty cells in ``cols`` with the last non-empty value above."""
    last = {}
    out = []
    for row in rows:
        row = dict(row)
        for c in cols:
            if row.get(c, "") == "":
                row[c] = last.get(c, "")
            else:
                last[c] = row[c]
        out.append(row)
    return out
