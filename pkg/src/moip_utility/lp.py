"""Exact two-phase simplex for the LP relaxations of capped MOIP problems.

The tableau holds ``gmpy2.mpq`` rationals so the optimum and the
integrality test are exact; results are handed back as ``Fraction``.
Pivots follow Bland's rule, which both prevents cycling and makes every
solve reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from gmpy2 import mpq

from .model import POS_INF, MoipInstance, Point, is_finite


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """Minimise ``objective . x`` over ``A x = b, x >= 0`` plus optional caps.

    ``obj_caps[i]`` bounds objective row ``i`` from above (``POS_INF`` means
    no cap).  ``lower``/``upper`` are per-variable bounds used by
    branch-and-bound; they default to ``0`` and ``POS_INF``.
    """

    inst: MoipInstance
    objective: Tuple[Fraction, ...]
    obj_caps: Tuple = ()
    lower: Tuple[int, ...] = ()
    upper: Tuple = ()

    def __post_init__(self):
        inst = self.inst
        object.__setattr__(self, "objective", tuple(Fraction(c) for c in self.objective))
        if len(self.objective) != inst.n:
            raise ValueError(f"objective has {len(self.objective)} entries, expected {inst.n}")
        caps = tuple(self.obj_caps) if self.obj_caps else (POS_INF,) * inst.k
        if len(caps) != inst.k:
            raise ValueError(f"{len(caps)} objective caps given, instance has {inst.k} objectives")
        object.__setattr__(self, "obj_caps", caps)
        lower = tuple(self.lower) if self.lower else (0,) * inst.n
        upper = tuple(self.upper) if self.upper else (POS_INF,) * inst.n
        if len(lower) != inst.n or len(upper) != inst.n:
            raise ValueError("variable bound vectors must have one entry per variable")
        if any(v < 0 for v in lower):
            raise ValueError("variable lower bounds must be nonnegative")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def for_objective(cls, inst: MoipInstance, i: int, obj_caps=()) -> "LpProblem":
        """Minimise objective row ``i`` (0-based)."""
        return cls(inst, inst.C[i], obj_caps)


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    value: Optional[Fraction] = None
    solution: Optional[Tuple[Fraction, ...]] = None
    pivots: int = field(default=0, compare=False)


_ZERO = mpq(0)
_ONE = mpq(1)


def _fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class _Tableau:
    """Dense simplex tableau; row ``-1`` holds reduced costs, column ``-1`` the RHS."""

    def __init__(self, rows, basis, ncols):
        self.ncols = ncols
        self.rows = rows
        self.basis = basis
        self.pivots = 0

    def set_costs(self, cost):
        ncols = self.ncols
        z = [_ZERO] * (ncols + 1)
        for j, c in enumerate(cost):
            z[j] = mpq(c)
        # price out the basic columns
        for r, bj in enumerate(self.basis):
            cb = z[bj]
            if cb:
                row = self.rows[r]
                for j in range(ncols + 1):
                    if row[j]:
                        z[j] -= cb * row[j]
        self.z = z

    def pivot(self, r, col):
        rows = self.rows
        prow = rows[r]
        piv = prow[col]
        if piv != 1:
            prow[:] = [v / piv for v in prow]
        nz = [j for j, v in enumerate(prow) if v]
        for i, row in enumerate(rows):
            if i != r:
                f = row[col]
                if f:
                    for j in nz:
                        row[j] -= f * prow[j]
        f = self.z[col]
        if f:
            for j in nz:
                self.z[j] -= f * prow[j]
        self.basis[r] = col
        self.pivots += 1

    def optimise(self, allowed):
        """Run Bland's-rule pivots; return False if the LP is unbounded."""
        rows = self.rows
        while True:
            col = next((j for j in allowed if self.z[j] < 0), None)
            if col is None:
                return True
            best = None
            for r, row in enumerate(rows):
                a = row[col]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], col)


def solve_lp(prob: LpProblem) -> LpResult:
    """Solve the relaxation exactly with a two-phase dense simplex."""
    inst = prob.inst
    n = inst.n
    lower = prob.lower
    for lo, up in zip(lower, prob.upper):
        if is_finite(up) and up < lo:
            return LpResult(LpStatus.INFEASIBLE)

    # substitute x = lower + y so every column is y >= 0
    def shifted(row, rhs):
        return rhs - sum(a * l for a, l in zip(row, lower) if a and l)

    eq_rows = [(list(row), shifted(row, rhs)) for row, rhs in zip(inst.A, inst.b)]
    le_rows = []
    for row, cap in zip(inst.C, prob.obj_caps):
        if is_finite(cap):
            le_rows.append((list(row), shifted(row, cap)))
    for j, up in enumerate(prob.upper):
        if is_finite(up):
            unit = [0] * n
            unit[j] = 1
            le_rows.append((unit, up - lower[j]))

    n_slack = len(le_rows)
    specs = [(row, rhs, None) for row, rhs in eq_rows]
    specs += [(row, rhs, n + s) for s, (row, rhs) in enumerate(le_rows)]

    n_art = sum(1 for row, rhs, slack in specs if slack is None or rhs < 0)
    ncols = n + n_slack + n_art
    rows, basis = [], []
    art = n + n_slack
    for row, rhs, slack in specs:
        t = [_ZERO] * (ncols + 1)
        for j, a in enumerate(row):
            if a:
                t[j] = mpq(a)
        if slack is not None:
            t[slack] = _ONE
        t[-1] = mpq(rhs)
        if rhs < 0:
            t = [-v for v in t]
        if slack is not None and rhs >= 0:
            basis.append(slack)
        else:
            t[art] = _ONE
            basis.append(art)
            art += 1
        rows.append(t)

    tab = _Tableau(rows, basis, ncols)
    real_cols = range(n + n_slack)
    if n_art:
        phase1 = [0] * (n + n_slack) + [1] * n_art
        tab.set_costs(phase1)
        tab.optimise(range(ncols))
        if -tab.z[-1] > 0:
            return LpResult(LpStatus.INFEASIBLE, pivots=tab.pivots)
        # drive zero-level artificials out of the basis; drop redundant rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= n + n_slack:
                col = next((j for j in real_cols if tab.rows[r][j]), None)
                if col is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, col)
            r += 1
        for row in tab.rows:
            del row[n + n_slack:-1]
        tab.ncols = n + n_slack

    tab.set_costs([mpq(c.numerator, c.denominator) for c in prob.objective] + [0] * n_slack)
    if not tab.optimise(real_cols):
        return LpResult(LpStatus.UNBOUNDED, pivots=tab.pivots)

    y = [_ZERO] * n
    for r, bj in enumerate(tab.basis):
        if bj < n:
            y[bj] = tab.rows[r][-1]
    x = tuple(_fraction(yj + lj) for yj, lj in zip(y, lower))
    value = sum((c * v for c, v in zip(prob.objective, x) if c), Fraction(0))
    return LpResult(LpStatus.OPTIMAL, value, x, pivots=tab.pivots)


def is_integral(res: LpResult) -> Optional[Point]:
    """Return the solution as an integer point when every component is integral."""
    if res.status is not LpStatus.OPTIMAL:
        raise ValueError("only optimal LP results carry a solution")
    if all(v.denominator == 1 for v in res.solution):
        return tuple(int(v) for v in res.solution)
    return None


def first_fractional(solution: Sequence[Fraction]) -> Optional[int]:
    return next((j for j, v in enumerate(solution) if v.denominator != 1), None)
