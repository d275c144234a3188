"""Depth-first branch-and-bound over the exact LP, plus lexicographic solves.

Solves are charged to a :class:`SolveCounter`, one unit per top-level call
(a whole lexicographic chain counts once).  The counter also carries the
optional IP and wall-clock budgets; the check happens before a solve
starts, so a running solve is never interrupted.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .lp import LpProblem, LpStatus, first_fractional, solve_lp
from .model import POS_INF, MoipInstance, ObjectiveVector, Point, evaluate_objectives


class IpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


class BudgetExhausted(Exception):
    """Raised by :meth:`SolveCounter.charge` when a budget would be exceeded."""


class UnboundedIP(ArithmeticError):
    pass


class SolveCounter:
    def __init__(self, max_ip_solves: Optional[int] = None, time_budget: Optional[float] = None):
        if max_ip_solves is not None and max_ip_solves < 1:
            raise ValueError("an IP budget must allow at least one solve")
        if time_budget is not None and time_budget <= 0:
            raise ValueError("a time budget must be positive")
        self.ip_solves = 0
        self.max_ip_solves = max_ip_solves
        self.deadline = None if time_budget is None else time.monotonic() + time_budget

    def charge(self):
        if self.max_ip_solves is not None and self.ip_solves >= self.max_ip_solves:
            raise BudgetExhausted(f"IP budget of {self.max_ip_solves} solves used up")
        if self.deadline is not None and time.monotonic() >= self.deadline:
            raise BudgetExhausted("time budget used up")
        self.ip_solves += 1

    def __repr__(self):
        return f"SolveCounter(ip_solves={self.ip_solves})"


@dataclass(frozen=True)
class IpProblem:
    """Minimise an objective row (0-based index) or explicit cost vector under caps."""

    inst: MoipInstance
    objective: object
    obj_caps: Tuple = ()

    def costs(self) -> Tuple[Fraction, ...]:
        if isinstance(self.objective, int):
            return tuple(Fraction(c) for c in self.inst.C[self.objective])
        return tuple(Fraction(c) for c in self.objective)


@dataclass(frozen=True)
class IpResult:
    status: IpStatus
    value: Optional[int] = None
    solution: Optional[Point] = None
    objectives: Optional[ObjectiveVector] = None
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is IpStatus.OPTIMAL


def branch_and_bound(inst: MoipInstance, costs: Sequence[Fraction], obj_caps=()) -> IpResult:
    """Uncounted B&B core: lowest-index fractional branching, floor child first."""
    costs = tuple(Fraction(c) for c in costs)
    integral_costs = all(c.denominator == 1 for c in costs)
    n = inst.n
    best_val = None
    best_x = None
    nodes = 0
    stack = [((0,) * n, (POS_INF,) * n)]
    while stack:
        lower, upper = stack.pop()
        nodes += 1
        res = solve_lp(LpProblem(inst, costs, obj_caps, lower, upper))
        if res.status is LpStatus.INFEASIBLE:
            continue
        if res.status is LpStatus.UNBOUNDED:
            raise UnboundedIP("LP relaxation is unbounded; the IP has no finite optimum")
        bound = math.ceil(res.value) if integral_costs else res.value
        if best_val is not None and bound >= best_val:
            continue
        j = first_fractional(res.solution)
        if j is None:
            best_val = res.value
            best_x = tuple(int(v) for v in res.solution)
            continue
        v = res.solution[j]
        up = list(upper)
        up[j] = math.floor(v)
        lo = list(lower)
        lo[j] = math.ceil(v)
        stack.append((tuple(lo), upper))
        stack.append((lower, tuple(up)))
    if best_x is None:
        return IpResult(IpStatus.INFEASIBLE, nodes=nodes)
    value = int(best_val) if best_val.denominator == 1 else best_val
    return IpResult(IpStatus.OPTIMAL, value, best_x, evaluate_objectives(inst, best_x), nodes)


def solve_ip(prob: IpProblem, counter: SolveCounter) -> IpResult:
    counter.charge()
    return branch_and_bound(prob.inst, prob.costs(), prob.obj_caps)


def solve_lexicographic(
    inst: MoipInstance,
    priority: Sequence[int],
    obj_caps: Sequence,
    counter: SolveCounter,
) -> IpResult:
    """Minimise objectives (0-based indices) in priority order as one counted solve.

    Each stage caps the objective it just optimised at its optimum, which
    for an integer minimum is the same as fixing it.  ``value`` of the
    result is the first-stage optimum.
    """
    if not priority:
        raise ValueError("priority must name at least one objective")
    if len(set(priority)) != len(priority):
        raise ValueError(f"priority {tuple(priority)} repeats an objective")
    if any(not 0 <= i < inst.k for i in priority):
        raise ValueError(f"priority {tuple(priority)} names an objective outside 0..{inst.k - 1}")
    caps = list(obj_caps) if obj_caps else [POS_INF] * inst.k
    counter.charge()
    first = None
    nodes = 0
    res = None
    for i in priority:
        res = branch_and_bound(inst, inst.C[i], tuple(caps))
        nodes += res.nodes
        if not res.optimal:
            return IpResult(IpStatus.INFEASIBLE, nodes=nodes)
        if first is None:
            first = res.value
        if res.value < caps[i]:
            caps[i] = res.value
    return IpResult(IpStatus.OPTIMAL, first, res.solution, res.objectives, nodes)
