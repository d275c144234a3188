"""Shrinking-bounds search for the utility-optimal efficient point.

The loop keeps a box ``lb <= f(x) <= ub`` that must contain any point
better than the incumbent:

* Step 0 runs one lexicographic IP per objective to seed the incumbent
  and the lower bounds.
* Step 1 stops if the utility at ``lb`` cannot beat the incumbent, and
  otherwise caps each objective by inverting the utility.
* Step 2 raises the lower bounds from capped LP relaxations.
* Step 3 sweeps the ``(k-1)``-objective nondominated set inside the box,
  either improving the incumbent or lowering the last objective's cap.

Every step appends :class:`TraceEvent` rows; stopping early (IP or time
budget) still leaves a valid incumbent and a utility lower bound.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .frontier import EnumStatus, Signal, enumerate_nondominated
from .ip import BudgetExhausted, IpResult, SolveCounter, solve_lexicographic
from .lp import LpProblem, LpStatus, is_integral, solve_lp
from .model import NEG_INF, POS_INF, BoundsState, MoipInstance, evaluate_objectives
from .utility import UtilityExpr, evaluate, invert_bound, utility_lt

log = logging.getLogger(__name__)


class RunStatus(enum.Enum):
    PROVED_OPTIMAL = "proved_optimal"
    BUDGET_EXHAUSTED = "budget_exhausted"
    INFEASIBLE = "infeasible"


class Step(enum.Enum):
    STOP = "stop"
    CONTINUE = "continue"
    IMPROVED = "improved"
    UNCHANGED = "unchanged"
    EMPTY = "empty"
    IMPROVED_GBEST = "improved_gbest"
    TIGHTENED_UB = "tightened_ub"
    EXHAUSTED = "exhausted"


@dataclass
class RunConfig:
    """``init_orders`` are 0-based priority orders for Step 0, one starting with each objective."""

    init_orders: Optional[List[Tuple[int, ...]]] = None
    max_ip_solves: Optional[int] = None
    time_budget: Optional[float] = None

    def orders_for(self, k: int) -> List[Tuple[int, ...]]:
        if self.init_orders is None:
            return [(i,) + tuple(j for j in range(k) if j != i) for i in range(k)]
        orders = [tuple(o) for o in self.init_orders]
        heads = sorted(o[0] for o in orders if o)
        if heads != list(range(k)):
            raise ValueError("Step 0 needs exactly one priority order starting with each objective")
        for o in orders:
            if len(set(o)) != len(o) or any(not 0 <= i < k for i in o):
                raise ValueError(f"invalid priority order {o}")
        return orders


@dataclass(frozen=True)
class TraceEvent:
    step: int
    action: str
    ip_count: Optional[int]  # running total, or None if the row solved no IP
    values: Optional[tuple]  # objective values (ints or Fractions); None if infeasible/none
    g_best: object
    lb: tuple
    ub: tuple
    g_lb: object
    infeasible: bool = False
    incumbent: Optional[tuple] = None


@dataclass
class RunResult:
    status: RunStatus
    g_best: object
    incumbent: Optional[tuple]
    incumbent_f: Optional[tuple]
    g_lower_bound: object
    trace: List[TraceEvent]
    ip_solves: int
    lb: tuple = ()
    ub: tuple = ()
    frontier: Optional[list] = None
    g_lb_final: object = NEG_INF  # utility at the final lower bounds, not itself a bound

    @property
    def optimal(self) -> bool:
        return self.status is RunStatus.PROVED_OPTIMAL


def _names(idx) -> str:
    return ",".join(f"f{i + 1}" for i in idx)


class ShrinkingBoundsSolver:
    """Stateful driver; build one per run and call :meth:`run`."""

    def __init__(self, inst: MoipInstance, expr: UtilityExpr, cfg: Optional[RunConfig] = None):
        if expr.k != inst.k:
            raise ValueError(f"utility takes {expr.k} objectives, instance has {inst.k}")
        self.inst = inst
        self.expr = expr
        self.cfg = cfg or RunConfig()
        self.state = BoundsState.fresh(inst.k)
        self.counter = SolveCounter(self.cfg.max_ip_solves, self.cfg.time_budget)
        self.trace: List[TraceEvent] = []
        self._last_lp_caps = None

    # -- helpers -------------------------------------------------------

    def g_lb(self):
        return evaluate(self.expr, self.state.lb)

    def _record(self, step, action, values=None, ip=False, infeasible=False):
        s = self.state
        self.trace.append(
            TraceEvent(
                step=step,
                action=action,
                ip_count=self.counter.ip_solves if ip else None,
                values=None if values is None else tuple(values),
                g_best=s.g_best,
                lb=tuple(s.lb),
                ub=tuple(s.ub),
                g_lb=self.g_lb(),
                infeasible=infeasible,
                incumbent=s.incumbent,
            )
        )

    def _offer(self, point, f) -> bool:
        g = evaluate(self.expr, f)
        if utility_lt(self.expr, g, self.state.g_best):
            self.state.offer(g, point, f)
            log.debug("new incumbent %s with utility %s", f, g)
            return True
        return False

    # -- steps ---------------------------------------------------------

    def step0_initialise(self) -> bool:
        """Seed incumbent and lower bounds; False if the instance is infeasible."""
        for order in self.cfg.orders_for(self.inst.k):
            res = solve_lexicographic(self.inst, order, (), self.counter)
            if not res.optimal:
                self._record(0, f"IP Min {_names(order[:1])}", ip=True, infeasible=True)
                return False
            self._offer(res.solution, res.objectives)
            self.state.raise_lb(order[0], res.value)
            self._record(0, f"IP Min {_names(order[:1])}", res.objectives, ip=True)
        return True

    def step1_update_upper_bounds(self) -> Step:
        s = self.state
        if not utility_lt(self.expr, self.g_lb(), s.g_best):
            return Step.STOP
        for i in range(s.k):
            s.lower_ub(i, invert_bound(self.expr, s.lb, i, s.g_best))
        self._record(1, "Find f_A")
        return Step.CONTINUE

    def step2_update_lower_bounds(self) -> Step:
        s = self.state
        caps = tuple(s.ub)
        self._last_lp_caps = caps
        changed = False
        values = []
        for i in range(s.k):
            res = solve_lp(LpProblem.for_objective(self.inst, i, caps))
            if res.status is LpStatus.INFEASIBLE:
                self._record(2, "LP Min f_i", infeasible=True)
                return Step.EMPTY
            if res.status is LpStatus.UNBOUNDED:
                values.append(NEG_INF)
                continue
            values.append(res.value)
            if s.raise_lb(i, math.ceil(res.value)):
                changed = True
            p = is_integral(res)
            if p is not None:
                self._offer(p, evaluate_objectives(self.inst, p))
        self._record(2, "LP Min f_i", values)
        return Step.IMPROVED if changed else Step.UNCHANGED

    def step3_enumerate_and_tighten(self) -> Step:
        s = self.state
        k = s.k
        active = list(range(k - 1)) if k > 1 else [0]
        action = f"IP Min {_names(active)}"
        improved = []

        def on_solve(res: IpResult, is_new: bool):
            if not res.optimal:
                self._record(3, action, ip=True, infeasible=True)
                return None
            better = is_new and self._offer(res.solution, res.objectives)
            self._record(3, action, res.objectives, ip=True)
            if better:
                improved.append(res.objectives)
                return Signal.ABORT
            return None

        out = enumerate_nondominated(self.inst, active, tuple(s.ub), self.counter, on_solve=on_solve)
        if out.status is EnumStatus.ABORTED:
            return Step.IMPROVED_GBEST
        if out.status is EnumStatus.INFEASIBLE:
            return Step.EXHAUSTED
        s.lower_ub(k - 1, max(v[k - 1] for v in out.vectors) - 1)
        self._record(3, f"Set f{k}^UB")
        return Step.TIGHTENED_UB

    # -- main loop -----------------------------------------------------

    def run(self) -> RunResult:
        status = RunStatus.PROVED_OPTIMAL
        try:
            if not self.step0_initialise():
                status = RunStatus.INFEASIBLE
            else:
                self._loop()
        except BudgetExhausted as exc:
            log.info("stopping early: %s", exc)
            status = RunStatus.BUDGET_EXHAUSTED
        return self._result(status)

    def _loop(self):
        goto = 1
        while True:
            if goto == 1:
                if self.step1_update_upper_bounds() is Step.STOP:
                    return
                goto = 2
            if goto == 2:
                # Step 2 depends only on the caps, so an unchanged box cannot move lb
                if tuple(self.state.ub) != self._last_lp_caps:
                    r = self.step2_update_lower_bounds()
                    if r is Step.EMPTY:
                        return
                    if r is Step.IMPROVED:
                        goto = 1
                        continue
            r = self.step3_enumerate_and_tighten()
            if r is Step.EXHAUSTED:
                return
            goto = 1 if r is Step.IMPROVED_GBEST else 2

    def _result(self, status) -> RunResult:
        s = self.state
        g_at_lb = NEG_INF if status is RunStatus.INFEASIBLE else self.g_lb()
        # once Step 3 has pushed the incumbent out of the box, the box can end
        # up above the optimum; only the smaller of the two is a valid bound
        g_lower = min(g_at_lb, s.g_best)
        return RunResult(
            status=status,
            g_best=s.g_best,
            incumbent=s.incumbent,
            incumbent_f=s.incumbent_f,
            g_lower_bound=g_lower,
            g_lb_final=g_at_lb,
            trace=self.trace,
            ip_solves=self.counter.ip_solves,
            lb=tuple(s.lb),
            ub=tuple(s.ub),
        )


def trace_violations(result: RunResult, inst: MoipInstance, expr: UtilityExpr) -> List[str]:
    """Check a run against the invariants that make its answer trustworthy.

    Bounds only shrink, the best utility never rises and is always attained
    by a feasible incumbent, every pass through Step 1 sees a changed box or
    incumbent, and the final lower bound does not exceed the optimum.  The
    utility at the final box may exceed the optimum only when the incumbent
    has already been cut out of the box.
    """
    problems = []
    prev = None
    passes = []
    for n, ev in enumerate(result.trace):
        if ev.incumbent is not None:
            f = evaluate_objectives(inst, ev.incumbent)
            if not inst.is_feasible(ev.incumbent):
                problems.append(f"row {n}: incumbent is not feasible")
            if evaluate(expr, f) != ev.g_best:
                problems.append(f"row {n}: best utility {ev.g_best} not attained by incumbent {f}")
        elif ev.g_best != POS_INF:
            problems.append(f"row {n}: finite best utility without an incumbent")
        if prev is not None:
            if any(a < b for a, b in zip(ev.lb, prev.lb)):
                problems.append(f"row {n}: a lower bound decreased")
            if any(a > b for a, b in zip(ev.ub, prev.ub)):
                problems.append(f"row {n}: an upper bound increased")
            if ev.g_best > prev.g_best:
                problems.append(f"row {n}: best utility increased")
        if ev.step == 1:
            passes.append((n, ev.lb, ev.ub, ev.g_best))
        prev = ev
    for (_, *a), (n, *b) in zip(passes, passes[1:]):
        if a == b:
            problems.append(f"row {n}: loop pass changed no bound and no incumbent")
    if result.status is not RunStatus.INFEASIBLE:
        if result.g_lower_bound > result.g_best:
            problems.append("final utility lower bound exceeds the best utility")
        if result.g_lb_final > result.g_best and result.incumbent_f is not None:
            inside = all(l <= f <= u for l, f, u in zip(result.lb, result.incumbent_f, result.ub))
            if inside:
                problems.append("utility at the final box exceeds an incumbent that lies inside it")
    return problems


def run(inst: MoipInstance, expr: UtilityExpr, cfg: Optional[RunConfig] = None) -> RunResult:
    """Minimise the utility over the efficient set with the shrinking-bounds loop."""
    return ShrinkingBoundsSolver(inst, expr, cfg).run()


def run_naive(inst: MoipInstance, expr: UtilityExpr, cfg: Optional[RunConfig] = None) -> RunResult:
    """Baseline: enumerate the whole nondominated set and take the best utility.

    On early stop the lower bound is ``-inf``; the baseline has no box to
    bound the unexplored part of the frontier.
    """
    if expr.k != inst.k:
        raise ValueError(f"utility takes {expr.k} objectives, instance has {inst.k}")
    cfg = cfg or RunConfig()
    counter = SolveCounter(cfg.max_ip_solves, cfg.time_budget)
    state = BoundsState.fresh(inst.k)
    frontier = []

    def consume(vec, point):
        frontier.append(vec)
        g = evaluate(expr, vec)
        if utility_lt(expr, g, state.g_best):
            state.offer(g, point, vec)

    status = RunStatus.PROVED_OPTIMAL
    try:
        out = enumerate_nondominated(inst, range(inst.k), (), counter, consumer=consume)
        if out.status is EnumStatus.INFEASIBLE:
            status = RunStatus.INFEASIBLE
    except BudgetExhausted:
        status = RunStatus.BUDGET_EXHAUSTED
    return RunResult(
        status=status,
        g_best=state.g_best,
        incumbent=state.incumbent,
        incumbent_f=state.incumbent_f,
        g_lower_bound=state.g_best if status is RunStatus.PROVED_OPTIMAL else NEG_INF,
        trace=[],
        ip_solves=counter.ip_solves,
        frontier=frontier,
    )
