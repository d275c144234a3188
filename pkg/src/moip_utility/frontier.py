"""Recursive generation of nondominated objective vectors under objective caps.

A ``q``-objective sweep repeatedly enumerates the ``(q-1)``-objective
subproblem and then caps the ``q``-th active objective one below the
largest value it just produced, until the subproblem becomes infeasible.
The one-objective base case is a single lexicographic IP, which makes
every generated vector nondominated for the full ``k``-objective problem.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from .ip import IpResult, SolveCounter, solve_lexicographic
from .model import POS_INF, MoipInstance, ObjectiveVector


class Signal(enum.Enum):
    CONTINUE = "continue"
    ABORT = "abort"


class EnumStatus(enum.Enum):
    COMPLETE = "complete"
    ABORTED = "aborted"
    INFEASIBLE = "infeasible"


@dataclass
class EnumerationOutcome:
    status: EnumStatus
    vectors: List[ObjectiveVector] = field(default_factory=list)
    points: list = field(default_factory=list)
    ip_solves: int = 0


Consumer = Callable[[ObjectiveVector, tuple], Optional[Signal]]
SolveHook = Callable[[IpResult, bool], Optional[Signal]]


class _Abort(Exception):
    pass


def lexicographic_order(active: Sequence[int], k: int) -> list:
    """Priority for the base case: first active, other actives, then the rest."""
    head = active[0]
    rest = sorted(i for i in active[1:])
    tail = sorted(i for i in range(k) if i not in active)
    return [head] + rest + tail


def enumerate_nondominated(
    inst: MoipInstance,
    active: Sequence[int],
    obj_caps: Sequence,
    counter: SolveCounter,
    consumer: Optional[Consumer] = None,
    on_solve: Optional[SolveHook] = None,
) -> EnumerationOutcome:
    """Stream the nondominated vectors over the ``active`` objectives (0-based).

    Each distinct vector is handed to ``consumer(vector, point)`` as soon as
    it is found.  ``on_solve(result, is_new)`` sees every lexicographic
    solve, infeasible ones and repeats included.  Either callback may
    return :attr:`Signal.ABORT` to stop before any further IP is solved.
    """
    active = list(active)
    if not active:
        raise ValueError("at least one objective must be active")
    if len(set(active)) != len(active):
        raise ValueError(f"active objectives {tuple(active)} repeat an index")
    if any(not 0 <= i < inst.k for i in active):
        raise ValueError(f"active objectives {tuple(active)} outside 0..{inst.k - 1}")
    caps = list(obj_caps) if obj_caps else [POS_INF] * inst.k
    if len(caps) != inst.k:
        raise ValueError(f"{len(caps)} caps given, instance has {inst.k} objectives")

    order = lexicographic_order(active, inst.k)
    outcome = EnumerationOutcome(EnumStatus.COMPLETE)
    seen = set()
    start = counter.ip_solves

    def sweep(q, caps):
        if q == 1:
            res = solve_lexicographic(inst, order, caps, counter)
            vec = res.objectives
            is_new = res.optimal and vec not in seen
            if is_new:
                seen.add(vec)
                outcome.vectors.append(vec)
                outcome.points.append(res.solution)
            if on_solve is not None and on_solve(res, is_new) is Signal.ABORT:
                raise _Abort
            if is_new and consumer is not None and consumer(vec, res.solution) is Signal.ABORT:
                raise _Abort
            return [vec] if res.optimal else []
        pivot = active[q - 1]
        caps = list(caps)
        generated = []
        while True:
            found = sweep(q - 1, caps)
            if not found:
                return generated
            generated.extend(found)
            caps[pivot] = max(v[pivot] for v in found) - 1

    try:
        generated = sweep(len(active), caps)
        if not generated:
            outcome.status = EnumStatus.INFEASIBLE
    except _Abort:
        outcome.status = EnumStatus.ABORTED
    finally:
        outcome.ip_solves = counter.ip_solves - start
    return outcome


def enumerate_full_frontier(inst: MoipInstance, counter: SolveCounter) -> EnumerationOutcome:
    """Every nondominated vector of the uncapped ``k``-objective problem."""
    return enumerate_nondominated(inst, range(inst.k), (), counter)
