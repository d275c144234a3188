"""Instances, objective vectors, dominance and the solver's bound state.

Points and objective vectors are plain tuples of ints, so equality and
hashing come for free and nondominated sets can be deduplicated with
ordinary sets.  Extended integers are ints plus the two sentinels
``NEG_INF`` and ``POS_INF`` defined here.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

Point = Tuple[int, ...]
ObjectiveVector = Tuple[int, ...]


@functools.total_ordering
class _Infinity:
    """Signed infinity that orders against ints, Fractions and mpmath reals."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __le__(self, other):
        return self == other or self < other

    def __ge__(self, other):
        return self == other or self > other

    def __neg__(self):
        return NEG_INF if self.sign > 0 else POS_INF

    def __hash__(self):
        return hash(("inf", self.sign))

    def __repr__(self):
        return "POS_INF" if self.sign > 0 else "NEG_INF"

    def __str__(self):
        return "inf" if self.sign > 0 else "-inf"

    def __reduce__(self):
        return (_infinity, (self.sign,))


def _infinity(sign):
    return POS_INF if sign > 0 else NEG_INF


POS_INF = _Infinity(1)
NEG_INF = _Infinity(-1)

ExtInt = Union[int, _Infinity]


def is_finite(v) -> bool:
    return not isinstance(v, _Infinity)


def _check_int(v, what):
    # bool is an int subclass but never a sensible coefficient
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError(f"{what} must be an integer, got {v!r}")


@dataclass(frozen=True)
class MoipInstance:
    """Feasible set ``{x >= 0 integer : A x = b}`` with ``k`` integer objective rows."""

    A: Tuple[Tuple[int, ...], ...]
    b: Tuple[int, ...]
    C: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        A = tuple(tuple(r) for r in self.A)
        b = tuple(self.b)
        C = tuple(tuple(r) for r in self.C)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "C", C)
        if not C:
            raise ValueError("an instance needs at least one objective row")
        n = len(C[0])
        if n < 1:
            raise ValueError("an instance needs at least one variable")
        for i, row in enumerate(C):
            if len(row) != n:
                raise ValueError(f"objective row {i + 1} has {len(row)} entries, expected {n}")
            for v in row:
                _check_int(v, "objective coefficient")
        if len(A) != len(b):
            raise ValueError(f"{len(A)} constraint rows but {len(b)} right-hand sides")
        for i, row in enumerate(A):
            if len(row) != n:
                raise ValueError(f"constraint row {i + 1} has {len(row)} entries, expected {n}")
            for v in row:
                _check_int(v, "constraint coefficient")
        for v in b:
            _check_int(v, "right-hand side")

    @property
    def n(self) -> int:
        return len(self.C[0])

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def k(self) -> int:
        return len(self.C)

    def is_feasible(self, p: Sequence[int]) -> bool:
        if len(p) != self.n or any(v < 0 for v in p):
            return False
        return all(sum(a * x for a, x in zip(row, p)) == rhs for row, rhs in zip(self.A, self.b))


def evaluate_objectives(inst: MoipInstance, p: Sequence[int]) -> ObjectiveVector:
    """Return ``C x`` computed in exact integer arithmetic."""
    if len(p) != inst.n:
        raise ValueError(f"point has {len(p)} components, instance has {inst.n} variables")
    return tuple(sum(c * x for c, x in zip(row, p)) for row in inst.C)


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    if len(a) != len(b):
        raise ValueError(f"cannot compare vectors of length {len(a)} and {len(b)}")
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def filter_nondominated(vectors: Iterable[Sequence[int]]) -> list:
    """Drop duplicates and dominated vectors; result is sorted lexicographically."""
    # after a lexicographic sort, a vector can only be dominated by an earlier one
    kept: list = []
    for v in sorted(set(tuple(v) for v in vectors)):
        if not any(dominates(u, v) for u in kept):
            kept.append(v)
    return kept


@dataclass
class BoundsState:
    """Mutable per-objective box plus the incumbent, owned by the driver."""

    lb: list
    ub: list
    g_best: object = POS_INF
    incumbent: Optional[Point] = None
    incumbent_f: Optional[ObjectiveVector] = None

    @classmethod
    def fresh(cls, k: int) -> "BoundsState":
        return cls(lb=[NEG_INF] * k, ub=[POS_INF] * k)

    @property
    def k(self) -> int:
        return len(self.lb)

    def raise_lb(self, i: int, value) -> bool:
        if value > self.lb[i]:
            self.lb[i] = value
            return True
        return False

    def lower_ub(self, i: int, value) -> bool:
        if value < self.ub[i]:
            self.ub[i] = value
            return True
        return False

    def offer(self, g, point: Point, f: ObjectiveVector) -> bool:
        """Replace the incumbent if ``g`` is strictly better."""
        if g < self.g_best:
            self.g_best = g
            self.incumbent = tuple(point)
            self.incumbent_f = tuple(f)
            return True
        return False

    def region_empty(self) -> bool:
        return any(l > u for l, u in zip(self.lb, self.ub))
