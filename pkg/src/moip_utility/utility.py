"""Utility expressions over objective values: parsing, evaluation, inversion.

Grammar, loosest binding first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '×') unary)*
    unary  := '-' unary | power
    power  := atom ('^' | '**') power        # exponent: positive integer constant
    atom   := NUMBER | 'f' INDEX | ('exp' | 'log') '(' expr ')' | '(' expr ')'

Expressions built only from ``+ - * ^`` and rational constants are
evaluated exactly (``int`` / ``Fraction``).  Anything using ``exp`` or
``log`` is evaluated with mpmath at 50 significant digits and compared
with a relative slack of ``1e-9``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import mpmath

from .model import NEG_INF, POS_INF, _Infinity, is_finite

COMPARISON_SLACK = mpmath.mpf("1e-9")
DEFAULT_BRACKET_CAP = 2**62

_ctx = mpmath.mp.clone()
_ctx.dps = 50


class UtilityParseError(ValueError):
    def __init__(self, message, pos=None):
        self.pos = pos
        where = "" if pos is None else f" at position {pos}"
        super().__init__(f"{message}{where}")


class UtilityDomainError(ValueError):
    pass


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str
    arg: object


_FUNCS = ("exp", "log")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*×^()]))"
)


def _tokenize(text):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise UtilityParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "op" and val == "**":
            val = "^"
        if kind == "op" and val == "×":
            val = "*"
        out.append((kind, val, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text, k):
        self.toks = _tokenize(text)
        self.i = 0
        self.k = k

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, val):
        kind, v, pos = self.take()
        if v != val:
            found = "end of input" if kind == "end" else repr(v)
            raise UtilityParseError(f"expected {val!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise UtilityParseError(f"unexpected {v!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] == "*":
            self.take()
            node = BinOp("*", node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        pos = self.take()[2]
        exp = self.power()
        value = _constant_value(exp)
        if value is None or value.denominator != 1 or value < 1:
            raise UtilityParseError("exponent must be a positive integer constant", pos)
        return Pow(base, int(value))

    def atom(self):
        kind, v, pos = self.take()
        if kind == "num":
            return Const(Fraction(v))
        if kind == "name":
            m = re.fullmatch(r"f(\d+)", v)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.k:
                    raise UtilityParseError(f"variable {v} outside f1..f{self.k}", pos)
                return Var(idx - 1)
            if v in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(v, arg)
            raise UtilityParseError(f"unknown identifier {v!r}", pos)
        if v == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(v)
        raise UtilityParseError(f"expected a value, found {found}", pos)


def _constant_value(node):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Pow):
        base = _constant_value(node.base)
        return None if base is None else base**node.exponent
    return None


def _is_polynomial(node) -> bool:
    if isinstance(node, (Const, Var)):
        return True
    if isinstance(node, Neg):
        return _is_polynomial(node.arg)
    if isinstance(node, BinOp):
        return _is_polynomial(node.left) and _is_polynomial(node.right)
    if isinstance(node, Pow):
        return _is_polynomial(node.base)
    return False


def _max_var(node) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Const):
        return -1
    if isinstance(node, (Neg, Call)):
        return _max_var(node.arg)
    if isinstance(node, BinOp):
        return max(_max_var(node.left), _max_var(node.right))
    if isinstance(node, Pow):
        return _max_var(node.base)
    raise TypeError(node)


def _eval_exact(node, f):
    if isinstance(node, Var):
        return f[node.index]
    if isinstance(node, Const):
        v = node.value
        return v.numerator if v.denominator == 1 else v
    if isinstance(node, BinOp):
        a = _eval_exact(node.left, f)
        b = _eval_exact(node.right, f)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        return a * b
    if isinstance(node, Pow):
        return _eval_exact(node.base, f) ** node.exponent
    if isinstance(node, Neg):
        return -_eval_exact(node.arg, f)
    raise TypeError(node)


def _eval_real(node, f):
    if isinstance(node, Var):
        return f[node.index]
    if isinstance(node, Const):
        return _ctx.mpf(node.value.numerator) / node.value.denominator
    if isinstance(node, BinOp):
        a = _eval_real(node.left, f)
        b = _eval_real(node.right, f)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        return a * b
    if isinstance(node, Pow):
        return _eval_real(node.base, f) ** node.exponent
    if isinstance(node, Neg):
        return -_eval_real(node.arg, f)
    if isinstance(node, Call):
        a = _eval_real(node.arg, f)
        if node.name == "exp":
            return _ctx.exp(a)
        if a <= 0:
            raise UtilityDomainError(f"log of nonpositive value {a}")
        return _ctx.log(a)
    raise TypeError(node)


@dataclass(frozen=True)
class UtilityExpr:
    """Parsed utility over ``k`` objective values, assumed strictly increasing."""

    ast: object
    k: int
    text: str = ""

    @property
    def polynomial(self) -> bool:
        return _is_polynomial(self.ast)

    def __call__(self, f):
        return evaluate(self, f)

    def __str__(self):
        return self.text


def parse_utility(text: str, k: int) -> UtilityExpr:
    if k < 1:
        raise ValueError("objective count must be at least 1")
    ast = _Parser(text, k).parse()
    return UtilityExpr(ast, k, text.strip())


def evaluate(expr: UtilityExpr, f: Sequence):
    """Evaluate ``G(f)``; infinite arguments propagate by monotonicity."""
    if len(f) != expr.k:
        raise ValueError(f"utility takes {expr.k} values, got {len(f)}")
    infs = {v.sign for v in f if isinstance(v, _Infinity)}
    if infs:
        if len(infs) > 1:
            raise UtilityDomainError("utility undefined with both +inf and -inf arguments")
        return POS_INF if infs.pop() > 0 else NEG_INF
    if expr.polynomial:
        return _eval_exact(expr.ast, f)
    return _eval_real(expr.ast, [_ctx.mpf(v) if isinstance(v, int) else _ctx.mpf(v.numerator) / v.denominator for v in f])


def utility_le(expr: UtilityExpr, a, b) -> bool:
    """``a <= b`` between utility values, exact for polynomial expressions."""
    if expr.polynomial or not (is_finite(a) and is_finite(b)):
        return a <= b
    return a <= b + COMPARISON_SLACK * max(1, abs(b))


def utility_lt(expr: UtilityExpr, a, b) -> bool:
    """Strict improvement test; non-polynomial values must beat ``b`` by the slack."""
    if expr.polynomial or not (is_finite(a) and is_finite(b)):
        return a < b
    return a < b - COMPARISON_SLACK * max(1, abs(b))


def invert_bound(expr: UtilityExpr, lb: Sequence, i: int, g_best, cap: int = DEFAULT_BRACKET_CAP):
    """Largest integer ``z`` with ``G(lb_1, .., z, .., lb_k) <= g_best`` (0-based ``i``).

    Brackets upward from ``lb[i]`` by doubling steps and then bisects on
    integers.  Returns ``POS_INF`` when the bracket passes ``cap`` without
    the utility exceeding ``g_best``.
    """
    if not is_finite(g_best):
        if g_best > 0:
            return POS_INF
        raise ValueError("no point has utility at most -inf")
    lo = lb[i]
    if not is_finite(lo):
        raise ValueError(f"lower bound of objective {i + 1} must be finite to invert")
    args = list(lb)

    def ok(z):
        args[i] = z
        return utility_le(expr, evaluate(expr, args), g_best)

    if not ok(lo):
        raise ValueError("utility at the lower bounds already exceeds the best value")
    step = 1
    hi = lo + step
    while ok(hi):
        lo = hi
        if hi >= cap:
            return POS_INF
        step *= 2
        hi = lo + step
    # invariant: ok(lo) and not ok(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


class Violation(NamedTuple):
    point: tuple
    coordinate: int  # 1-based
    before: object
    after: object


def check_monotone_sample(expr: UtilityExpr, box: Sequence[tuple], samples: int = 1000, seed: int = 0) -> list:
    """Look for counterexamples to strict increase by random +1 perturbations.

    ``box`` holds one inclusive ``(low, high)`` integer range per objective.
    An empty result means no counterexample was found, not a proof.
    """
    if len(box) != expr.k:
        raise ValueError(f"box needs {expr.k} ranges, got {len(box)}")
    rng = random.Random(seed)
    found = []
    seen = set()
    for _ in range(samples):
        p = [rng.randint(lo, hi) for lo, hi in box]
        try:
            g = evaluate(expr, p)
        except UtilityDomainError:
            continue
        for c in range(expr.k):
            q = list(p)
            q[c] += 1
            try:
                g2 = evaluate(expr, q)
            except UtilityDomainError:
                continue
            if not g2 > g and (tuple(p), c) not in seen:
                seen.add((tuple(p), c))
                found.append(Violation(tuple(p), c + 1, g, g2))
    return found
