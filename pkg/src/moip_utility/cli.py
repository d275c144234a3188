"""Command line: solve instance files and generate random ones.

Instance files are line oriented::

    # comments run from '#' to end of line
    moip <k> <n> <m>
    <k objective rows of n integers>
    <m constraint rows: n integers, then the right-hand side>
    utility: <expression over f1..fk>

Constraint rows are equalities; variables are nonnegative integers.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence, Tuple

from .driver import RunConfig, RunStatus, run, run_naive
from .model import MoipInstance
from .trace import write_trace_tsv
from .utility import UtilityExpr, UtilityParseError, parse_utility

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET = 3
EXIT_INFEASIBLE = 4

log = logging.getLogger("moip_utility")


class InstanceParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


def _int_tokens(text, lineno):
    out = []
    col = 0
    for tok in text.split():
        col = text.index(tok, col) + 1
        try:
            out.append(int(tok))
        except ValueError:
            raise InstanceParseError(f"expected an integer, found {tok!r}", lineno, col) from None
        col += len(tok) - 1
    return out


def parse_instance_text(text: str) -> Tuple[MoipInstance, UtilityExpr]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            lines.append((lineno, body))
    if not lines:
        raise InstanceParseError("empty instance file")

    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "moip":
        raise InstanceParseError("header must read 'moip <k> <n> <m>'", lineno, 1)
    k, n, m = _int_tokens(" ".join(parts[1:]), lineno)
    if k < 1 or n < 1 or m < 0:
        raise InstanceParseError("need k >= 1, n >= 1 and m >= 0", lineno)

    body = lines[1:]
    matrix_lines = [(ln, t) for ln, t in body if not t.lstrip().startswith("utility:")]
    util_lines = [(ln, t) for ln, t in body if t.lstrip().startswith("utility:")]
    if len(matrix_lines) != k + m:
        raise InstanceParseError(
            f"expected {k} objective rows and {m} constraint rows, found {len(matrix_lines)} rows"
        )
    if len(util_lines) != 1:
        raise InstanceParseError("expected exactly one 'utility:' line")
    if util_lines[0][0] < matrix_lines[-1][0]:
        raise InstanceParseError("the utility line must follow the matrix rows", util_lines[0][0])

    C = []
    for ln, t in matrix_lines[:k]:
        row = _int_tokens(t, ln)
        if len(row) != n:
            raise InstanceParseError(f"objective row has {len(row)} entries, expected {n}", ln)
        C.append(row)
    A, b = [], []
    for ln, t in matrix_lines[k:]:
        row = _int_tokens(t, ln)
        if len(row) != n + 1:
            raise InstanceParseError(f"constraint row has {len(row)} entries, expected {n + 1}", ln)
        A.append(row[:-1])
        b.append(row[-1])

    ln, t = util_lines[0]
    expr_text = t.split("utility:", 1)[1]
    try:
        expr = parse_utility(expr_text, k)
    except UtilityParseError as exc:
        col = None if exc.pos is None else t.index("utility:") + len("utility:") + exc.pos + 1
        raise InstanceParseError(str(exc), ln, col) from None
    return MoipInstance(A, b, C), expr


def parse_instance(path) -> Tuple[MoipInstance, UtilityExpr]:
    with open(path, encoding="utf-8") as fh:
        return parse_instance_text(fh.read())


def format_instance(inst: MoipInstance, utility: str) -> str:
    """Canonical text form; parsing it back and re-formatting is byte-identical."""
    out = [f"moip {inst.k} {inst.n} {inst.m}"]
    out += [" ".join(map(str, row)) for row in inst.C]
    out += [" ".join(map(str, row)) + f" {rhs}" for row, rhs in zip(inst.A, inst.b)]
    out.append(f"utility: {utility.strip()}")
    return "\n".join(out) + "\n"


def bundled_instance_text() -> str:
    return resources.files("moip_utility").joinpath("data/table1.moip").read_text(encoding="utf-8")


def load_bundled_instance() -> Tuple[MoipInstance, UtilityExpr]:
    """The 5x5 tri-objective assignment example with a sum-of-cubes utility."""
    return parse_instance_text(bundled_instance_text())


# --- generation -------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSpec:
    shape: str = "assignment"  # "assignment" or "general"
    size: int = 3
    k: int = 2
    cost_low: int = 1
    cost_high: int = 20
    seed: int = 0
    utility: Optional[str] = None
    constraints: int = 2  # general shape only

    def validate(self):
        if self.shape not in ("assignment", "general"):
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.size < 2:
            raise ValueError("size must be at least 2")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.cost_low > self.cost_high:
            raise ValueError("cost range is empty")
        if not -(2**63) <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.shape == "general" and self.constraints < 1:
            raise ValueError("general instances need at least one constraint")


def assignment_constraints(s: int):
    """Row and column equality system of an ``s x s`` assignment; ``x_ij`` sits at ``s*i + j``."""
    n = s * s
    A, b = [], []
    for i in range(s):
        A.append([1 if v // s == i else 0 for v in range(n)])
        b.append(1)
    for j in range(s):
        A.append([1 if v % s == j else 0 for v in range(n)])
        b.append(1)
    return A, b


def generate_instance(spec: GeneratorSpec) -> Tuple[MoipInstance, str]:
    spec.validate()
    rng = random.Random(spec.seed)
    if spec.shape == "assignment":
        n = spec.size * spec.size
        A, b = assignment_constraints(spec.size)
    else:
        # a strictly positive first row keeps the feasible set bounded
        n = spec.size
        x0 = [rng.randint(0, 2) for _ in range(n)]
        A = [[rng.randint(1, 5) for _ in range(n)]]
        A += [[rng.randint(0, 5) for _ in range(n)] for _ in range(spec.constraints - 1)]
        b = [sum(a * x for a, x in zip(row, x0)) for row in A]
    C = [[rng.randint(spec.cost_low, spec.cost_high) for _ in range(n)] for _ in range(spec.k)]
    utility = spec.utility or " + ".join(f"f{i}^2" for i in range(1, spec.k + 1))
    parse_utility(utility, spec.k)
    return MoipInstance(A, b, C), utility


def cmd_generate(spec: GeneratorSpec, out_path) -> int:
    inst, utility = generate_instance(spec)
    text = format_instance(inst, utility)
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


# --- solving ----------------------------------------------------------------


def _fmt(v) -> str:
    return f"{v:,}" if isinstance(v, int) else str(v)


def cmd_solve(args) -> int:
    if args.instance == "example":
        inst, expr = load_bundled_instance()
    else:
        inst, expr = parse_instance(args.instance)
    if args.utility:
        expr = parse_utility(args.utility, inst.k)
    cfg = RunConfig(max_ip_solves=args.max_ips, time_budget=args.time_limit)
    result = (run_naive if args.naive else run)(inst, expr, cfg)

    if args.trace:
        if args.naive:
            log.warning("the naive baseline records no trace; %s not written", args.trace)
        else:
            with open(args.trace, "w", encoding="utf-8") as fh:
                write_trace_tsv(result.trace, inst.k, fh)

    out = sys.stdout
    if result.status is RunStatus.INFEASIBLE:
        print("status: infeasible", file=out)
        return EXIT_INFEASIBLE
    print(f"status: {result.status.value}", file=out)
    print(f"optimum: {_fmt(result.g_best)}" if result.optimal else f"best utility: {_fmt(result.g_best)}", file=out)
    if result.incumbent_f is not None:
        print(f"objectives: ({', '.join(map(str, result.incumbent_f))})", file=out)
    print(f"IP solves: {result.ip_solves}", file=out)
    if not args.quiet:
        if result.incumbent is not None:
            print(f"point: {' '.join(map(str, result.incumbent))}", file=out)
        if args.naive and result.frontier is not None:
            print(f"nondominated vectors: {len(result.frontier)}", file=out)
    if not result.optimal:
        print(f"utility lower bound: {_fmt(result.g_lower_bound)}", file=out)
        print(f"utility upper bound: {_fmt(result.g_best)}", file=out)
        return EXIT_BUDGET
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moip-utility", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="minimise the utility over the efficient set")
    s.add_argument("instance", help="instance file, or 'example' for the bundled 5x5 instance")
    s.add_argument("--naive", action="store_true", help="enumerate the full frontier instead")
    s.add_argument("--max-ips", type=int, metavar="N")
    s.add_argument("--time-limit", type=float, metavar="S")
    s.add_argument("--trace", metavar="OUT.tsv")
    s.add_argument("--utility", metavar="EXPR", help="override the file's utility")
    s.add_argument("--quiet", action="store_true")

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--shape", choices=("assignment", "general"), default="assignment")
    g.add_argument("--size", type=int, default=3)
    g.add_argument("-k", type=int, default=2)
    g.add_argument("--costs", type=int, nargs=2, default=(1, 20), metavar=("LOW", "HIGH"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--constraints", type=int, default=2)
    g.add_argument("--utility", metavar="EXPR")
    g.add_argument("-o", "--output", default="-")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "solve":
            return cmd_solve(args)
        spec = GeneratorSpec(
            shape=args.shape,
            size=args.size,
            k=args.k,
            cost_low=args.costs[0],
            cost_high=args.costs[1],
            seed=args.seed,
            utility=args.utility,
            constraints=args.constraints,
        )
        return cmd_generate(spec, args.output)
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
