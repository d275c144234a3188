import subprocess
import sys

import pytest

from moip_utility.cli import (
    EXIT_BUDGET,
    EXIT_ERROR,
    EXIT_INFEASIBLE,
    EXIT_OK,
    GeneratorSpec,
    InstanceParseError,
    assignment_constraints,
    bundled_instance_text,
    cmd_generate,
    format_instance,
    generate_instance,
    main,
    parse_instance,
    parse_instance_text,
)
from moip_utility.ip import SolveCounter, solve_lexicographic
from moip_utility.trace import read_trace_tsv


def test_bundled_fixture(table1):
    inst, expr = table1
    assert (inst.k, inst.n, inst.m) == (3, 25, 10)
    assert solve_lexicographic(inst, (0, 1, 2), (), SolveCounter()).objectives == (86, 214, 324)
    assert expr.text == "f1^3 + f2^3 + f3^3"


@pytest.mark.parametrize(
    "text, match",
    [
        ("", "empty"),
        ("# only a comment\n", "empty"),
        ("moop 1 1 0\n1\nutility: f1\n", "header"),
        ("moip 1 2 0\n1 x\nutility: f1\n", r"line 2, column 3"),
        ("moip 1 2 0\n1 2 3\nutility: f1\n", "objective row has 3"),
        ("moip 1 1 1\n1\n1\nutility: f1\n", "constraint row has 1"),
        ("moip 1 1 0\n1\n", "utility"),
        ("moip 1 1 0\n1\nutility: f2\n", r"line 3, column 10"),
        ("moip 1 1 0\nutility: f1\n1\n", "follow"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(InstanceParseError, match=match):
        parse_instance_text(text)


def test_missing_constraint_row_is_a_dimension_error():
    lines = bundled_instance_text().splitlines()
    lines = [ln for ln in lines if not ln.startswith("#")]
    lines[0] = "moip 3 25 11"
    with pytest.raises(InstanceParseError, match="expected 3 objective rows and 11 constraint rows"):
        parse_instance_text("\n".join(lines))


def test_comments_and_blank_lines():
    inst, expr = parse_instance_text("moip 1 2 1  # header\n\n3 4 # costs\n1 1 2\nutility: f1^2\n")
    assert inst.C == ((3, 4),) and inst.A == ((1, 1),) and inst.b == (2,)


def test_generate_is_deterministic(tmp_path):
    spec = GeneratorSpec(size=3, k=2, cost_low=1, cost_high=20, seed=42)
    a, b = tmp_path / "a.moip", tmp_path / "b.moip"
    assert cmd_generate(spec, a) == EXIT_OK and cmd_generate(spec, b) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert cmd_generate(GeneratorSpec(size=3, k=2, seed=43), b) == EXIT_OK
    assert a.read_bytes() != b.read_bytes()


def test_generated_5x5_matches_fixture_constraints(table1_inst):
    inst, _ = generate_instance(GeneratorSpec(size=5, k=3, seed=1))
    assert inst.A == table1_inst.A and inst.b == table1_inst.b
    assert inst.C != table1_inst.C
    A, b = assignment_constraints(5)
    assert tuple(map(tuple, A)) == table1_inst.A


@pytest.mark.parametrize(
    "spec",
    [GeneratorSpec(size=1), GeneratorSpec(cost_low=5, cost_high=4), GeneratorSpec(shape="cube"), GeneratorSpec(k=0)],
)
def test_bad_generator_specs(spec):
    with pytest.raises(ValueError):
        generate_instance(spec)


@pytest.mark.parametrize("seed", range(10))
def test_roundtrip_is_byte_identical(tmp_path, seed):
    shape = "general" if seed % 3 == 0 else "assignment"
    spec = GeneratorSpec(shape=shape, size=3 + seed % 2, k=2 + seed % 2, seed=seed, constraints=2)
    path = tmp_path / "x.moip"
    cmd_generate(spec, path)
    inst, expr = parse_instance(path)
    assert format_instance(inst, expr.text) == path.read_text()


def test_solve_example(capsys):
    assert main(["solve", "example"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "optimum: 15,809,256" in out and "objectives: (96, 186, 204)" in out and "IP solves: 8" in out


def test_solve_naive(capsys, tmp_path):
    path = tmp_path / "t1.moip"
    path.write_text(bundled_instance_text())
    assert main(["solve", str(path), "--naive", "--quiet"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "optimum: 15,809,256" in out and "IP solves: 56" in out


def test_solve_budget_prints_bounds(capsys, tmp_path):
    trace = tmp_path / "t.tsv"
    assert main(["solve", "example", "--max-ips", "3", "--trace", str(trace)]) == EXIT_BUDGET
    out = capsys.readouterr().out
    assert "utility lower bound: 5,081,147" in out and "utility upper bound: 44,448,624" in out
    rows = read_trace_tsv(trace.read_text())
    assert [r["G^LB"] for r in rows if r["step"] == "2"] == ["5081147"]


def test_solve_infeasible_and_errors(capsys, tmp_path):
    bad = tmp_path / "inf.moip"
    bad.write_text("moip 2 2 2\n1 2\n2 1\n1 1 1\n1 1 2\nutility: f1 + f2\n")
    assert main(["solve", str(bad)]) == EXIT_INFEASIBLE
    assert main(["solve", str(tmp_path / "missing.moip")]) == EXIT_ERROR
    empty = tmp_path / "empty.moip"
    empty.write_text("")
    assert main(["solve", str(empty)]) == EXIT_ERROR
    assert "empty instance file" in capsys.readouterr().err
    assert main(["solve", "example", "--max-ips", "0"]) == EXIT_ERROR


def test_utility_override(capsys):
    assert main(["solve", "example", "--utility", "f1 + f2 + f3", "--quiet"]) == EXIT_OK
    assert "optimum:" in capsys.readouterr().out


def test_generate_to_stdout(capsys):
    assert main(["generate", "--size", "3", "-k", "2", "--seed", "42"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("moip 2 9 6\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "moip_utility.cli", "solve", "example", "--quiet"], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK and "IP solves: 8" in proc.stdout


@pytest.mark.parametrize("seed", range(8))
def test_naive_and_default_agree_on_generated(tmp_path, capsys, seed):
    path = tmp_path / "g.moip"
    cmd_generate(GeneratorSpec(size=3 + seed % 2, k=2 + seed % 2, seed=seed, utility="f1^3 + f2^3" if seed % 2 == 0 else None), path)
    main(["solve", str(path), "--quiet"])
    a = capsys.readouterr().out.splitlines()[1]
    main(["solve", str(path), "--naive", "--quiet"])
    b = capsys.readouterr().out.splitlines()[1]
    assert a == b and a.startswith("optimum:")
