import itertools
import random
from fractions import Fraction

import pytest

from moip_utility.cli import GeneratorSpec, generate_instance
from moip_utility.ip import (
    BudgetExhausted,
    IpProblem,
    IpStatus,
    SolveCounter,
    UnboundedIP,
    solve_ip,
    solve_lexicographic,
)
from moip_utility.lp import LpProblem, solve_lp
from moip_utility.model import MoipInstance, dominates

from oracles import box_points, nondominated_by_definition, permutation_vectors


@pytest.mark.parametrize("i, expected", [(0, 86), (1, 128), (2, 129)])
def test_single_objective_minima(table1_inst, i, expected):
    c = SolveCounter()
    res = solve_ip(IpProblem(table1_inst, i), c)
    assert res.status is IpStatus.OPTIMAL and res.value == expected
    assert c.ip_solves == 1
    assert table1_inst.is_feasible(res.solution)


def test_final_caps_are_infeasible(table1_inst):
    # f1 minimum under the terminal box is out of reach
    res = solve_ip(IpProblem(table1_inst, 0, (137, 200, 203)), SolveCounter())
    assert res.status is IpStatus.INFEASIBLE


@pytest.mark.parametrize(
    "priority, expected",
    [((0, 1, 2), (86, 214, 324)), ((1, 0, 2), (209, 128, 367)), ((2, 0, 1), (291, 348, 129))],
)
def test_lexicographic_step0_vectors(table1_inst, priority, expected):
    c = SolveCounter()
    res = solve_lexicographic(table1_inst, priority, (), c)
    assert res.objectives == expected
    assert res.value == expected[priority[0]]
    assert c.ip_solves == 1


def test_lexicographic_matches_brute_force_lex_order(table1_inst):
    vecs = [v for v, _ in permutation_vectors(table1_inst.C, 5)]
    for prio in itertools.permutations(range(3)):
        want = min(vecs, key=lambda v: tuple(v[i] for i in prio))
        assert solve_lexicographic(table1_inst, prio, (), SolveCounter()).objectives == want


def test_lexicographic_rejects_bad_priority(table1_inst):
    with pytest.raises(ValueError):
        solve_lexicographic(table1_inst, (), (), SolveCounter())
    with pytest.raises(ValueError):
        solve_lexicographic(table1_inst, (0, 0), (), SolveCounter())
    with pytest.raises(ValueError):
        solve_lexicographic(table1_inst, (3,), (), SolveCounter())


def test_lexicographic_infeasible_first_stage(table1_inst):
    c = SolveCounter()
    res = solve_lexicographic(table1_inst, (0, 1, 2), (137, 200, 203), c)
    assert res.status is IpStatus.INFEASIBLE and c.ip_solves == 1


def test_ip_not_below_lp_and_matches_enumeration():
    rng = random.Random(3)
    for _ in range(30):
        n = 4
        x0 = [rng.randint(0, 2) for _ in range(n)]
        A = [[rng.randint(1, 4) for _ in range(n)], [rng.randint(0, 3) for _ in range(n)]]
        b = [sum(a * x for a, x in zip(row, x0)) for row in A]
        C = [[rng.randint(-6, 6) for _ in range(n)]]
        inst = MoipInstance(A, b, C)
        res = solve_ip(IpProblem(inst, 0), SolveCounter())
        best = min(sum(c * x for c, x in zip(C[0], p)) for p in box_points(inst, max(b)))
        assert res.value == best
        assert res.value >= solve_lp(LpProblem.for_objective(inst, 0)).value


@pytest.mark.parametrize("seed", range(12))
def test_lexicographic_result_is_nondominated(seed):
    rng = random.Random(seed)
    s = rng.choice([3, 4])
    k = rng.choice([2, 3])
    inst, _ = generate_instance(GeneratorSpec(size=s, k=k, seed=seed))
    vecs = [v for v, _ in permutation_vectors(inst.C, s)]
    front = nondominated_by_definition(vecs)
    prio = tuple(rng.sample(range(k), k))
    res = solve_lexicographic(inst, prio, (), SolveCounter())
    assert res.objectives in front
    assert not any(dominates(v, res.objectives) for v in vecs)


def test_capped_lexicographic_against_brute_force():
    rng = random.Random(5)
    for seed in range(15):
        inst, _ = generate_instance(GeneratorSpec(size=4, k=3, seed=seed))
        vecs = [v for v, _ in permutation_vectors(inst.C, 4)]
        caps = tuple(rng.randint(min(v[i] for v in vecs), max(v[i] for v in vecs)) for i in range(3))
        inside = [v for v in vecs if all(a <= c for a, c in zip(v, caps))]
        res = solve_lexicographic(inst, (1, 2, 0), caps, SolveCounter())
        if not inside:
            assert res.status is IpStatus.INFEASIBLE
        else:
            assert res.objectives == min(inside, key=lambda v: (v[1], v[2], v[0]))


def test_determinism(table1_inst):
    a = solve_lexicographic(table1_inst, (0, 1, 2), (146, 204, 205), SolveCounter())
    b = solve_lexicographic(table1_inst, (0, 1, 2), (146, 204, 205), SolveCounter())
    assert a == b and a.nodes == b.nodes


def test_budget_checked_before_solve(table1_inst):
    c = SolveCounter(max_ip_solves=1)
    solve_ip(IpProblem(table1_inst, 0), c)
    with pytest.raises(BudgetExhausted):
        solve_ip(IpProblem(table1_inst, 0), c)
    assert c.ip_solves == 1
    with pytest.raises(ValueError):
        SolveCounter(max_ip_solves=0)


def test_unbounded_ip_is_reported():
    inst = MoipInstance(A=[[1, -1]], b=[0], C=[[-1, 0]])
    with pytest.raises(UnboundedIP):
        solve_ip(IpProblem(inst, 0), SolveCounter())


def test_explicit_rational_cost_vector():
    inst = MoipInstance([[1, 1]], [3], [[1, 2]])
    res = solve_ip(IpProblem(inst, (Fraction(1, 2), Fraction(-1, 3))), SolveCounter())
    assert res.solution == (0, 3) and res.value == -1
