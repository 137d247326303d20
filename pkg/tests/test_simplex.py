import numpy as np
import pytest
from scipy.optimize import linprog

from macrobell.simplex import solve_lp


def _scipy_solve(c, A, b):
    return linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")


def test_simple_feasible_problem():
    # min x0 subject to x0 + x1 = 1
    res = solve_lp([1.0, 0.0], [[1.0, 1.0]], [1.0])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(0.0, abs=1e-12)
    assert res.x[1] == pytest.approx(1.0, abs=1e-12)


def test_infeasible_problem():
    # x0 + x1 = -1 has no nonnegative solution
    res = solve_lp([0.0, 0.0], [[1.0, 1.0]], [-1.0])
    assert res.status == "infeasible"
    assert res.phase1_objective > 1e-6


def test_redundant_rows_are_tolerated():
    A = [[1.0, 1.0], [2.0, 2.0]]
    res = solve_lp([1.0, 2.0], A, [1.0, 2.0])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.0, abs=1e-10)


def test_degenerate_vertex_does_not_cycle():
    # many constraints meeting at one point; Bland's rule must terminate
    A = [
        [1.0, 1.0, 1.0, 0.0],
        [1.0, 1.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
    b = [1.0, 1.0, 1.0]
    res = solve_lp([0.0, 1.0, 1.0, 1.0], A, b)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("seed", range(30))
def test_random_bounded_problems_match_scipy(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 8)), int(rng.integers(8, 20))
    A = rng.normal(size=(m, n))
    A = np.vstack([A, np.ones(n)])  # simplex constraint keeps it bounded
    x0 = rng.dirichlet(np.ones(n))
    b = A @ x0
    c = rng.normal(size=n)

    ours = solve_lp(c, A, b)
    ref = _scipy_solve(c, A, b)
    assert ref.status == 0
    assert ours.status == "optimal"
    assert ours.objective == pytest.approx(ref.fun, abs=1e-7)
    assert np.all(ours.x >= -1e-9)
    assert np.allclose(A @ ours.x, b, atol=1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_random_infeasible_problems_match_scipy(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(3, 10))
    A = np.abs(rng.normal(size=(2, n)))
    # second row forces a contradiction with the first
    b = np.array([1.0, -1.0])
    A_full = np.vstack([A[0], A[0]])
    res = solve_lp(np.zeros(n), A_full, b)
    ref = _scipy_solve(np.zeros(n), A_full, b)
    assert res.status == "infeasible"
    assert ref.status == 2
