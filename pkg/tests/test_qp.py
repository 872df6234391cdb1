import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ocdesc.errors import ConvergenceError, InfeasibleError
from ocdesc.qp import kkt_gap, project_capped_simplex, solve_capped_simplex_qp


def _projection_oracle(v, C):
    # bisection on the shift tau of clip(v - tau, 0, C)
    lo, hi = v.min() - C - 1, v.max() + 1
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.clip(v - mid, 0, C).sum() > 1:
            lo = mid
        else:
            hi = mid
    return np.clip(v - 0.5 * (lo + hi), 0, C)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=12), st.floats(0.05, 1.5))
def test_projection_matches_bisection(vals, C):
    v = np.array(vals)
    if C * v.size < 1:
        with pytest.raises(InfeasibleError):
            project_capped_simplex(v, C)
        return
    p = project_capped_simplex(v, C)
    assert p.min() >= 0 and p.max() <= C
    assert abs(p.sum() - 1) < 1e-9
    np.testing.assert_allclose(p, _projection_oracle(v, C), atol=1e-8)


def test_kkt_gap_zero_at_optimum():
    g = np.array([1.0, 1.0, 2.0])
    assert kkt_gap(np.array([0.5, 0.5, 0.0]), g, 1.0) == 0.0
    assert kkt_gap(np.array([0.0, 0.5, 0.5]), g, 1.0) == pytest.approx(1.0)


def test_infeasible_box():
    with pytest.raises(InfeasibleError):
        solve_capped_simplex_qp(np.eye(3), np.zeros(3), 0.2)


def test_convergence_error_carries_best(rng):
    A = rng.normal(size=(30, 30))
    H = A @ A.T
    with pytest.raises(ConvergenceError) as ei:
        solve_capped_simplex_qp(H, rng.normal(size=30), 0.1, max_iter=1, tol=1e-14)
    best = ei.value.best
    assert best is not None and abs(best.alpha.sum() - 1) < 1e-9


def test_warm_start_returns_same_solution(rng):
    A = rng.normal(size=(3, 40))
    H = 2 * A.T @ A
    f = np.diag(A.T @ A).copy()
    r1 = solve_capped_simplex_qp(H, f, 0.1)
    r2 = solve_capped_simplex_qp(H, f, 0.1, init=r1.alpha)
    np.testing.assert_array_equal(r1.alpha, r2.alpha)
    assert r2.iterations == 0
