import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import inverse_sqrt_spd, ocsvm_oracle, svdd_dual_oracle
from ocdesc.errors import InfeasibleError, InputError
from ocdesc.kernels import KernelSpec, compute_gram
from ocdesc.svdd import (decision, fit_esvdd, fit_ocsvm, fit_ocsvm_data, fit_svdd, solve_svdd_dual,
                         sphere_from_dual, whitening_matrix)

LINE = np.array([[0.0, 1.0, 2.0, 10.0]])


def _dist2_all(model, X):
    return model.distances(X)


def test_single_point():
    X = np.array([[2.0], [3.0]])
    m = fit_svdd(X, 1.0)
    np.testing.assert_array_equal(m.center_coeffs, [1.0])
    assert m.radius_sq == 0.0
    d = decision(m, X[:, 0])
    assert d.distance_sq == 0.0 and d.is_target


def test_two_symmetric_points():
    X = np.array([[-1.0, 1.0]])
    sol = solve_svdd_dual(X.T @ X, 1.0)
    np.testing.assert_allclose(sol.alphas, [0.5, 0.5], atol=1e-12)
    m = sphere_from_dual(X.T @ X, sol, X)
    assert m.radius_sq == pytest.approx(1.0, abs=1e-12)
    d = decision(m, np.array([3.0]))
    assert d.distance_sq == pytest.approx(9.0) and not d.is_target


def test_line_instance_matches_oracle():
    G = LINE.T @ LINE
    sol = solve_svdd_dual(G, 0.5)
    a_star, v_star = svdd_dual_oracle(G, 0.5)
    assert sol.objective == pytest.approx(v_star, abs=1e-4)
    m = sphere_from_dual(G, sol, LINE)
    # oracle boundary: squared distance of the extreme points to the oracle center
    c = LINE @ a_star
    r2_oracle = float(((LINE[:, [0]] - c) ** 2).sum())
    assert m.radius_sq == pytest.approx(r2_oracle, abs=1e-4)


def test_dual_invariants(rng):
    X = rng.normal(size=(3, 25))
    G = X.T @ X
    sol = solve_svdd_dual(G, 0.1)
    a = sol.alphas
    assert a.min() >= 0 and a.max() <= 0.1
    assert abs(a.sum() - 1) <= 1e-8
    assert set(sol.bound_idx) <= set(sol.support_idx)
    assert sol.kkt_gap <= 1e-6 * max(1, 2 * np.diag(G).max())


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(1, 4), st.floats(0.0, 1.0), st.integers(0, 10**6))
def test_kkt_complementarity(n, dim, cfrac, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(dim, n)) * rng.uniform(0.1, 3)
    C = 1.0 / n + cfrac * (1.0 - 1.0 / n)
    G = X.T @ X
    sol = solve_svdd_dual(G, C)
    m = sphere_from_dual(G, sol, X)
    d2 = m.distances(X)
    a = sol.alphas
    tol = 1e-6 * max(1.0, np.diag(G).max())
    free = (a > 1e-6 * C) & (a < C - 1e-6 * C)
    assert np.all(d2[a == 0] <= m.radius_sq + tol)
    if not m.radius_fallback:
        assert np.all(np.abs(d2[free] - m.radius_sq) <= tol)
    assert np.all(d2[a >= C - 1e-6 * C] >= m.radius_sq - tol)


def test_unbounded_sv_on_boundary(rng):
    X = rng.normal(size=(2, 30))
    m = fit_svdd(X, 0.2)
    G = X.T @ X
    sol = solve_svdd_dual(G, 0.2)
    for s in sol.free_idx:
        d = decision(m, X[:, s])
        assert abs(d.distance_sq - m.radius_sq) <= 1e-6 and d.is_target


def test_all_bound_fallback():
    X = np.array([[0.0, 1.0, 5.0, 6.0]])
    G = X.T @ X
    sol = solve_svdd_dual(G, 0.25)
    m = sphere_from_dual(G, sol, X)
    assert m.radius_fallback
    assert m.radius_sq == pytest.approx(m.distances(X).min())


def test_infeasible_C():
    with pytest.raises(InfeasibleError):
        solve_svdd_dual(np.eye(4), 0.2)


def test_dimension_mismatch():
    m = fit_svdd(np.array([[0.0, 1.0], [1.0, 0.0]]), 1.0)
    with pytest.raises(InputError):
        decision(m, np.zeros(3))


def test_shift_invariance(rng):
    X = rng.normal(size=(2, 20))
    Z = rng.normal(size=(2, 15)) * 2
    shift = np.array([[50.0], [-30.0]])
    m1 = fit_svdd(X, 0.15)
    m2 = fit_svdd(X + shift, 0.15)
    np.testing.assert_allclose(m1.distances(Z), m2.distances(Z + shift), atol=1e-8)
    np.testing.assert_array_equal(m1.predict(Z), m2.predict(Z + shift))


def test_duplicate_point_invariance(rng):
    X = rng.normal(size=(2, 12))
    Z = rng.normal(size=(2, 40)) * 2
    m1 = fit_svdd(X, 1.0)
    m2 = fit_svdd(np.hstack([X, X[:, [3]]]), 1.0)
    np.testing.assert_allclose(m1.distances(Z), m2.distances(Z), atol=1e-6)
    assert m1.radius_sq == pytest.approx(m2.radius_sq, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_ocsvm_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    X = rng.normal(size=(2, n)) + 1.5
    nu = rng.uniform(1.0 / n, 1.0)
    m = fit_ocsvm(X.T @ X, nu, X)
    _, v = ocsvm_oracle(X.T @ X, nu)
    assert m.objective == pytest.approx(v, abs=1e-4)


def test_ocsvm_line_instance():
    G = LINE.T @ LINE
    m = fit_ocsvm(G, 0.5, LINE)
    _, v = ocsvm_oracle(G, 0.5)
    assert m.objective == pytest.approx(v, abs=1e-4)


def test_ocsvm_single_point():
    x = np.array([[1.0], [2.0]])
    m = fit_ocsvm_data(x, 1.0)
    np.testing.assert_array_equal(m.alphas, [1.0])
    Z = np.array([[1.0, 2.0, 0.0], [2.0, 2.0, 0.0]])
    np.testing.assert_array_equal(m.predict(Z), (x.T @ Z)[0] >= 5.0 - 1e-9)


def test_ocsvm_duplicates():
    x = np.array([[1.0], [2.0]])
    Z = np.random.default_rng(0).normal(size=(2, 50)) * 3
    m1 = fit_ocsvm_data(x, 1.0)
    m2 = fit_ocsvm_data(np.hstack([x, x]), 1.0)
    np.testing.assert_allclose(m1.scores(Z), m2.scores(Z), atol=1e-12)
    np.testing.assert_array_equal(m1.predict(Z), m2.predict(Z))


def test_ocsvm_gaussian(rng):
    X = rng.normal(size=(2, 40))
    spec = KernelSpec("gaussian", 1.0)
    m = fit_ocsvm_data(X, 0.2, spec)
    far = np.array([[20.0], [20.0]])
    assert not m.predict(far)[0]
    assert m.predict(X).mean() >= 0.7


def test_esvdd_isotropic_equals_svdd():
    # columns with identity sample covariance: a scaled orthogonal design
    X = np.vstack([np.r_[np.ones(4), -np.ones(4)], np.r_[1, -1, 1, -1, 1, -1, 1, -1]]).astype(float)
    X = X * np.sqrt(7 / 8)
    assert np.allclose(np.cov(X), np.eye(2))
    Z = np.random.default_rng(3).normal(size=(2, 30)) * 2
    e = fit_esvdd(X, 0.5)
    s = fit_svdd(X, 0.5)
    np.testing.assert_array_equal(e.predict(Z), s.predict(Z))
    # only the 1e-6 whitening ridge separates them
    np.testing.assert_allclose(e.distances(Z), s.distances(Z), rtol=2e-6)


def test_esvdd_whitened_variances(rng):
    X = rng.normal(size=(3, 50))
    X[1] *= 10
    W = whitening_matrix(X)
    v = np.var(W @ X, axis=1, ddof=1)
    np.testing.assert_allclose(v, v[0], atol=1e-6)


def test_esvdd_whitened_gram_oracle():
    X = np.array([[0.0, 2.0, 1.0, 3.0], [0.0, 0.5, 1.5, 1.0]])
    eps = 1e-6
    S = np.cov(X) + eps * np.eye(2)
    W = inverse_sqrt_spd(S)
    e = fit_esvdd(X, 0.5, eps)
    Xw = e.whitener @ X
    np.testing.assert_allclose(Xw.T @ Xw, (W @ X).T @ (W @ X), atol=1e-8)


def test_esvdd_needs_two_samples():
    with pytest.raises(InputError):
        fit_esvdd(np.array([[1.0], [2.0]]), 1.0)
