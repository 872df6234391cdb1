"""SVDD, one-class SVM and ellipsoidal SVDD on precomputed Gram matrices."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, InfeasibleError, InputError, NumericError
from .kernels import LINEAR, KernelSpec, as_samples, check_psd, compute_gram, cross_kernel, self_kernel
from .qp import KKT_TOL, MAX_ITER, solve_capped_simplex_qp

log = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class DualSolution:
    alphas: np.ndarray
    objective: float
    support_idx: np.ndarray
    bound_idx: np.ndarray
    C: float
    kkt_gap: float = 0.0

    @property
    def free_idx(self):
        return np.setdiff1d(self.support_idx, self.bound_idx)


class Decision(NamedTuple):
    distance_sq: np.ndarray | float
    is_target: np.ndarray | bool


@dataclass(frozen=True)
class SphereModel:
    """Hypersphere ``|phi(z) - a|^2 <= R^2`` with ``a = sum_i alpha_i phi(x_i)``."""

    center_coeffs: np.ndarray
    radius_sq: float
    kernel: KernelSpec
    training_refs: np.ndarray
    center_norm_sq: float
    radius_fallback: bool = False

    @property
    def dim(self):
        return self.training_refs.shape[0]

    def distances(self, Z):
        Z = as_samples(Z, "Z")
        if Z.shape[0] != self.dim:
            raise InputError(f"expected {self.dim}-dimensional samples, got {Z.shape[0]}")
        sv = self.center_coeffs > 0
        K = cross_kernel(Z, self.training_refs[:, sv], self.kernel)
        d2 = self_kernel(Z, self.kernel) - 2.0 * (K @ self.center_coeffs[sv]) + self.center_norm_sq
        return np.maximum(d2, 0.0)

    def predict(self, Z):
        return self.distances(Z) <= self.radius_sq + BOUNDARY_TOL


def _support_sets(alphas, C):
    tol = 1e-6 * C
    support = np.flatnonzero(alphas > tol)
    bound = np.flatnonzero(alphas >= C - tol)
    return support, bound


def _dual_solution(alphas, objective, C, gap):
    support, bound = _support_sets(alphas, C)
    return DualSolution(alphas=alphas, objective=float(objective), support_idx=support,
                        bound_idx=bound, C=float(C), kkt_gap=float(gap))


def _check_gram(G, check):
    G = np.asarray(G, dtype=np.float64)
    if check:
        check_psd(G)
    elif G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InputError(f"Gram matrix must be square, got {G.shape}")
    return G


def solve_svdd_dual(G, C, *, init=None, tol=KKT_TOL, max_iter=MAX_ITER,
                    check=True, lipschitz=None):
    """Maximize ``sum_i a_i G_ii - a'Ga`` s.t. ``0 <= a_i <= C``, ``sum(a) = 1``.

    ``lipschitz`` may carry a known bound on ``2 * lambda_max(G)`` so the
    solver can skip its own eigenvalue computation; ``check=False`` skips the
    PSD validation for Gram matrices that are PSD by construction.
    """
    G = _check_gram(G, check)
    n = G.shape[0]
    if C * n < 1.0 - 1e-12:
        raise InfeasibleError(f"C={C} < 1/N={1.0 / n:.6g}: sum(alpha)=1 is infeasible")
    res = solve_capped_simplex_qp(2.0 * G, np.diag(G).copy(), C, init=init, tol=tol,
                                  max_iter=max_iter, lipschitz=lipschitz)
    a = res.alpha
    objective = a @ np.diag(G) - a @ G @ a
    return _dual_solution(a, objective, C, res.gap)


def sphere_from_dual(G, sol: DualSolution, X, kernel: KernelSpec = LINEAR):
    """Recover center coefficients and ``R^2`` from a dual solution.

    ``R^2`` is the mean squared distance of the unbounded support vectors.
    Without any, the smallest distance among bounded support vectors is used
    and ``radius_fallback`` is set.
    """
    G = np.asarray(G, dtype=np.float64)
    a = sol.alphas
    Ga = G @ a
    cnorm = float(a @ Ga)
    d2 = np.maximum(np.diag(G) - 2.0 * Ga + cnorm, 0.0)
    free = sol.free_idx
    fallback = free.size == 0
    if fallback:
        radius_sq = float(d2[sol.bound_idx].min()) if sol.bound_idx.size else 0.0
        log.debug("no unbounded support vector; R^2 taken from bounded SVs")
    else:
        radius_sq = float(d2[free].mean())
    return SphereModel(center_coeffs=a.copy(), radius_sq=max(radius_sq, 0.0), kernel=kernel,
                       training_refs=np.array(X, dtype=np.float64), center_norm_sq=cnorm,
                       radius_fallback=fallback)


def fit_svdd(X, C, kernel: KernelSpec = LINEAR):
    X = as_samples(X)
    G = compute_gram(X, kernel)
    return sphere_from_dual(G, solve_svdd_dual(G, C), X, kernel)


def decision(model, z):
    """Distance to the center and target membership for one sample or a batch.

    ``z`` may be a length-D vector or a ``(D, M)`` matrix.
    """
    z = np.asarray(z, dtype=np.float64)
    single = z.ndim == 1
    if single and z.shape[0] != model.dim:
        raise InputError(f"expected {model.dim}-dimensional sample, got {z.shape[0]}")
    d2 = model.distances(z[:, None] if single else z)
    inside = d2 <= model.radius_sq + BOUNDARY_TOL
    if single:
        return Decision(float(d2[0]), bool(inside[0]))
    return Decision(d2, inside)


@dataclass(frozen=True)
class OCSVMModel:
    """Hyperplane ``sum_i alpha_i k(z, x_i) = rho`` separating data from the origin."""

    alphas: np.ndarray
    rho: float
    kernel: KernelSpec
    training_refs: np.ndarray
    objective: float
    nu: float
    rho_fallback: bool = False

    @property
    def dim(self):
        return self.training_refs.shape[0]

    def scores(self, Z):
        Z = as_samples(Z, "Z")
        if Z.shape[0] != self.dim:
            raise InputError(f"expected {self.dim}-dimensional samples, got {Z.shape[0]}")
        sv = self.alphas > 0
        return cross_kernel(Z, self.training_refs[:, sv], self.kernel) @ self.alphas[sv]

    def predict(self, Z):
        return self.scores(Z) >= self.rho - BOUNDARY_TOL


def fit_ocsvm(G, nu, X, kernel: KernelSpec = LINEAR, *, check=True):
    """One-class SVM: minimize ``0.5 a'Ga`` s.t. ``0 <= a_i <= 1/(nu N)``, ``sum(a) = 1``."""
    G = _check_gram(G, check)
    n = G.shape[0]
    if not (0.0 < nu <= 1.0):
        raise ConfigError(f"nu must lie in (0, 1], got {nu}")
    if nu * n < 1.0 - 1e-12:
        raise InfeasibleError(f"nu*N = {nu * n:.6g} < 1")
    C = 1.0 / (nu * n)
    res = solve_capped_simplex_qp(G, np.zeros(n), C)
    a = res.alpha
    Ga = G @ a
    support, bound = _support_sets(a, C)
    free = np.setdiff1d(support, bound)
    fallback = free.size == 0
    rho = float(Ga[bound].max()) if fallback else float(Ga[free].mean())
    return OCSVMModel(alphas=a, rho=rho, kernel=kernel, training_refs=np.array(X, dtype=np.float64),
                      objective=float(0.5 * a @ Ga), nu=float(nu), rho_fallback=fallback)


@dataclass(frozen=True)
class ESVDDModel:
    """SVDD fitted in the space whitened by the target covariance."""

    whitener: np.ndarray
    sphere: SphereModel
    eps: float = 1e-6

    @property
    def dim(self):
        return self.whitener.shape[1]

    def transform(self, Z):
        Z = as_samples(Z, "Z")
        if Z.shape[0] != self.dim:
            raise InputError(f"expected {self.dim}-dimensional samples, got {Z.shape[0]}")
        return self.whitener @ Z

    def distances(self, Z):
        return self.sphere.distances(self.transform(Z))

    def predict(self, Z):
        return self.distances(Z) <= self.sphere.radius_sq + BOUNDARY_TOL


def whitening_matrix(X, eps=1e-6):
    """``(cov(X) + eps I)^(-1/2)`` via a symmetric eigendecomposition."""
    X = as_samples(X)
    if X.shape[1] < 2:
        raise InputError("whitening needs at least two samples")
    cov = np.atleast_2d(np.cov(X, ddof=1)) + eps * np.eye(X.shape[0])
    try:
        w, V = np.linalg.eigh(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"covariance eigendecomposition failed: {exc}") from exc
    if w.min() <= 0:
        raise NumericError("covariance plus ridge is not positive definite")
    return (V / np.sqrt(w)) @ V.T


def fit_esvdd(X, C, eps=1e-6):
    """Ellipsoidal SVDD realized as plain SVDD on whitened data."""
    X = as_samples(X)
    W = whitening_matrix(X, eps)
    Xw = W @ X
    sphere = fit_svdd(Xw, C, LINEAR)
    return ESVDDModel(whitener=W, sphere=sphere, eps=eps)


def fit_ocsvm_data(X, nu, kernel: KernelSpec = LINEAR):
    X = as_samples(X)
    return fit_ocsvm(compute_gram(X, kernel), nu, X, kernel)
