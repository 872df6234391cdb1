"""Subspace SVDD: alternating dual solves and projection-matrix updates.

The projection ``Q`` (``d x D``, orthonormal rows) is refined by gradient or
ridge-regularized Newton steps on the Lagrangian::

    L(Q) = sum_i a_i |Q x_i|^2 - |Q X a|^2 + b * Tr(Q X l l' X' Q')

where ``a`` are the SVDD multipliers of the current projection, ``l`` is the
regularizer selection vector and ``b`` is ``+beta`` (min) or ``-beta`` (max).
Writing ``L = Tr(Q M Q')`` gives the gradient ``2 Q M``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .errors import ConfigError, ConvergenceError, InfeasibleError, InputError, NumericError
from .kernels import LINEAR, as_samples
from .qp import KKT_TOL, MAX_ITER, _solve as _qp_solve, project_capped_simplex
from .svdd import BOUNDARY_TOL, Decision, SphereModel, _dual_solution, sphere_from_dual

PSI_VARIANTS = ("psi1", "psi2", "psi3", "psi4")
ORTH_TOL = 1e-8


@dataclass(frozen=True)
class SubspaceConfig:
    d: int
    C: float
    beta: float = 0.0
    variant: str = "psi1"
    direction: str = "min"
    optimizer: str = "gradient"
    eta: float = 0.1
    iters: int = 10
    newton_ridge: float = 1e-6

    def __post_init__(self):
        if self.variant not in PSI_VARIANTS:
            raise ConfigError(f"unknown regularizer variant {self.variant!r}")
        if self.direction not in ("min", "max"):
            raise ConfigError(f"direction must be 'min' or 'max', got {self.direction!r}")
        if self.optimizer not in ("gradient", "newton"):
            raise ConfigError(f"optimizer must be 'gradient' or 'newton', got {self.optimizer!r}")
        if int(self.d) != self.d or self.d < 1:
            raise ConfigError(f"d must be a positive integer, got {self.d}")
        if not self.eta > 0:
            raise ConfigError("eta must be positive")
        if int(self.iters) != self.iters or self.iters < 1:
            raise ConfigError("iters must be a positive integer")
        if self.beta < 0:
            raise ConfigError("beta must be nonnegative")
        if self.C <= 0:
            raise ConfigError("C must be positive")

    @property
    def beta_signed(self):
        return self.beta if self.direction == "min" else -self.beta


@dataclass(frozen=True)
class SubspaceModel:
    Q: np.ndarray
    sphere: SphereModel
    config: SubspaceConfig
    training_loss_trace: np.ndarray
    orthonormality_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def project(self, Z):
        Z = as_samples(Z, "Z")
        if Z.shape[0] != self.Q.shape[1]:
            raise InputError(f"expected {self.Q.shape[1]}-dimensional samples, got {Z.shape[0]}")
        return self.Q @ Z

    def distances(self, Z):
        return self.sphere.distances(self.project(Z))

    def predict(self, Z):
        return self.distances(Z) <= self.sphere.radius_sq + BOUNDARY_TOL


def build_lambda(variant, alphas, C):
    """Per-sample weights selecting who contributes to the variance term."""
    alphas = np.asarray(alphas, dtype=np.float64)
    tol = 1e-6 * C
    if variant == "psi1":
        return np.zeros_like(alphas)
    if variant == "psi2":
        return np.ones_like(alphas)
    if variant == "psi3":
        return np.where(alphas > tol, alphas, 0.0)
    if variant == "psi4":
        return np.where((alphas > tol) & (alphas < C - tol), alphas, 0.0)
    raise ConfigError(f"unknown regularizer variant {variant!r}")


def psi_value(Q, X, lam):
    """``Tr(Q X l l' X' Q')``."""
    v = Q @ (X @ lam)
    return float(v @ v)


def lagrangian_value(Q, X, alphas, lam, beta_signed):
    Z = Q @ X
    sq = (Z * Z).sum(0)
    c = Z @ alphas
    return float(alphas @ sq - c @ c + beta_signed * psi_value(Q, X, lam))


def scatter_matrix(X, alphas, lam, beta_signed):
    """``M = X diag(a) X' - X a a' X' + b X l l' X'`` (so that ``L = Tr(Q M Q')``)."""
    sv = alphas > 0
    Xs = X[:, sv]
    c = Xs @ alphas[sv]
    M = (Xs * alphas[sv]) @ Xs.T - np.outer(c, c)
    if beta_signed != 0.0 and np.any(lam):
        u = X @ lam
        M += beta_signed * np.outer(u, u)
    return M


def gradient_L(Q, X, alphas, lam, beta_signed):
    return 2.0 * Q @ scatter_matrix(X, alphas, lam, beta_signed)


def newton_step(Q, gradient, M, newton_ridge=1e-6, eta=0.1):
    """``Q - eta * gradient (2M + ridge I)^-1`` (before re-orthonormalization)."""
    D = M.shape[0]
    A = 2.0 * M + newton_ridge * np.eye(D)
    try:
        Y = np.linalg.solve(A, gradient.T)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Newton system is singular: {exc}") from exc
    if not np.all(np.isfinite(Y)) or np.abs(A @ Y - gradient.T).max() > 1e-8 * max(1.0, np.abs(gradient).max()):
        raise NumericError("Newton system is numerically singular")
    return Q - eta * Y.T


def orthonormalize(Q):
    """Orthonormal rows spanning the row space of ``Q`` (QR, positive diagonal)."""
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[0] > Q.shape[1]:
        raise InputError(f"projection must be d x D with d <= D, got {Q.shape}")
    U, R = np.linalg.qr(Q.T)
    diag = np.diag(R)
    if not np.all(np.isfinite(diag)) or np.abs(diag).min() <= 1e-10 * max(np.abs(diag).max(), 1e-300):
        raise NumericError("projection matrix is rank deficient")
    return (U * np.sign(diag)).T


def principal_directions(X):
    """All principal directions of the centered columns of ``X`` as rows, by
    decreasing variance; each row's largest-magnitude entry is positive."""
    Xc = X - X.mean(1, keepdims=True)
    U, _, _ = np.linalg.svd(Xc, full_matrices=True)
    idx = np.abs(U).argmax(0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return (U * signs).T


def initial_projection(X, d):
    return principal_directions(X)[:d].copy()


def orthonormality_error(Q):
    return float(np.abs(Q @ Q.T - np.eye(Q.shape[0])).max())


_VARIANT_CODE = {"psi1": 1, "psi2": 2, "psi3": 3, "psi4": 4}
_OK, _QP_FAIL, _NEWTON_SINGULAR, _RANK_DEFICIENT, _ORTH_LOST, _NONFINITE = range(6)


@njit(cache=True, nogil=True)
def _lambda_c(variant, a, C):
    tol = 1e-6 * C
    lam = np.zeros(a.size)
    for i in range(a.size):
        if variant == 2:
            lam[i] = 1.0
        elif variant == 3 and a[i] > tol:
            lam[i] = a[i]
        elif variant == 4 and a[i] > tol and a[i] < C - tol:
            lam[i] = a[i]
    return lam


@njit(cache=True, nogil=True)
def _scatter_c(X, a, lam, b):
    D, N = X.shape
    c = X @ a
    M = -np.outer(c, c)
    for i in range(N):
        if a[i] > 0.0:
            x = X[:, i]
            M += a[i] * np.outer(x, x)
    if b != 0.0:
        u = X @ lam
        if np.any(lam != 0.0):
            M += b * np.outer(u, u)
    return M


@njit(cache=True, nogil=True)
def _dual_c(Q, X, C, a, warm):
    Z = Q @ X
    G = Z.T @ Z
    L = 0.0
    if not warm:
        L = 2.0 * np.linalg.eigvalsh(Z @ Z.T)[-1]
    f = np.diag(G).copy()
    x, gap, its, refined, ok = _qp_solve(2.0 * G, f, C, a, warm, L, KKT_TOL, MAX_ITER)
    return x, gap, ok


@njit(cache=True, nogil=True)
def _orthonormalize_c(Q):
    U, R = np.linalg.qr(Q.T)
    d = Q.shape[0]
    rmax = 0.0
    rmin = np.inf
    for k in range(d):
        r = abs(R[k, k])
        rmax = max(rmax, r)
        rmin = min(rmin, r)
    if not np.isfinite(rmin) or not np.isfinite(rmax) or rmin <= 1e-10 * max(rmax, 1e-300):
        return Q, False
    out = np.empty((d, Q.shape[1]))
    for k in range(d):
        sg = 1.0 if R[k, k] > 0.0 else -1.0
        out[k] = sg * U[:, k]
    return out, True


@njit(cache=True, nogil=True)
def _train_core(X, Q, a, warm, C, variant, b, eta, iters, newton, ridge):
    """Compiled alternating loop; returns ``(Q, alphas, gap, trace, orth, status, at)``."""
    D = X.shape[0]
    d = Q.shape[0]
    trace = np.zeros(iters + 1)
    orth = np.zeros(iters)
    eye = np.eye(d)
    gap = 0.0
    for it in range(iters):
        a, gap, ok = _dual_c(Q, X, C, a, warm)
        if not ok:
            return Q, a, gap, trace, orth, _QP_FAIL, it
        warm = True
        lam = _lambda_c(variant, a, C)
        M = _scatter_c(X, a, lam, b)
        QM = Q @ M
        trace[it] = np.sum(QM * Q)
        grad = 2.0 * QM
        if newton:
            A = 2.0 * M + ridge * np.eye(D)
            Y = np.linalg.solve(A, grad.T)
            gmax = max(1.0, np.abs(grad).max())
            if not np.all(np.isfinite(Y)) or np.abs(A @ Y - grad.T).max() > 1e-8 * gmax:
                return Q, a, gap, trace, orth, _NEWTON_SINGULAR, it
            Q = Q - eta * Y.T
        else:
            Q = Q - eta * grad
        Q, ok = _orthonormalize_c(Q)
        if not ok:
            return Q, a, gap, trace, orth, _RANK_DEFICIENT, it
        err = np.abs(Q @ Q.T - eye).max()
        orth[it] = err
        if err > ORTH_TOL:
            return Q, a, gap, trace, orth, _ORTH_LOST, it
    a, gap, ok = _dual_c(Q, X, C, a, warm)
    if not ok:
        return Q, a, gap, trace, orth, _QP_FAIL, iters
    lam = _lambda_c(variant, a, C)
    M = _scatter_c(X, a, lam, b)
    trace[iters] = np.sum((Q @ M) * Q)
    if not np.all(np.isfinite(trace)):
        return Q, a, gap, trace, orth, _NONFINITE, iters
    return Q, a, gap, trace, orth, _OK, iters


def initial_dual(X, Q, C):
    """The cold-start dual solution ``train_subspace`` computes in its first round.

    Passing it back as ``alphas0`` reproduces an uncached run bit for bit.
    """
    X = np.ascontiguousarray(as_samples(X, "X"))
    N = X.shape[1]
    if C * N < 1.0 - 1e-12:
        raise InfeasibleError(f"C={C} < 1/N={1.0 / N:.6g}: sum(alpha)=1 is infeasible")
    a = _start_point(N, C)
    a, gap, ok = _dual_c(np.ascontiguousarray(Q, dtype=np.float64), X, float(C), a, False)
    if not ok:
        raise ConvergenceError(f"iteration 0: dual QP did not converge (best KKT gap {gap:.3g})")
    return a


def _start_point(N, C):
    a = np.full(N, 1.0 / N)
    return project_capped_simplex(a, C) if 1.0 / N > C else a


_FAILURES = {
    _NEWTON_SINGULAR: "Newton system is numerically singular",
    _RANK_DEFICIENT: "projection matrix is rank deficient",
    _ORTH_LOST: "orthonormality lost",
    _NONFINITE: "non-finite Lagrangian during training",
}


def train_subspace(X_target, config: SubspaceConfig, seed=None, *, q0=None, alphas0=None):
    """Train a subspace SVDD model on target-class samples (columns of ``X_target``).

    Runs exactly ``config.iters`` rounds; the loss trace holds ``L`` for each
    round's projection plus the final one. Initialization is deterministic
    (leading principal directions), so ``seed`` does not change the result.
    ``q0`` and ``alphas0`` let callers reuse a cached initial projection and
    first dual solution for the same data.
    """
    X = np.ascontiguousarray(as_samples(X_target, "X_target"))
    D, N = X.shape
    if N < 2:
        raise InputError("subspace training needs at least two target samples")
    if config.d > D:
        raise ConfigError(f"d={config.d} exceeds data dimensionality {D}")
    if config.C * N < 1.0 - 1e-12:
        raise InfeasibleError(f"C={config.C} < 1/N={1.0 / N:.6g}: sum(alpha)=1 is infeasible")
    Q = initial_projection(X, config.d) if q0 is None else np.array(q0, dtype=np.float64)
    warm = alphas0 is not None
    a = np.array(alphas0, dtype=np.float64) if warm else _start_point(N, config.C)
    Q, a, gap, trace, orth, status, at = _train_core(
        X, np.ascontiguousarray(Q), a, warm, float(config.C), _VARIANT_CODE[config.variant],
        float(config.beta_signed), float(config.eta), int(config.iters),
        config.optimizer == "newton", float(config.newton_ridge))
    where = "final solve" if at == config.iters else f"iteration {at}"
    if status == _QP_FAIL:
        raise ConvergenceError(f"{where}: dual QP did not converge (best KKT gap {gap:.3g})")
    if status != _OK:
        raise NumericError(f"{where}: {_FAILURES[status]}")
    Z = Q @ X
    G = Z.T @ Z
    sol = _dual_solution(a, a @ np.diag(G) - a @ G @ a, config.C, gap)
    sphere = sphere_from_dual(G, sol, Z, LINEAR)
    return SubspaceModel(Q=Q, sphere=sphere, config=config, training_loss_trace=trace,
                         orthonormality_trace=orth)


def predict_subspace(model: SubspaceModel, Z_test):
    d2 = model.distances(Z_test)
    return Decision(d2, d2 <= model.sphere.radius_sq + BOUNDARY_TOL)
