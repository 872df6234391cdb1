"""Kernel specifications and Gram matrices.

Samples are stored column-wise throughout the package: a data matrix has
shape ``(D, N)`` with one sample per column.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError, NumericError

PSD_TOL = 1e-8


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "linear"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "gaussian"):
            raise ConfigError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "gaussian" and not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ConfigError(f"gaussian kernel needs sigma > 0, got {self.sigma}")

    def to_dict(self):
        return {"kind": self.kind, "sigma": float(self.sigma)}

    @classmethod
    def from_dict(cls, d):
        return cls(kind=d["kind"], sigma=float(d.get("sigma", 1.0)))


LINEAR = KernelSpec("linear")


def as_samples(X, name="X"):
    """Return ``X`` as a finite float64 ``(D, N)`` array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InputError(f"{name} must be a (D, N) matrix, got shape {X.shape}")
    if X.shape[1] < 1:
        raise InputError(f"{name} has no samples")
    if not np.all(np.isfinite(X)):
        raise InputError(f"{name} contains non-finite entries")
    return X


def _sq_dists(A, B):
    sq = (A * A).sum(0)[:, None] + (B * B).sum(0)[None, :] - 2.0 * (A.T @ B)
    return np.maximum(sq, 0.0)


def cross_kernel(A, B, spec: KernelSpec):
    """Kernel values ``k(a_i, b_j)`` for the columns of ``A`` and ``B``."""
    if A.shape[0] != B.shape[0]:
        raise InputError(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")
    if spec.kind == "linear":
        return A.T @ B
    return np.exp(-_sq_dists(A, B) / (2.0 * spec.sigma ** 2))


def self_kernel(A, spec: KernelSpec):
    """Diagonal values ``k(a_i, a_i)``."""
    if spec.kind == "linear":
        return (A * A).sum(0)
    return np.ones(A.shape[1])


def compute_gram(X, spec: KernelSpec = LINEAR):
    """Pairwise kernel matrix of the columns of ``X`` (exactly symmetric)."""
    X = as_samples(X)
    G = cross_kernel(X, X, spec)
    G = 0.5 * (G + G.T)
    if spec.kind == "gaussian":
        np.fill_diagonal(G, 1.0)
    return G


def check_psd(G, tol=PSD_TOL):
    """Return the spectrum of ``G``; raise if it is clearly indefinite."""
    G = np.asarray(G, dtype=np.float64)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InputError(f"Gram matrix must be square, got {G.shape}")
    if not np.all(np.isfinite(G)):
        raise InputError("Gram matrix contains non-finite entries")
    if np.abs(G - G.T).max(initial=0.0) > 1e-10 * max(1.0, np.abs(G).max()):
        raise InputError("Gram matrix is not symmetric")
    w = np.linalg.eigvalsh(G)
    if w[0] < -tol * max(1.0, w[-1]):
        raise NumericError(f"Gram matrix is not PSD (min eigenvalue {w[0]:.3g})")
    return w
