"""Nonlinear projection trick: an explicit embedding reproducing a kernel.

The centered training Gram ``Gc = U diag(lam) U'`` is factored as
``Phi' Phi`` with ``Phi = diag(sqrt(lam)) U'``; a new sample with kernel column
``k_z`` maps to ``diag(1/sqrt(lam)) U' kc_z`` where ``kc_z`` is centered with
the training statistics. Linear methods on ``Phi`` are then kernel methods.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, InputError, NumericError
from .kernels import KernelSpec, as_samples, check_psd, cross_kernel

RANK_TOL = 1e-9


@dataclass(frozen=True)
class CenteringStats:
    row_means: np.ndarray
    grand_mean: float


@dataclass(frozen=True)
class NptEmbedding:
    train_phi: np.ndarray  # r x N
    eigvals: np.ndarray
    eigvecs: np.ndarray  # N x r
    centering_stats: CenteringStats
    kernel: KernelSpec
    rank_tol: float = RANK_TOL

    @property
    def rank(self):
        return self.eigvals.size

    @property
    def n_train(self):
        return self.eigvecs.shape[0]


def center_gram(G):
    """Double-centered Gram and the statistics needed to center test columns."""
    G = np.asarray(G, dtype=np.float64)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InputError(f"Gram matrix must be square, got {G.shape}")
    rm = G.mean(0)
    gm = float(rm.mean())
    Gc = G - rm[:, None] - rm[None, :] + gm
    Gc = 0.5 * (Gc + Gc.T)
    return Gc, CenteringStats(row_means=rm, grand_mean=gm)


def fit_npt(G, kernel: KernelSpec, rank_tol=RANK_TOL, check=True):
    """Embed the training samples behind ``G``; ``rank_tol`` is relative to the top eigenvalue."""
    G = np.asarray(G, dtype=np.float64)
    if check:
        check_psd(G)
    Gc, stats = center_gram(G)
    try:
        w, U = np.linalg.eigh(Gc)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    w = w[::-1]
    U = U[:, ::-1]
    if w.size == 0 or w[0] <= 0:
        raise DegenerateDataError("centered Gram has no positive eigenvalue (all samples coincide)")
    keep = w > rank_tol * w[0]
    w = w[keep]
    U = U[:, keep]
    idx = np.abs(U).argmax(0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U = U * signs
    phi = np.sqrt(w)[:, None] * U.T
    return NptEmbedding(train_phi=phi, eigvals=w, eigvecs=U, centering_stats=stats,
                        kernel=kernel, rank_tol=rank_tol)


def center_columns(emb: NptEmbedding, K):
    """Center test kernel columns (``N x M``) with the training statistics."""
    st = emb.centering_stats
    return K - K.mean(0, keepdims=True) - st.row_means[:, None] + st.grand_mean


def embed_test(emb: NptEmbedding, k_z):
    """Map kernel columns against the training set into the embedding.

    ``k_z`` is a length-N vector (returns length r) or an ``N x M`` matrix.
    """
    K = np.asarray(k_z, dtype=np.float64)
    single = K.ndim == 1
    if single:
        K = K[:, None]
    if K.ndim != 2 or K.shape[0] != emb.n_train:
        raise InputError(f"kernel column must have length {emb.n_train}, got {K.shape[0]}")
    Kc = center_columns(emb, K)
    out = (emb.eigvecs.T @ Kc) / np.sqrt(emb.eigvals)[:, None]
    return out[:, 0] if single else out


def embed_samples(emb: NptEmbedding, X_train, Z):
    """Embed raw samples ``Z`` (columns) given the training samples used to fit ``emb``."""
    Z = as_samples(Z, "Z")
    return embed_test(emb, cross_kernel(np.asarray(X_train, dtype=np.float64), Z, emb.kernel))


def residual_energy(emb: NptEmbedding, k_zz, k_z):
    """Centered self-similarity not captured by the embedding (``>= 0`` up to roundoff).

    Kernel distances to points spanned by the training set exceed embedded
    distances by exactly this amount.
    """
    K = np.atleast_2d(np.asarray(k_z, dtype=np.float64))
    if K.shape[0] != emb.n_train:
        K = K.T
    st = emb.centering_stats
    kzz_c = np.asarray(k_zz, dtype=np.float64) - 2.0 * K.mean(0) + st.grand_mean
    phi = embed_test(emb, K)
    return kzz_c - (phi * phi).sum(0)
