"""Synthetic labeled data for protocol checks."""
from __future__ import annotations

import csv
from importlib import resources

import numpy as np

SHIPPED_SEED = 20240601


def make_separable(seed=SHIPPED_SEED, n_target=100, n_outlier=100, dim=5, shell=(6.0, 8.0)):
    """Gaussian target cloud inside a shell of outliers.

    Returns ``(X, is_target)`` with ``X`` of shape ``(dim, n_target + n_outlier)``.
    Targets are N(0, I); outliers have uniformly random directions and radii
    in ``shell``, so any sphere around the cloud separates the two classes.
    """
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((dim, n_target))
    U = rng.standard_normal((dim, n_outlier))
    U /= np.linalg.norm(U, axis=0)
    O = U * rng.uniform(shell[0], shell[1], n_outlier)
    X = np.hstack([T, O])
    y = np.r_[np.ones(n_target, bool), np.zeros(n_outlier, bool)]
    return X, y


def write_feature_csv(path, X, is_target):
    """Feature file: one row per sample, ``label`` column then ``f0..f{D-1}``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label"] + [f"f{j}" for j in range(X.shape[0])])
        for i in range(X.shape[1]):
            w.writerow(["positive" if is_target[i] else "negative"] + [repr(float(v)) for v in X[:, i]])


def read_feature_csv(path, target="positive"):
    """Inverse of :func:`write_feature_csv`; returns ``(X, is_target, labels)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], [r for r in rows[1:] if r]
    li = header.index("label")
    cols = [j for j in range(len(header)) if j != li]
    labels = np.array([r[li] for r in body])
    X = np.array([[float(r[j]) for j in cols] for r in body], dtype=np.float64).T
    return X, labels == target, labels


def shipped_separable_path():
    return resources.files("ocdesc") / "data" / "synthetic_separable.csv"


def load_shipped_separable():
    X, y, _ = read_feature_csv(shipped_separable_path())
    return X, y
