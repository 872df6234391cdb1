"""Per-dimension standardization with statistics from target training data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..kernels import as_samples


@dataclass(frozen=True)
class StandardizeStats:
    mean: np.ndarray
    std: np.ndarray

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["mean"], dtype=np.float64), np.asarray(d["std"], dtype=np.float64))


def standardize_fit(train_target):
    """Mean and population std per row of a ``D x n`` matrix (constant rows get std 1)."""
    X = as_samples(train_target, "train_target")
    if X.shape[1] < 2:
        raise InputError("standardization needs at least two samples")
    mean = X.mean(1)
    std = X.std(1)
    const = std <= 1e-12 * np.maximum(1.0, np.abs(mean))
    std = np.where(const, 1.0, std)
    return StandardizeStats(mean, std)


def standardize_apply(stats: StandardizeStats, X):
    X = as_samples(X)
    if X.shape[0] != stats.mean.size:
        raise InputError(f"expected {stats.mean.size} features, got {X.shape[0]}")
    return (X - stats.mean[:, None]) / stats.std[:, None]
