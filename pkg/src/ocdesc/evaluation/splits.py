"""Stratified train/test plans and cross-validation folds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class SplitPlan:
    seed: int
    train_idx: np.ndarray
    test_idx: np.ndarray
    ratio: float = 0.7
    single_class: bool = False

    def __eq__(self, other):
        return (isinstance(other, SplitPlan) and self.seed == other.seed and self.ratio == other.ratio
                and np.array_equal(self.train_idx, other.train_idx)
                and np.array_equal(self.test_idx, other.test_idx))

    def __hash__(self):
        return hash((self.seed, self.train_idx.tobytes(), self.test_idx.tobytes()))


def stratified_split(labels, ratio=0.7, seed=0, allow_single_class=False):
    """Per-class shuffled split with ``round(ratio * n_c)`` training samples per class.

    A single-class label vector is refused unless ``allow_single_class``; then
    every index goes to training and the test set is empty.
    """
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise InputError("labels must be a non-empty vector")
    if not 0.0 < ratio < 1.0:
        raise InputError(f"ratio must lie in (0, 1), got {ratio}")
    classes = np.unique(labels)
    if classes.size < 2:
        if not allow_single_class:
            raise InputError("a test split needs at least two classes")
        return SplitPlan(int(seed), np.arange(labels.size), np.zeros(0, dtype=np.int64),
                         float(ratio), single_class=True)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in classes:
        idx = np.flatnonzero(labels == c)
        if idx.size < 2:
            raise InputError(f"class {c!r} has {idx.size} sample(s); need at least 2")
        idx = rng.permutation(idx)
        k = min(max(int(round(ratio * idx.size)), 1), idx.size - 1)
        train.append(idx[:k])
        test.append(idx[k:])
    return SplitPlan(int(seed), np.sort(np.concatenate(train)), np.sort(np.concatenate(test)),
                     float(ratio))


def stratified_folds(labels, k=5, seed=0):
    """``k`` disjoint validation index arrays, each class dealt round-robin after shuffling."""
    labels = np.asarray(labels)
    if k < 2:
        raise InputError("need at least two folds")
    if labels.size < k:
        raise InputError(f"{labels.size} samples cannot form {k} folds")
    rng = np.random.default_rng(seed)
    assign = np.empty(labels.size, dtype=np.int64)
    offset = 0
    for c in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == c))
        assign[idx] = (np.arange(idx.size) + offset) % k
        offset += idx.size
    return [np.flatnonzero(assign == f) for f in range(k)]


def derive_seeds(base_seed, n):
    """``n`` independent integer seeds from one base seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(base_seed).spawn(n)]


def make_split_plans(labels, repeats=5, base_seed=0, ratio=0.7):
    return [stratified_split(labels, ratio, s) for s in derive_seeds(base_seed, repeats)]
