"""Cross-validated grid search and repeated-split experiments."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError, OcdescError, SearchError
from ..kernels import as_samples
from .methods import (MODES, FeatureSpace, HyperGrid, MethodSpec, Params, fit_in_space, grid_cells,
                      parse_method)
from .metrics import MetricsReport, aggregate, compute_metrics
from .splits import SplitPlan, derive_seeds, make_split_plans, stratified_folds
from .standardize import standardize_fit

log = logging.getLogger(__name__)


def worker_count():
    """Worker threads allowed by ``OCDESC_THREADS`` (default 1)."""
    try:
        n = int(os.environ.get("OCDESC_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


class Fold:
    """One CV fold: feature spaces built from the fold's target training samples."""

    def __init__(self, X, labels, train_idx, val_idx):
        self.X = X
        self.fit_idx = train_idx[labels[train_idx]]
        self.val_idx = val_idx
        self.val_labels = labels[val_idx]
        self.stats = standardize_fit(X[:, self.fit_idx])
        self._spaces = {}

    def space(self, mode, sigma):
        key = (mode, sigma)
        if key not in self._spaces:
            sp = FeatureSpace(self.X[:, self.fit_idx], mode, sigma, self.stats, indices=self.fit_idx)
            self._spaces[key] = (sp, sp.view(self.X[:, self.val_idx]))
        return self._spaces[key]


def make_folds(X, labels, idx, k, seed):
    """Stratified folds over the samples ``idx`` (dataset indices)."""
    parts = stratified_folds(labels[idx], k, seed)
    out = []
    for p in parts:
        val = idx[np.sort(p)]
        train = np.setdiff1d(idx, val)
        out.append(Fold(X, labels, train, val))
    return out


@dataclass
class CellResult:
    params: Params
    gm: float
    fold_gms: tuple = ()
    failure: str | None = None


@dataclass
class SearchResult:
    best: Params
    best_gm: float
    table: list = field(default_factory=list)

    @property
    def failures(self):
        return [(c.params, c.failure) for c in self.table if c.failure]


def _fit(method, params, space, fit_hook):
    if fit_hook is not None:
        fit_hook(method.name, params, space.indices)
    return fit_in_space(method, params, space)


def search_folds(method: MethodSpec, cells, folds, mode, fit_hook=None) -> SearchResult:
    """Mean validation GM per cell over ``folds``; ties go to the smaller key."""
    table = []
    for params in sorted(cells, key=Params.key):
        gms = []
        failure = None
        for fold in folds:
            sp, view = fold.space(mode, params.sigma)
            try:
                pred = _fit(method, params, sp, fit_hook).predict(view)
            except OcdescError as exc:
                failure = f"{type(exc).__name__}: {exc}"
                break
            gms.append(compute_metrics(pred, fold.val_labels).gm)
        if failure is not None:
            table.append(CellResult(params, math.nan, tuple(gms), failure))
            continue
        ok = [g for g in gms if not math.isnan(g)]
        if len(ok) < len(gms):
            log.warning("%s %s: GM undefined on %d fold(s), skipped", method.name, params.to_dict(),
                        len(gms) - len(ok))
        if not ok:
            table.append(CellResult(params, math.nan, tuple(gms), "GM undefined on every fold"))
            continue
        table.append(CellResult(params, float(np.mean(ok)), tuple(gms)))
    best = None
    for c in table:
        if c.failure is None and (best is None or c.gm > best.gm):
            best = c
    if best is None:
        raise SearchError(f"{method.name}: every grid cell failed",
                          failures=[(c.params, c.failure) for c in table])
    return SearchResult(best.params, best.gm, table)


def _check_labeled(X, labels):
    X = as_samples(X, "features")
    labels = np.asarray(labels, dtype=bool)
    if labels.ndim != 1 or labels.size != X.shape[1]:
        raise InputError(f"{labels.size} labels for {X.shape[1]} samples")
    if labels.all() or not labels.any():
        raise InputError("labeled set needs both target and outlier samples")
    return X, labels


def grid_search_cv(X, labels, method, grid: HyperGrid | None = None, mode="linear", folds=5, seed=0,
                   fit_hook=None) -> SearchResult:
    """Select hyperparameters by mean validation GM over stratified folds.

    ``labels`` is a boolean target mask. Models are fit only on the target
    samples of each training fold; outliers appear only in validation.
    """
    X, labels = _check_labeled(X, labels)
    method = parse_method(method) if isinstance(method, str) else method
    grid = grid or HyperGrid()
    fl = make_folds(X, labels, np.arange(labels.size), folds, seed)
    return search_folds(method, grid_cells(method, grid, mode), fl, mode, fit_hook)


@dataclass
class SplitOutcome:
    plan: SplitPlan
    params: Params
    cv_gm: float
    metrics: MetricsReport


@dataclass
class ExperimentResult:
    method: str
    mode: str
    report: MetricsReport | None
    splits: list = field(default_factory=list)
    failure: str | None = None

    @property
    def ok(self):
        return self.failure is None


def evaluate_split(X, labels, plan: SplitPlan, methods, modes, grid, folds=5, fit_hook=None):
    """Run every (mode, method) on one split: CV search then a final fit on all
    target training samples, scored on the test set."""
    fold_seed = derive_seeds(plan.seed, 1)[0]
    fl = make_folds(X, labels, plan.train_idx, folds, fold_seed)
    fit_idx = plan.train_idx[labels[plan.train_idx]]
    final = Fold(X, labels, np.asarray(fit_idx), plan.test_idx)
    out = {}
    for mode in modes:
        for m in methods:
            try:
                res = search_folds(m, grid_cells(m, grid, mode), fl, mode, fit_hook)
                sp, view = final.space(mode, res.best.sigma)
                pred = _fit(m, res.best, sp, fit_hook).predict(view)
                out[(mode, m.name)] = SplitOutcome(plan, res.best, res.best_gm,
                                                   compute_metrics(pred, final.val_labels))
            except OcdescError as exc:
                out[(mode, m.name)] = f"split seed {plan.seed}: {type(exc).__name__}: {exc}"
    return out


def run_benchmark(X, labels, methods=None, modes=MODES, grid: HyperGrid | None = None, repeats=5,
                  base_seed=0, folds=5, fit_hook=None, plans=None):
    """All ``methods`` x ``modes`` on the same ``repeats`` split plans.

    Returns ``(results, plans)`` with one :class:`ExperimentResult` per
    (mode, method), linear block first. A failing split marks that method
    failed and the run continues with the others.
    """
    X, labels = _check_labeled(X, labels)
    specs = [parse_method(m) if isinstance(m, str) else m for m in (methods or _all_methods())]
    grid = grid or HyperGrid()
    for mode in modes:
        if mode not in MODES:
            raise InputError(f"unknown kernel mode {mode!r}")
    if plans is None:
        plans = make_split_plans(labels, repeats, base_seed)
    args = (X, labels)
    work = lambda p: evaluate_split(*args, p, specs, modes, grid, folds, fit_hook)
    n = min(worker_count(), len(plans))
    if n > 1:
        with ThreadPoolExecutor(n) as ex:
            per_split = list(ex.map(work, plans))
    else:
        per_split = [work(p) for p in plans]
    results = []
    for mode in modes:
        for m in specs:
            outs = [s[(mode, m.name)] for s in per_split]
            errs = [o for o in outs if isinstance(o, str)]
            if errs:
                results.append(ExperimentResult(m.name, mode, None, [], errs[0]))
                continue
            rep = aggregate([o.metrics for o in outs])
            results.append(ExperimentResult(m.name, mode, rep, outs))
    return results, plans


def run_experiment(X, labels, method, grid=None, repeats=5, base_seed=0, mode="linear", folds=5,
                   fit_hook=None, plans=None) -> ExperimentResult:
    """Mean and std of the test metrics of one method over ``repeats`` splits."""
    (res,), _ = run_benchmark(X, labels, [method], (mode,), grid, repeats, base_seed, folds,
                              fit_hook, plans)
    if res.failure:
        raise SearchError(f"{res.method} ({mode}) failed: {res.failure}")
    return res


def _all_methods():
    from .methods import ALL_METHODS
    return [parse_method(m) for m in ALL_METHODS]
