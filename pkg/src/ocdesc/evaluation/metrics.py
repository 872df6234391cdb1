"""Confusion-count metrics with the target class as the positive class."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields

import numpy as np

from ..errors import InputError

log = logging.getLogger(__name__)

METRIC_NAMES = ("accu", "tpr", "tnr", "pre", "f1", "gm")


@dataclass(frozen=True)
class MetricsReport:
    accu: float
    tpr: float
    tnr: float
    pre: float
    f1: float
    gm: float
    s_accu: float = 0.0
    s_tpr: float = 0.0
    s_tnr: float = 0.0
    s_pre: float = 0.0
    s_f1: float = 0.0
    s_gm: float = 0.0
    undefined: tuple = ()  # names of metrics reported as NaN
    counts: tuple = ()  # (tp, tn, fp, fn) for single evaluations

    def means(self):
        return tuple(getattr(self, k) for k in METRIC_NAMES)

    def stds(self):
        return tuple(getattr(self, "s_" + k) for k in METRIC_NAMES)

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["undefined"] = list(self.undefined)
        d["counts"] = list(self.counts)
        return d


def confusion(predictions, labels):
    """``(tp, tn, fp, fn)`` from boolean target predictions and target labels."""
    p = np.asarray(predictions, dtype=bool)
    t = np.asarray(labels, dtype=bool)
    if p.shape != t.shape or p.ndim != 1:
        raise InputError(f"predictions {p.shape} and labels {t.shape} must be equal-length vectors")
    tp = int(np.sum(p & t))
    tn = int(np.sum(~p & ~t))
    fp = int(np.sum(p & ~t))
    fn = int(np.sum(~p & t))
    return tp, tn, fp, fn


def _ratio(a, b):
    return a / b if b else math.nan


def metrics_from_counts(tp, tn, fp, fn):
    total = tp + tn + fp + fn
    accu = _ratio(tp + tn, total)
    tpr = _ratio(tp, tp + fn)
    tnr = _ratio(tn, tn + fp)
    pre = _ratio(tp, tp + fp)
    if math.isnan(pre) or math.isnan(tpr):
        f1 = math.nan
    elif pre + tpr == 0:
        f1 = 0.0
    else:
        f1 = 2.0 * pre * tpr / (pre + tpr)
    gm = math.sqrt(tpr * tnr) if not (math.isnan(tpr) or math.isnan(tnr)) else math.nan
    vals = dict(accu=accu, tpr=tpr, tnr=tnr, pre=pre, f1=f1, gm=gm)
    undefined = tuple(k for k in METRIC_NAMES if math.isnan(vals[k]))
    return MetricsReport(**vals, undefined=undefined, counts=(tp, tn, fp, fn))


def compute_metrics(predictions, labels):
    """Accu/tpr/tnr/Pre/F1/GM; undefined ratios are NaN and listed in ``undefined``."""
    return metrics_from_counts(*confusion(predictions, labels))


def gm_score(predictions, labels):
    return compute_metrics(predictions, labels).gm


def aggregate(reports):
    """Mean and population standard deviation of each metric across reports.

    NaN entries are ignored; a metric undefined in every report stays NaN.
    """
    if not reports:
        raise InputError("nothing to aggregate")
    vals = np.array([r.means() for r in reports], dtype=np.float64)
    out = {}
    undefined = []
    for j, k in enumerate(METRIC_NAMES):
        col = vals[:, j]
        ok = col[~np.isnan(col)]
        if ok.size == 0:
            out[k] = math.nan
            out["s_" + k] = math.nan
            undefined.append(k)
            continue
        if ok.size < col.size:
            log.warning("%s undefined in %d of %d evaluations", k, col.size - ok.size, col.size)
        out[k] = float(ok.mean())
        out["s_" + k] = float(ok.std())
    return MetricsReport(**out, undefined=tuple(undefined))
