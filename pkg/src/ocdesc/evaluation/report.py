"""Benchmark tables: full-precision CSV, JSON sidecar and a 2-decimal display copy."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError, InputError
from .methods import ALL_METHODS, MODES, parse_method
from .metrics import METRIC_NAMES, MetricsReport

HEADER = ("Method", "Accu", "tpr", "tnr", "Pre", "F1", "GM",
          "S-Accu", "S-tpr", "S-tnr", "S-Pre", "S-F1", "S-GM")


@dataclass(frozen=True)
class ReportRow:
    method: str
    mode: str
    metrics: MetricsReport | None
    status: str = "ok"
    reason: str = ""
    best_params: tuple = ()

    def __post_init__(self):
        name = parse_method(self.method).name
        if name not in ALL_METHODS:
            raise ConfigError(f"{self.method!r} is not one of the benchmark methods")
        object.__setattr__(self, "method", name)
        if self.mode not in MODES:
            raise ConfigError(f"unknown kernel mode {self.mode!r}")

    def values(self):
        if self.metrics is None:
            return (math.nan,) * 12
        return self.metrics.means() + self.metrics.stds()


def rows_from_results(results):
    rows = []
    for r in results:
        params = tuple(s.params.to_dict() for s in r.splits)
        rows.append(ReportRow(r.method, r.mode, r.report, "ok" if r.ok else "failed",
                              r.failure or "", params))
    return rows


def ordered(rows):
    """Linear block first, then nonlinear; each in benchmark method order."""
    rank = {m: i for i, m in enumerate(ALL_METHODS)}
    return sorted(rows, key=lambda r: (MODES.index(r.mode), rank[r.method]))


def _full(v):
    return "nan" if math.isnan(v) else repr(float(v))


def _short(v):
    return "nan" if math.isnan(v) else f"{v:.2f}"


def format_csv(rows, fmt=_full):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in ordered(rows):
        w.writerow([r.method] + [fmt(v) for v in r.values()])
    return buf.getvalue()


def sidecar(rows, meta=None):
    return {
        "columns": list(HEADER),
        "meta": meta or {},
        "rows": [{"method": r.method, "mode": r.mode, "status": r.status, "reason": r.reason,
                  "best_params": list(r.best_params),
                  "undefined": list(r.metrics.undefined) if r.metrics else list(METRIC_NAMES)}
                 for r in ordered(rows)],
    }


def write_benchmark(rows, out_dir, meta=None):
    """Write ``benchmark.csv``, ``benchmark.json`` and ``benchmark_display.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / "benchmark.csv", "json": out / "benchmark.json",
             "display": out / "benchmark_display.csv"}
    paths["csv"].write_text(format_csv(rows), encoding="utf-8")
    paths["display"].write_text(format_csv(rows, _short), encoding="utf-8")
    paths["json"].write_text(json.dumps(sidecar(rows, meta), indent=1, sort_keys=True) + "\n",
                             encoding="utf-8")
    return paths


def read_benchmark(csv_path, sidecar_path=None):
    """Parse a benchmark CSV back into rows at full precision.

    Kernel mode, status and reason come from the JSON sidecar when present;
    otherwise a method's first row is taken as linear and its second as
    nonlinear.
    """
    csv_path = Path(csv_path)
    with open(csv_path, newline="", encoding="utf-8") as fh:
        data = list(csv.reader(fh))
    if not data or tuple(data[0]) != HEADER:
        raise InputError(f"{csv_path}: unexpected header {data[:1]}")
    side = None
    sp = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    if sp.exists():
        side = json.loads(sp.read_text(encoding="utf-8"))["rows"]
        if len(side) != len(data) - 1:
            raise InputError(f"{sp} describes {len(side)} rows, CSV has {len(data) - 1}")
    seen = {}
    rows = []
    for i, rec in enumerate(data[1:]):
        if len(rec) != len(HEADER):
            raise InputError(f"{csv_path}: row {i + 2} has {len(rec)} fields")
        vals = [float(v) for v in rec[1:]]
        if side:
            info = side[i]
            mode, status, reason = info["mode"], info["status"], info["reason"]
            params = tuple(info.get("best_params", ()))
            undefined = tuple(info.get("undefined", ()))
        else:
            n = seen.get(rec[0], 0)
            seen[rec[0]] = n + 1
            mode, status, reason, params = MODES[min(n, 1)], "ok", "", ()
            undefined = tuple(k for k, v in zip(METRIC_NAMES, vals) if math.isnan(v))
        metrics = None
        if status == "ok":
            metrics = MetricsReport(*vals, undefined=undefined)
        rows.append(ReportRow(rec[0], mode, metrics, status, reason, params))
    return rows


def display_table(rows):
    """Fixed-width text table at 2-decimal display precision."""
    lines = [" ".join(f"{h:>8}" if j else f"{'Mode':<10}{h:<18}" for j, h in enumerate(HEADER))]
    for r in ordered(rows):
        cells = [f"{r.mode:<10}{r.method:<18}"] + [f"{_short(v):>8}" for v in r.values()]
        if r.status != "ok":
            cells.append(f"  FAILED: {r.reason}")
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"
