"""Corpus records and CSV / JSON-lines I/O."""
from __future__ import annotations

import csv
import datetime as dt
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from ..errors import InputError
from .preprocess import extract_hashtags, is_english_like

log = logging.getLogger(__name__)

FIELDS = ("text", "label", "country", "date", "hashtags")
LABELS = ("positive", "negative")


class CorpusError(InputError):
    """The corpus file cannot be used (missing text column, mostly malformed rows)."""


@dataclass(frozen=True)
class RawRecord:
    text: str
    country: str | None = None
    date: str | None = None
    label: str | None = None
    hashtags: tuple | None = None

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text.strip():
            raise InputError("record text is empty")
        if self.label is not None and self.label not in LABELS:
            raise InputError(f"label must be one of {LABELS}, got {self.label!r}")
        if self.date is not None:
            try:
                dt.date.fromisoformat(self.date)
            except (TypeError, ValueError) as exc:
                raise InputError(f"date is not ISO-8601: {self.date!r}") from exc
        if self.hashtags is not None:
            object.__setattr__(self, "hashtags", tuple(self.hashtags) or None)

    def tags(self):
        return self.hashtags if self.hashtags is not None else tuple(extract_hashtags(self.text))

    def to_dict(self):
        d = {"text": self.text}
        for k in FIELDS[1:]:
            v = getattr(self, k)
            if v is not None:
                d[k] = list(v) if k == "hashtags" else v
        return d


@dataclass
class LoadReport:
    rows: int = 0
    malformed: int = 0
    unknown_columns: tuple = ()


def _none(v):
    if v is None:
        return None
    v = str(v).strip() if not isinstance(v, list) else v
    return v if v != "" else None


def _record(d, fmt):
    tags = _none(d.get("hashtags"))
    if isinstance(tags, str):
        tags = tuple(t.lstrip("#") for t in tags.split())
    label = _none(d.get("label"))
    return RawRecord(text=d.get("text") or "", country=_none(d.get("country")),
                     date=_none(d.get("date")), label=label.lower() if label else None,
                     hashtags=tags)


def detect_format(path, fmt=None):
    if fmt:
        if fmt not in ("csv", "jsonl"):
            raise InputError(f"unknown corpus format {fmt!r}")
        return fmt
    return "jsonl" if Path(path).suffix.lower() in (".jsonl", ".json", ".ndjson") else "csv"


def load_corpus(path, fmt=None, max_malformed=0.5):
    """Read records; malformed rows are skipped and counted.

    Returns ``(records, LoadReport)``. Raises :class:`CorpusError` when the
    ``text`` column is missing or more than ``max_malformed`` of rows fail.
    """
    fmt = detect_format(path, fmt)
    report = LoadReport()
    records = []
    unknown = set()
    with open(path, newline="", encoding="utf-8") as fh:
        if fmt == "csv":
            reader = csv.DictReader(fh)
            cols = reader.fieldnames or []
            if "text" not in cols:
                raise CorpusError(f"{path}: no 'text' column")
            unknown.update(c for c in cols if c not in FIELDS)
            items = ((n, row) for n, row in enumerate(reader, 2))
        else:
            items = ((n, line) for n, line in enumerate(fh, 1) if line.strip())
        for n, item in items:
            report.rows += 1
            try:
                if fmt == "jsonl":
                    item = json.loads(item)
                    if not isinstance(item, dict):
                        raise InputError("not a JSON object")
                    unknown.update(k for k in item if k not in FIELDS)
                elif None in item:
                    raise InputError("too many fields")
                records.append(_record(item, fmt))
            except (InputError, ValueError) as exc:
                report.malformed += 1
                log.warning("%s:%d skipped: %s", path, n, exc)
    report.unknown_columns = tuple(sorted(unknown))
    for c in report.unknown_columns:
        log.warning("%s: ignoring unknown column %r", path, c)
    if report.rows and report.malformed / report.rows > max_malformed:
        raise CorpusError(f"{path}: {report.malformed} of {report.rows} rows malformed")
    return records, report


def write_corpus(records, path, fmt=None):
    fmt = detect_format(path, fmt)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(FIELDS)
            for r in records:
                w.writerow([r.text, r.label or "", r.country or "", r.date or "",
                            " ".join(r.hashtags) if r.hashtags is not None else ""])
        else:
            for r in records:
                fh.write(json.dumps(r.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")


def filter_language(records, threshold=0.5):
    """Drop records whose alphabetic characters are less than half ASCII letters."""
    kept = [r for r in records if is_english_like(r.text, threshold)]
    return kept, len(records) - len(kept)
