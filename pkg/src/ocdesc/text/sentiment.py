"""Lexicon polarity scoring with booster and negation heuristics."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import ConfigError
from .preprocess import HASHTAG_RE, URL_RE, TokenStream

NORMALIZATION = 15.0
NEGATION_FACTOR = -0.74
NEGATION_WINDOW = 3

_WORD_RE = re.compile(r"[a-z]+(?:['’][a-z]+)*")


@dataclass(frozen=True)
class LexiconEntry:
    term: str
    role: str  # sentiment | booster | negation
    valence: float = 0.0
    weight: float = 0.0


@dataclass(frozen=True)
class Lexicon:
    entries: dict = field(default_factory=dict)
    normalization: float = NORMALIZATION
    negation_factor: float = NEGATION_FACTOR
    negation_window: int = NEGATION_WINDOW

    def role(self, term):
        e = self.entries.get(term)
        return None if e is None else e.role

    def sentiment_terms(self):
        return sorted(t for t, e in self.entries.items() if e.role == "sentiment")

    def boosters(self):
        return sorted(t for t, e in self.entries.items() if e.role == "booster")

    def is_negation(self, tok):
        e = self.entries.get(tok)
        return (e is not None and e.role == "negation") or tok.endswith("n't") or tok.endswith("n’t")


def parse_lexicon(lines, **options) -> Lexicon:
    """Entries are ``term<TAB>valence``, ``term<TAB>@booster:<weight>`` or
    ``term<TAB>@negation``; blank lines and lines starting with ``;`` are skipped."""
    entries = {}
    for n, line in enumerate(lines, 1):
        line = line.rstrip("\n\r")
        if not line.strip() or line.startswith(";"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip():
            raise ConfigError(f"lexicon line {n}: expected 'term<TAB>value', got {line!r}")
        term, val = parts[0].strip().lower(), parts[1].strip()
        if term in entries:
            raise ConfigError(f"lexicon line {n}: duplicate term {term!r}")
        try:
            if val == "@negation":
                e = LexiconEntry(term, "negation")
            elif val.startswith("@booster:"):
                w = float(val.split(":", 1)[1])
                if not (math.isfinite(w) and w >= 0):
                    raise ConfigError(f"lexicon line {n}: booster weight must be >= 0")
                e = LexiconEntry(term, "booster", weight=w)
            else:
                v = float(val)
                if not math.isfinite(v):
                    raise ValueError(val)
                e = LexiconEntry(term, "sentiment", valence=v)
        except ValueError as exc:
            raise ConfigError(f"lexicon line {n}: bad value {val!r}") from exc
        entries[term] = e
    return Lexicon(entries, **options)


def default_lexicon_path():
    return resources.files("ocdesc") / "data" / "lexicon.tsv"


def load_lexicon(path=None, **options) -> Lexicon:
    """Read a lexicon file (the shipped starter lexicon when ``path`` is None)."""
    p = default_lexicon_path() if path is None else Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"lexicon not found: {p}") from exc
    return parse_lexicon(text.splitlines(), **options)


@dataclass(frozen=True)
class SentimentScore:
    compound: float
    klass: str
    raw: float = 0.0
    hits: int = 0


def polarity_class(compound):
    if compound > 0:
        return "positive"
    if compound < 0:
        return "negative"
    return "neutral"


def sentiment_tokens(text):
    """Lowercase words with URLs removed and hashtag words kept (no stemming)."""
    t = URL_RE.sub(" ", text.lower())
    t = HASHTAG_RE.sub(lambda m: " " + m.group(1) + " ", t)
    return _WORD_RE.findall(t)


def raw_valence(tokens, lexicon: Lexicon):
    s = 0.0
    hits = 0
    for i, tok in enumerate(tokens):
        e = lexicon.entries.get(tok)
        if e is None or e.role != "sentiment":
            continue
        v = e.valence
        if i > 0:
            prev = lexicon.entries.get(tokens[i - 1])
            if prev is not None and prev.role == "booster":
                v *= 1.0 + prev.weight
        lo = max(0, i - lexicon.negation_window)
        if any(lexicon.is_negation(t) for t in tokens[lo:i]):
            v *= lexicon.negation_factor
        s += v
        hits += 1
    return s, hits


def score_sentiment(stream_or_text, lexicon: Lexicon | None) -> SentimentScore:
    """Compound polarity ``s / sqrt(s^2 + 15)`` of the summed adjusted valences."""
    if lexicon is None:
        raise ConfigError("a lexicon is required for sentiment scoring")
    if isinstance(stream_or_text, str):
        tokens = sentiment_tokens(stream_or_text)
    elif isinstance(stream_or_text, TokenStream):
        tokens = list(stream_or_text.tokens)
    else:
        tokens = [str(t).lower() for t in stream_or_text]
    s, hits = raw_valence(tokens, lexicon)
    compound = s / math.sqrt(s * s + lexicon.normalization) if s else 0.0
    compound = min(1.0, max(-1.0, compound))
    return SentimentScore(compound, polarity_class(compound), s, hits)
