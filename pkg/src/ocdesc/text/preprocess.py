"""Tweet normalization: URLs, hashtags, stopwords and a small suffix stemmer."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

URL_RE = re.compile(r"(?:https?://|www\.)\S*")
HASHTAG_RE = re.compile(r"#([a-z0-9_]+)")
NON_LETTER_RE = re.compile(r"[^a-z\s]+")

SUFFIXES = ("ation", "ing", "es", "ed", "s", "e")
MIN_STEM = 3


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple
    hashtags: tuple = ()

    def text(self):
        return " ".join(self.tokens)


@lru_cache(maxsize=None)
def default_stopwords():
    raw = (resources.files("ocdesc") / "data" / "stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in raw.splitlines() if w.strip())


def _strip_once(word):
    for suf in SUFFIXES:
        if word.endswith(suf) and len(word) - len(suf) >= MIN_STEM:
            return word[: -len(suf)]
    return word


@lru_cache(maxsize=65536)
def stem(word):
    """Strip the longest listed suffix repeatedly until nothing changes."""
    while True:
        nxt = _strip_once(word)
        if nxt == word:
            return word
        word = nxt


def extract_hashtags(text):
    return [m.group(1) for m in HASHTAG_RE.finditer(text.lower())]


def preprocess(text, stopwords=None) -> TokenStream:
    """lowercase, drop URLs, pull out hashtags, keep letters, split, drop
    stopwords, stem (stems that land on a stopword are dropped too)."""
    stop = default_stopwords() if stopwords is None else stopwords
    t = text.lower()
    t = URL_RE.sub(" ", t)
    tags = tuple(m.group(1) for m in HASHTAG_RE.finditer(t))
    t = HASHTAG_RE.sub(" ", t)
    t = t.replace("'", "").replace("’", "")
    t = NON_LETTER_RE.sub(" ", t)
    out = []
    for w in t.split():
        if w in stop:
            continue
        s = stem(w)
        if s not in stop:
            out.append(s)
    return TokenStream(tuple(out), tags)


def ascii_letter_ratio(text):
    """Share of ASCII letters among all alphabetic characters (0 if none)."""
    letters = [c for c in text if c.isalpha()]
    if not letters:
        return 0.0
    return sum(c.isascii() for c in letters) / len(letters)


def is_english_like(text, threshold=0.5):
    return ascii_letter_ratio(text) >= threshold
