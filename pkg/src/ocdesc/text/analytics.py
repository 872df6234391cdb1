"""Keyword/hashtag frequencies and sentiment distributions."""
from __future__ import annotations

from collections import Counter

from ..errors import InputError
from .sentiment import polarity_class

CLASSES = ("positive", "negative", "neutral")


def _top(counter, k):
    if k < 1:
        raise InputError("k must be at least 1")
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:k]


def top_keywords(streams, k=20):
    """``(term, count)`` by descending count, ties in lexicographic order."""
    c = Counter()
    for s in streams:
        c.update(s.tokens)
    return _top(c, k)


def top_hashtags(streams, k=20):
    c = Counter()
    for s in streams:
        c.update(s.hashtags)
    return _top(c, k)


def distribution(classes):
    """Percentages (one decimal) of positive/negative/neutral labels."""
    n = len(classes)
    c = Counter(classes)
    return {k: round(100.0 * c.get(k, 0) / n, 1) for k in CLASSES}


def aggregate_sentiment(scores, group_keys=None):
    """Global distribution, or one per group key (groups without records omitted).

    ``scores`` may hold :class:`SentimentScore` objects or plain compound values.
    """
    classes = [s.klass if hasattr(s, "klass") else polarity_class(s) for s in scores]
    if group_keys is None:
        return distribution(classes) if classes else {}
    if len(group_keys) != len(classes):
        raise InputError(f"{len(group_keys)} group keys for {len(classes)} scores")
    groups = {}
    for k, c in zip(group_keys, classes):
        if k is None:
            continue
        groups.setdefault(k, []).append(c)
    return {k: distribution(v) for k, v in sorted(groups.items())}
