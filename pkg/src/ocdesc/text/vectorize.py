"""tf-idf features over a document-frequency vocabulary."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .preprocess import TokenStream


def _tokens(doc):
    return doc.tokens if isinstance(doc, TokenStream) else tuple(doc)


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: tuple
    idf: np.ndarray
    n_docs: int

    @property
    def index(self):
        return {t: i for i, t in enumerate(self.vocabulary)}

    def to_dict(self):
        return {"vocabulary": list(self.vocabulary), "idf": self.idf.tolist(), "n_docs": self.n_docs}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["vocabulary"]), np.asarray(d["idf"], dtype=np.float64), int(d["n_docs"]))


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    oov_only: bool = False


def fit_vectorizer(corpus, max_vocab=500) -> TfidfModel:
    """Keep the ``max_vocab`` terms with the highest document frequency (ties
    lexicographic); ``idf = ln((1 + N) / (1 + df)) + 1``."""
    docs = [_tokens(d) for d in corpus]
    if not docs:
        raise InputError("cannot fit a vectorizer on an empty corpus")
    if max_vocab < 1:
        raise InputError("max_vocab must be at least 1")
    df = Counter()
    for d in docs:
        df.update(set(d))
    vocab = sorted(df, key=lambda t: (-df[t], t))[:max_vocab]
    n = len(docs)
    idf = np.array([math.log((1 + n) / (1 + df[t])) + 1.0 for t in vocab])
    return TfidfModel(tuple(vocab), idf, n)


def vectorize(model: TfidfModel, stream) -> FeatureVector:
    """Raw term counts times idf, L2-normalized; all-OOV input gives a flagged zero vector."""
    idx = model.index
    v = np.zeros(len(model.vocabulary))
    for t, c in Counter(_tokens(stream)).items():
        j = idx.get(t)
        if j is not None:
            v[j] = c * model.idf[j]
    norm = np.linalg.norm(v)
    if norm == 0:
        return FeatureVector(v, oov_only=True)
    return FeatureVector(v / norm)


def vectorize_corpus(model: TfidfModel, corpus):
    """``(D, N)`` feature matrix with one column per document."""
    return np.column_stack([vectorize(model, d).values for d in corpus]) if corpus else \
        np.zeros((len(model.vocabulary), 0))
