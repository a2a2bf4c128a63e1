"""Bag-of-words TFIDF with a document-frequency floor.

The fitted vocabulary keeps normalized words whose document frequency is
at least ``min_df`` of the fitted corpus, minus stopwords and the mask
symbol. Weights are raw in-document term counts times
``idf(t) = ln(N / df(t)) + 1``, L2-normalized per document. The same
vocabulary drives redaction eligibility, the attacker's features and the
default sentence embedding, so the exact variant matters and is pinned
here rather than configurable.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document
from .errors import DataError
from .textproc import MASK_TOKEN, tokenize, unique_words

FORMAT_TAG = "redacteval-tfidf"
FORMAT_VERSION = 1

# Small built-in English list; redaction eligibility excludes these even
# when their document frequency clears the min_df floor.
DEFAULT_STOPWORDS = frozenset(
    """a about an and are as at be but by for from had has have he her his i if
    in is it its me my no not of on or our she so that the their them they this
    to was we were will with you your""".split()
)


@dataclass
class TfidfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    df: np.ndarray
    min_df: float
    stopwords: frozenset[str]
    n_docs_fitted: int

    @property
    def n_features(self) -> int:
        return len(self.vocabulary)

    def words(self) -> list[str]:
        """Vocabulary words in feature-index (lexicographic) order."""
        return sorted(self.vocabulary, key=self.vocabulary.__getitem__)


def fit(
    documents: Sequence[Document],
    min_df: float = 0.10,
    stopwords: Iterable[str] = DEFAULT_STOPWORDS,
) -> TfidfModel:
    """Fit vocabulary and idf weights on a document collection.

    Feature indices are assigned in lexicographic word order. Raises
    DataError when every word is filtered out, since then nothing would be
    eligible for redaction either.
    """
    if not documents:
        raise ValueError("need at least one document to fit")
    if not 0.0 < min_df <= 1.0:
        raise ValueError(f"min_df must be in (0, 1], got {min_df}")
    stop = frozenset(stopwords)
    df_counts: Counter[str] = Counter()
    for doc in documents:
        df_counts.update(unique_words(tokenize(doc.text)))
    n = len(documents)
    words = sorted(
        w
        for w, c in df_counts.items()
        if c / n >= min_df and w not in stop and w != MASK_TOKEN
    )
    if not words:
        raise DataError(
            "TFIDF vocabulary is empty after document-frequency and stopword "
            "filtering; no word would be eligible for redaction"
        )
    df = np.array([df_counts[w] for w in words], dtype=float)
    idf = np.log(n / df) + 1.0
    return TfidfModel(
        vocabulary={w: i for i, w in enumerate(words)},
        idf=idf,
        df=df,
        min_df=min_df,
        stopwords=stop,
        n_docs_fitted=n,
    )


def transform(model: TfidfModel, text: str) -> dict[int, float]:
    """Sparse L2-normalized tf-idf vector of ``text``.

    Out-of-vocabulary words (including the mask symbol) contribute
    nothing; an all-OOV text maps to the empty (zero) vector.
    """
    counts: Counter[str] = Counter(
        t.normalized
        for t in tokenize(text)
        if not t.is_mask and t.normalized in model.vocabulary
    )
    if not counts:
        return {}
    # fixed iteration order keeps the result bit-stable under word reordering
    vec = {
        model.vocabulary[w]: counts[w] * float(model.idf[model.vocabulary[w]])
        for w in sorted(counts)
    }
    norm = float(np.sqrt(sum(v * v for v in vec.values())))
    return {i: v / norm for i, v in vec.items()}


def transform_matrix(model: TfidfModel, texts: Sequence[str]) -> np.ndarray:
    """Dense (n_texts, n_features) matrix of transform() rows."""
    out = np.zeros((len(texts), model.n_features))
    for r, text in enumerate(texts):
        for i, v in transform(model, text).items():
            out[r, i] = v
    return out


def to_dense(vec: Mapping[int, float], n_features: int) -> np.ndarray:
    out = np.zeros(n_features)
    for i, v in vec.items():
        out[i] = v
    return out


def save_model(model: TfidfModel, path: str | Path) -> None:
    """Persist as a versioned flat file: header line, then word/df/idf rows."""
    header = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "min_df": model.min_df,
        "n_docs": model.n_docs_fitted,
        "stopwords": sorted(model.stopwords),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for w in model.words():
            i = model.vocabulary[w]
            fh.write(f"{w}\t{int(model.df[i])}\t{float(model.idf[i])!r}\n")


def load_model(path: str | Path) -> TfidfModel:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"tfidf model file not found: {p}")
    with open(p, encoding="utf-8") as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError as exc:
            raise DataError(f"{p}: bad model header: {exc}") from exc
        if header.get("format") != FORMAT_TAG or header.get("version") != FORMAT_VERSION:
            raise DataError(f"{p}: not a {FORMAT_TAG} v{FORMAT_VERSION} file")
        words: list[str] = []
        dfs: list[float] = []
        idfs: list[float] = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise DataError(f"{p}: line {lineno}: expected word/df/idf")
            words.append(parts[0])
            dfs.append(float(parts[1]))
            idfs.append(float(parts[2]))
    if words != sorted(words):
        raise DataError(f"{p}: vocabulary rows are not in lexicographic order")
    return TfidfModel(
        vocabulary={w: i for i, w in enumerate(words)},
        idf=np.array(idfs),
        df=np.array(dfs),
        min_df=float(header["min_df"]),
        stopwords=frozenset(header.get("stopwords", ())),
        n_docs_fitted=int(header["n_docs"]),
    )
