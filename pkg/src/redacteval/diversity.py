"""Exploratory crowd-size estimate: how many distinct reconstructions
hide behind one redacted text.

Non-gibberish predictions are embedded and clustered by single-linkage
with a cosine-distance threshold; the cluster count is the estimate. The
default embedding is the document's TFIDF vector, which needs no model
weights; any unit-vector embedder can be plugged in behind the same
contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Document
from .gibberish import GibberishParams, TrigramDetector, is_gibberish
from .oracle import Prediction, ReconstructionSet
from .tfidf import TfidfModel, to_dense, transform

DEFAULT_TAU = 0.3


@dataclass(frozen=True)
class EmbeddingConfig:
    backend: str = "tfidf"
    dimension: int | None = None
    tau: float = DEFAULT_TAU

    def __post_init__(self) -> None:
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")


class TfidfEmbedder:
    """Unit-norm dense TFIDF embedding; all-OOV texts map to the zero
    vector and are reported as un-embeddable."""

    def __init__(self, model: TfidfModel):
        self.model = model
        self.dimension = model.n_features

    def embed(self, text: str) -> np.ndarray:
        return to_dense(transform(self.model, text), self.dimension)

    def can_embed(self, text: str) -> bool:
        return bool(transform(self.model, text))


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cosine similarity, extended to zero vectors: two zero vectors
    are identical (distance 0), a zero and a nonzero vector are maximally
    far (distance 1). Keeps duplicates co-clustered even when
    un-embeddable."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 and nv == 0.0:
        return 0.0
    if nu == 0.0 or nv == 0.0:
        return 1.0
    return 1.0 - float(u @ v) / (nu * nv)


def cluster_count(vectors: list[np.ndarray], tau: float) -> int:
    """Single-linkage threshold clustering: merge while the minimum
    pairwise cosine distance is below tau, then count clusters. Equivalent
    to counting connected components of the distance < tau graph."""
    n = len(vectors)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if cosine_distance(vectors[i], vectors[j]) < tau:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def surviving_predictions(
    recs: ReconstructionSet,
    original: Document,
    params: GibberishParams,
    detector: TrigramDetector,
) -> list[Prediction]:
    """Predictions that pass the gibberish filter."""
    return [
        p
        for p in recs.predictions
        if not is_gibberish(original.text, p.text, params, detector)
    ]


def estimate_k(
    recs: ReconstructionSet,
    original: Document,
    params: GibberishParams,
    detector: TrigramDetector,
    embedder: TfidfEmbedder,
    tau: float = DEFAULT_TAU,
) -> int:
    """Cluster count over the surviving predictions; 0 when none survive."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    survivors = surviving_predictions(recs, original, params, detector)
    if not survivors:
        return 0
    vectors = [embedder.embed(p.text) for p in survivors]
    return cluster_count(vectors, tau)
