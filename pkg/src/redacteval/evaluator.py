"""The privacy metric, the redaction-level sweep, and report emission.

The privacy score of one document is the fraction of its top-N
reconstructions classified as gibberish; the corpus value is the
unweighted mean over documents that received at least one prediction.
A sweep fits TFIDF and trains the attacker once on the unredacted train
split, then walks the redaction grid over the test split, producing one
(privacy, attack accuracy) row per level plus per-document detail rows.

Per-document work is pure given (seed, doc.id), so the sweep may fan out
documents to worker threads; results are identical to sequential runs.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from threading import Lock
from typing import Callable, Iterable, Iterator, Sequence

from . import attacker, tfidf
from .corpus import Document, Split
from .diversity import TfidfEmbedder, estimate_k
from .errors import DataError
from .gibberish import GibberishParams, TrigramDetector, is_gibberish
from .oracle import ReconstructionOracle
from .redactor import RedactedDocument, redact, render, unmasked_text

logger = logging.getLogger(__name__)

REPORT_HEADER = "dataset,X,privacy_mean,attack_accuracy,n_docs,seed"
DETAIL_HEADER = "doc_id,X,score,n_predictions"
DETAIL_HEADER_WITH_K = DETAIL_HEADER + ",k_estimate"

DEFAULT_GRID = (0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0)


@dataclass(frozen=True)
class PrivacyScore:
    """Gibberish fraction over the predictions actually returned for one
    document; ``score * n_predictions`` is the gibberish count. A document
    with zero predictions carries score 0.0 and is excluded from
    aggregation."""

    doc_id: str
    score: float
    n_predictions: int


@dataclass(frozen=True)
class SweepRow:
    x_pct: float
    privacy_mean: float
    attack_accuracy: float
    n_docs: int
    seed: int


@dataclass(frozen=True)
class DetailRow:
    doc_id: str
    x_pct: float
    score: float
    n_predictions: int
    k_estimate: int | None = None


@dataclass(frozen=True)
class SweepPoint:
    row: SweepRow
    details: tuple[DetailRow, ...]


# Preprocessor slot: maps one test document to the units actually scored
# (e.g. a sentence splitter). None means identity - whole documents.
Preprocessor = Callable[[Document], Sequence[Document]]


@dataclass(frozen=True)
class SweepConfig:
    grid: tuple[float, ...] = DEFAULT_GRID
    n_predictions: int = 100
    seed: int = 0
    min_df: float = 0.10
    stopwords: frozenset[str] = tfidf.DEFAULT_STOPWORDS
    workers: int = 1
    original_as_reference: bool = True  # False: compare against mask-stripped redacted text
    estimate_diversity: bool = False
    tau: float = 0.3
    preprocessor: Preprocessor | None = None


@dataclass(frozen=True)
class AttackerConfig:
    l2: float = 1e-4
    max_epochs: int = 500
    step: float = 1.0
    tol: float = 1e-6


def privacy_score(
    original: Document,
    redacted: RedactedDocument,
    oracle: ReconstructionOracle,
    params: GibberishParams,
    detector: TrigramDetector,
    n: int = 100,
    original_as_reference: bool = True,
) -> PrivacyScore:
    """Score one (original, redacted) pair: reconstruct, classify each
    prediction, and average the gibberish indicator."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if original.id != redacted.doc_id:
        raise ValueError(f"document mismatch: {original.id!r} vs {redacted.doc_id!r}")
    recs = oracle.reconstruct(render(redacted), n)
    if not recs.predictions:
        return PrivacyScore(doc_id=original.id, score=0.0, n_predictions=0)
    reference = original.text if original_as_reference else unmasked_text(redacted)
    gib = sum(
        1 for p in recs.predictions if is_gibberish(reference, p.text, params, detector)
    )
    return PrivacyScore(
        doc_id=original.id, score=gib / len(recs.predictions), n_predictions=len(recs.predictions)
    )


def corpus_privacy(scores: Iterable[PrivacyScore]) -> float:
    """Unweighted mean over documents with at least one prediction."""
    included = [s.score for s in scores if s.n_predictions >= 1]
    if not included:
        raise DataError("every document was excluded (no oracle predictions)")
    return sum(included) / len(included)


def _serialized(oracle: ReconstructionOracle) -> ReconstructionOracle:
    if not getattr(oracle, "single_flight", False):
        return oracle
    lock = Lock()

    class _Gate:
        single_flight = False

        @staticmethod
        def reconstruct(redacted_text: str, n: int = 100):
            with lock:
                return oracle.reconstruct(redacted_text, n)

    return _Gate()


def run_sweep(
    split: Split,
    oracle: ReconstructionOracle,
    detector: TrigramDetector,
    params: GibberishParams,
    config: SweepConfig = SweepConfig(),
    attacker_config: AttackerConfig = AttackerConfig(),
) -> Iterator[SweepPoint]:
    """Walk the redaction grid, yielding one SweepPoint per level so the
    caller can flush partial results if a later level fails.

    TFIDF and the attacker are fitted once, on the unredacted train split.
    Attack accuracy at each level covers all test documents; the privacy
    mean covers those with at least one prediction (exclusions are logged).
    """
    if len(split.train.labels) < 2:
        raise DataError("attacker needs at least two classes in the train split")
    if not split.test.documents:
        raise DataError("test split is empty")
    for x in config.grid:
        if not 0.0 <= x <= 100.0:
            raise ValueError(f"grid levels must be in [0, 100], got {x}")

    model = tfidf.fit(split.train.documents, config.min_df, config.stopwords)
    train_features = tfidf.transform_matrix(model, [d.text for d in split.train.documents])
    clf = attacker.train(
        train_features,
        [d.label for d in split.train.documents],
        l2=attacker_config.l2,
        max_epochs=attacker_config.max_epochs,
        step=attacker_config.step,
        tol=attacker_config.tol,
    )
    embedder = TfidfEmbedder(model) if config.estimate_diversity else None
    oracle = _serialized(oracle)

    def score_one(doc: Document, x: float) -> tuple[RedactedDocument, PrivacyScore, int | None]:
        redacted = redact(doc, model, x, config.seed)
        ps = privacy_score(
            doc, redacted, oracle, params, detector,
            n=config.n_predictions, original_as_reference=config.original_as_reference,
        )
        k = None
        if embedder is not None:
            recs = oracle.reconstruct(render(redacted), config.n_predictions)
            k = estimate_k(recs, doc, params, detector, embedder, config.tau)
        return redacted, ps, k

    if config.preprocessor is None:
        docs: tuple[Document, ...] = split.test.documents
    else:
        expanded = [unit for doc in split.test.documents for unit in config.preprocessor(doc)]
        if len({d.id for d in expanded}) != len(expanded):
            raise DataError("preprocessor produced duplicate document ids")
        docs = tuple(expanded)
    for x in config.grid:
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                results = list(pool.map(lambda d: score_one(d, x), docs))
        else:
            results = [score_one(d, x) for d in docs]
        scores = [ps for _, ps, _ in results]
        excluded = sum(1 for ps in scores if ps.n_predictions == 0)
        if excluded:
            logger.warning("X=%s: %d documents returned no predictions", x, excluded)
        privacy_mean = corpus_privacy(scores)
        accuracy = attacker.attack_accuracy(
            clf, model, [(redacted, doc.label) for (redacted, _, _), doc in zip(results, docs)]
        )
        details = tuple(
            DetailRow(
                doc_id=ps.doc_id, x_pct=x, score=ps.score,
                n_predictions=ps.n_predictions, k_estimate=k,
            )
            for (_, ps, k) in results
        )
        yield SweepPoint(
            row=SweepRow(
                x_pct=x,
                privacy_mean=privacy_mean,
                attack_accuracy=accuracy,
                n_docs=len(scores) - excluded,
                seed=config.seed,
            ),
            details=details,
        )


def format_report_row(row: SweepRow, dataset: str) -> str:
    return (
        f"{dataset},{row.x_pct:.4f},{row.privacy_mean:.4f},"
        f"{row.attack_accuracy:.4f},{row.n_docs},{row.seed}"
    )


def format_detail_row(detail: DetailRow, include_k: bool) -> str:
    base = f"{detail.doc_id},{detail.x_pct:.4f},{detail.score:.4f},{detail.n_predictions}"
    if include_k:
        k = "" if detail.k_estimate is None else str(detail.k_estimate)
        return f"{base},{k}"
    return base


def write_report(rows: Sequence[SweepRow], path: str | Path, dataset: str = "dataset") -> None:
    """Plot-ready CSV: one row per grid level, fixed column order, four
    decimal places, locale-independent."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(REPORT_HEADER + "\n")
        for row in rows:
            fh.write(format_report_row(row, dataset) + "\n")


def write_details(
    details: Sequence[DetailRow], path: str | Path, include_k: bool = False
) -> None:
    """Companion per-document audit file."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write((DETAIL_HEADER_WITH_K if include_k else DETAIL_HEADER) + "\n")
        for detail in details:
            fh.write(format_detail_row(detail, include_k) + "\n")
