"""Two-stage gibberish classification for reconstruction predictions.

Stage one is a statistical nonsense detector: a character-trigram
log-probability model with add-one smoothing over a fixed alphabet
(lowercase letters plus space), trained on reference text, combined with
two repetition rules (a word or a punctuation character repeated too many
times in a row). Stage two, consulted only when the detector stays
silent, is the word-overlap rule: a prediction counts as gibberish when
it shares at most ``max_overlap_pct`` percent of the original sentence's
unique words.

The detector threshold is calibrated at training time so that at most a
configured fraction of held-out reference sentences would be flagged.
"""

from __future__ import annotations

import json
import math
import re
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .textproc import tokenize, unique_words

ALPHABET = "abcdefghijklmnopqrstuvwxyz "
_N_SYMBOLS = len(ALPHABET)
_CHAR_TO_INDEX = {c: i for i, c in enumerate(ALPHABET)}
_PUNCT_CLASS = "([" + re.escape(string.punctuation) + "])"

DEFAULT_OVERLAP_PCT = 20.0
DEFAULT_REPEAT_LIMIT = 3
DEFAULT_FP_BUDGET = 0.01


@dataclass(frozen=True)
class GibberishParams:
    """Knobs of the combined classifier.

    max_overlap_pct: overlap percentages at or below this are gibberish.
    score_threshold: trigram cutoff; None means use the detector's
        calibrated value.
    repeat_limit: consecutive repeats of a word or punctuation character
        at or above this trigger the detector.
    """

    max_overlap_pct: float = DEFAULT_OVERLAP_PCT
    score_threshold: float | None = None
    repeat_limit: int = DEFAULT_REPEAT_LIMIT

    def __post_init__(self) -> None:
        if not 0.0 <= self.max_overlap_pct <= 100.0:
            raise ValueError(f"max_overlap_pct must be in [0, 100], got {self.max_overlap_pct}")
        if self.repeat_limit < 2:
            raise ValueError(f"repeat_limit must be >= 2, got {self.repeat_limit}")


def _char_indices(text: str) -> np.ndarray:
    """Lowercase, map out-of-alphabet characters to space, collapse runs
    of spaces, strip; return alphabet indices."""
    mapped = "".join(c if c in _CHAR_TO_INDEX else " " for c in text.lower())
    collapsed = " ".join(mapped.split())
    return np.array([_CHAR_TO_INDEX[c] for c in collapsed], dtype=np.intp)


@dataclass
class TrigramDetector:
    """Character-trigram model plus its calibrated score threshold."""

    counts: np.ndarray  # (27, 27, 27) trigram counts from the reference text
    log_prob: np.ndarray  # log P(c3 | c1 c2), add-one smoothed
    calibrated_theta: float
    fp_budget: float
    n_reference: int

    def score(self, text: str) -> float:
        """Mean per-character trigram log-probability.

        Texts with fewer than three in-alphabet characters carry no
        evidence and score 0.0, which never falls below a calibrated
        threshold.
        """
        idx = _char_indices(text)
        if len(idx) < 3:
            return 0.0
        logs = self.log_prob[idx[:-2], idx[1:-1], idx[2:]]
        return float(logs.mean())

    def is_gibberish(
        self,
        text: str,
        score_threshold: float | None = None,
        repeat_limit: int = DEFAULT_REPEAT_LIMIT,
    ) -> bool:
        """True when the trigram score falls below the threshold or either
        repetition rule fires."""
        theta = self.calibrated_theta if score_threshold is None else score_threshold
        if self.score(text) < theta:
            return True
        if _has_word_run(text, repeat_limit):
            return True
        return _has_punct_run(text, repeat_limit)


def _has_word_run(text: str, limit: int) -> bool:
    run = 0
    previous = None
    for token in tokenize(text):
        word = token.normalized
        if word and word == previous:
            run += 1
        else:
            run = 1 if word else 0
        previous = word or None
        if word and run >= limit:
            return True
    return False


def _has_punct_run(text: str, limit: int) -> bool:
    return re.search(_PUNCT_CLASS + "\\1{" + str(limit - 1) + ",}", text) is not None


def _count_trigrams(texts: Iterable[str]) -> np.ndarray:
    counts = np.zeros((_N_SYMBOLS, _N_SYMBOLS, _N_SYMBOLS), dtype=np.int64)
    for text in texts:
        idx = _char_indices(text)
        if len(idx) >= 3:
            np.add.at(counts, (idx[:-2], idx[1:-1], idx[2:]), 1)
    return counts


def _smoothed_log_prob(counts: np.ndarray) -> np.ndarray:
    context_totals = counts.sum(axis=2, keepdims=True)
    return np.log(counts + 1.0) - np.log(context_totals + _N_SYMBOLS)


def train_detector(
    reference_texts: Sequence[str],
    fp_budget: float = DEFAULT_FP_BUDGET,
    holdout_every: int = 10,
) -> TrigramDetector:
    """Train the trigram table and calibrate its threshold.

    Every ``holdout_every``-th reference sentence is held out of the
    table and used only for calibration: the threshold is set at the
    ``fp_budget`` quantile of held-out scores, so at most that fraction of
    natural reference text would be flagged by the trigram rule. A
    reference of at least ~100 sentences is recommended; tiny references
    calibrate on themselves.
    """
    texts = list(reference_texts)
    if not texts:
        raise ValueError("empty reference corpus")
    if not 0.0 <= fp_budget < 1.0:
        raise ValueError(f"fp_budget must be in [0, 1), got {fp_budget}")
    holdout = [t for i, t in enumerate(texts) if (i + 1) % holdout_every == 0]
    fitted = [t for i, t in enumerate(texts) if (i + 1) % holdout_every != 0]
    if not fitted:
        fitted = texts
    if not holdout:
        holdout = texts
    counts = _count_trigrams(fitted)
    log_prob = _smoothed_log_prob(counts)
    detector = TrigramDetector(
        counts=counts,
        log_prob=log_prob,
        calibrated_theta=-math.inf,
        fp_budget=fp_budget,
        n_reference=len(texts),
    )
    scores = sorted(detector.score(t) for t in holdout)
    k = min(int(math.floor(fp_budget * len(scores))), len(scores) - 1)
    detector.calibrated_theta = scores[k]
    return detector


def word_overlap_pct(original_text: str, predicted_text: str) -> float:
    """Percentage of the original sentence's unique words that also occur
    in the prediction. Undefined (raises) when the original has no
    non-mask words."""
    original_words = unique_words(tokenize(original_text))
    if not original_words:
        raise ValueError("original sentence has no non-mask words; overlap is undefined")
    predicted_words = unique_words(tokenize(predicted_text))
    return 100.0 * len(original_words & predicted_words) / len(original_words)


def overlap_gibberish(original_text: str, predicted_text: str, max_overlap_pct: float) -> bool:
    """Word-overlap rule: gibberish when the prediction retains at most
    ``max_overlap_pct`` percent of the original's unique words."""
    return word_overlap_pct(original_text, predicted_text) <= max_overlap_pct


def is_gibberish(
    original_text: str,
    predicted_text: str,
    params: GibberishParams,
    detector: TrigramDetector,
) -> bool:
    """Combined verdict: statistical detector first, overlap rule second."""
    if detector.is_gibberish(predicted_text, params.score_threshold, params.repeat_limit):
        return True
    return overlap_gibberish(original_text, predicted_text, params.max_overlap_pct)


FORMAT_TAG = "redacteval-detector"
FORMAT_VERSION = 1


def save_detector(detector: TrigramDetector, path: str | Path) -> None:
    """Persist the trigram table (nonzero counts) and calibration."""
    header = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "theta": detector.calibrated_theta,
        "fp_budget": detector.fp_budget,
        "n_reference": detector.n_reference,
    }
    i, j, k = np.nonzero(detector.counts)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for a, b, c in zip(i, j, k):
            fh.write(f"{a} {b} {c} {detector.counts[a, b, c]}\n")


def load_detector(path: str | Path) -> TrigramDetector:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"detector file not found: {p}")
    counts = np.zeros((_N_SYMBOLS, _N_SYMBOLS, _N_SYMBOLS), dtype=np.int64)
    with open(p, encoding="utf-8") as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError as exc:
            raise DataError(f"{p}: bad detector header: {exc}") from exc
        if header.get("format") != FORMAT_TAG or header.get("version") != FORMAT_VERSION:
            raise DataError(f"{p}: not a {FORMAT_TAG} v{FORMAT_VERSION} file")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise DataError(f"{p}: line {lineno}: expected 'i j k count'")
            a, b, c, n = (int(x) for x in parts)
            counts[a, b, c] = n
    return TrigramDetector(
        counts=counts,
        log_prob=_smoothed_log_prob(counts),
        calibrated_theta=float(header["theta"]),
        fp_budget=float(header["fp_budget"]),
        n_reference=int(header["n_reference"]),
    )
