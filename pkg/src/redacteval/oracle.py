"""Reconstruction oracles: ranked full-text completions of redacted text.

Three backends share one contract (``reconstruct``):

* ``UnigramOracle`` — a model-free stub for tests and synthetic sweeps.
  Every mask slot is filled by a seeded draw from the training-corpus
  unigram distribution; a prediction's confidence is the geometric mean
  of its drawn word probabilities. Distinct completions are collected by
  rejection, capped at 50x the requested count.
* ``ReplayOracle`` — verbatim playback of a recorded fixture file, keyed
  by the exact redacted string, for byte-exact tests.
* ``TransformerOracle`` — an adapter around an external fill-mask model
  loaded by dotted name; scores are treated as opaque ranks.

Predictions are always sorted by non-increasing confidence, contain no
mask symbol, and a backend may return fewer than requested (the shortfall
is visible via ``n_requested``).
"""

from __future__ import annotations

import hashlib
import importlib
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence, runtime_checkable

import numpy as np

from .corpus import Document
from .errors import ConfigError, DataError
from .textproc import MASK_TOKEN, tokenize

OVERSAMPLE_FACTOR = 50


@dataclass(frozen=True)
class Prediction:
    text: str
    confidence: float

    def __post_init__(self) -> None:
        if MASK_TOKEN in self.text:
            raise ValueError(f"prediction text still contains the mask symbol: {self.text!r}")
        if self.confidence < 0:
            raise ValueError(f"confidence must be >= 0, got {self.confidence}")


@dataclass(frozen=True)
class ReconstructionSet:
    redacted_text: str
    predictions: tuple[Prediction, ...]
    n_requested: int

    def __post_init__(self) -> None:
        if len(self.predictions) > self.n_requested:
            raise ValueError("more predictions than requested")
        confs = [p.confidence for p in self.predictions]
        if any(a < b for a, b in zip(confs, confs[1:])):
            raise ValueError("predictions must be sorted by non-increasing confidence")


@runtime_checkable
class ReconstructionOracle(Protocol):
    """Backend contract. ``single_flight`` declares whether concurrent
    reconstruct calls must be serialized by the caller."""

    single_flight: bool

    def reconstruct(self, redacted_text: str, n: int = 100) -> ReconstructionSet: ...


def _call_seed(seed: int, redacted_text: str) -> int:
    digest = hashlib.sha256(f"{seed}\x1f{redacted_text}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


@dataclass
class UnigramOracle:
    """Seeded unigram fill-in stub fitted on a training corpus."""

    words: tuple[str, ...]
    probs: np.ndarray
    seed: int
    single_flight: bool = field(default=False, repr=False)

    @classmethod
    def fit(cls, documents: Sequence[Document], seed: int = 0) -> "UnigramOracle":
        counts: Counter[str] = Counter()
        for doc in documents:
            counts.update(
                t.normalized for t in tokenize(doc.text) if not t.is_mask and t.normalized
            )
        if not counts:
            raise DataError("training corpus has no words to fit the unigram oracle on")
        words = tuple(sorted(counts))
        total = sum(counts.values())
        probs = np.array([counts[w] / total for w in words])
        return cls(words=words, probs=probs, seed=seed)

    def reconstruct(self, redacted_text: str, n: int = 100) -> ReconstructionSet:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        tokens = tokenize(redacted_text)
        surfaces = [t.surface for t in tokens]
        slots = [i for i, t in enumerate(tokens) if t.is_mask]
        if not slots:
            only = Prediction(text=" ".join(surfaces), confidence=1.0)
            return ReconstructionSet(redacted_text, (only,), n)

        rng = np.random.default_rng(_call_seed(self.seed, redacted_text))
        log_probs = np.log(self.probs)
        cap = OVERSAMPLE_FACTOR * n
        chunk = max(2 * n, 64)
        found: dict[tuple[int, ...], float] = {}
        drawn = 0
        while drawn < cap and len(found) < n:
            size = min(chunk, cap - drawn)
            rows = rng.choice(len(self.words), size=(size, len(slots)), p=self.probs)
            drawn += size
            for row in rows:
                key = tuple(int(i) for i in row)
                if key in found:
                    continue
                found[key] = float(np.exp(log_probs[list(key)].mean()))
                if len(found) == n:
                    break

        predictions = []
        for key, confidence in found.items():
            filled = list(surfaces)
            for slot, word_idx in zip(slots, key):
                filled[slot] = self.words[word_idx]
            predictions.append(Prediction(text=" ".join(filled), confidence=confidence))
        predictions.sort(key=lambda p: (-p.confidence, p.text))
        return ReconstructionSet(redacted_text, tuple(predictions), n)


@dataclass
class ReplayOracle:
    """Plays back recorded predictions keyed by the exact redacted string."""

    table: dict[str, tuple[Prediction, ...]]
    single_flight: bool = field(default=False, repr=False)

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayOracle":
        """Load a JSON-lines fixture with keys redacted_text, rank,
        prediction_text, confidence. Rows for one key must already be
        ranked with non-increasing confidence; they are played back
        verbatim."""
        p = Path(path)
        if not p.is_file():
            raise DataError(f"replay fixture not found: {p}")
        rows: dict[str, list[tuple[int, Prediction]]] = {}
        with open(p, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    key = rec["redacted_text"]
                    rank = int(rec["rank"])
                    pred = Prediction(
                        text=rec["prediction_text"], confidence=float(rec["confidence"])
                    )
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise DataError(f"{p}: line {lineno}: bad fixture row: {exc}") from exc
                rows.setdefault(key, []).append((rank, pred))
        table: dict[str, tuple[Prediction, ...]] = {}
        for key, ranked in rows.items():
            ranked.sort(key=lambda rp: rp[0])
            preds = tuple(pred for _, pred in ranked)
            confs = [pr.confidence for pr in preds]
            if any(a < b for a, b in zip(confs, confs[1:])):
                raise DataError(
                    f"{p}: fixture rows for {key!r} are not in non-increasing confidence order"
                )
            table[key] = preds
        return cls(table=table)

    def reconstruct(self, redacted_text: str, n: int = 100) -> ReconstructionSet:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if redacted_text not in self.table:
            raise DataError(f"replay fixture has no entry for redacted text {redacted_text!r}")
        return ReconstructionSet(redacted_text, self.table[redacted_text][:n], n)


BackendFn = Callable[[str, int], Sequence[tuple[str, float]]]


@dataclass
class TransformerOracle:
    """Adapter around an external reconstruction backend.

    The backend callable takes (redacted_text, n) and returns up to n
    (text, score) pairs, best first. Scores are opaque ranks: when a
    backend emits a negative score the whole list is re-scored by rank
    (1/(rank+1)) to keep confidences non-negative. Completions that still
    contain the mask symbol are dropped, shortening the returned set.
    """

    backend: BackendFn
    name: str = "transformer"
    single_flight: bool = True

    @classmethod
    def load(cls, spec: str, **options) -> "TransformerOracle":
        """Instantiate from a dotted ``module:factory`` name. The factory
        is called with ``options`` and must return a backend callable."""
        module_name, _, attr = spec.partition(":")
        if not module_name or not attr:
            raise ConfigError(f"transformer backend must be 'module:factory', got {spec!r}")
        try:
            module = importlib.import_module(module_name)
            factory = getattr(module, attr)
        except (ImportError, AttributeError) as exc:
            raise ConfigError(f"cannot load transformer backend {spec!r}: {exc}") from exc
        return cls(backend=factory(**options), name=spec)

    def reconstruct(self, redacted_text: str, n: int = 100) -> ReconstructionSet:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        pairs = list(self.backend(redacted_text, n))
        pairs.sort(key=lambda ts: -ts[1])
        if any(score < 0 for _, score in pairs):
            pairs = [(text, 1.0 / (rank + 1)) for rank, (text, _) in enumerate(pairs)]
        predictions = tuple(
            Prediction(text=text, confidence=float(score))
            for text, score in pairs
            if MASK_TOKEN not in text
        )[:n]
        return ReconstructionSet(redacted_text, predictions, n)


def huggingface_backend(
    model_name: str = "facebook/bart-base", device: str = "cpu", num_beams: int | None = None
) -> BackendFn:
    """Optional real-model backend factory (requires ``transformers`` and
    ``torch`` plus downloaded weights; never used by the test suite)."""
    try:
        import torch
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
    except ImportError as exc:  # pragma: no cover - environment dependent
        raise ConfigError(f"huggingface backend unavailable: {exc}") from exc

    tokenizer = AutoTokenizer.from_pretrained(model_name)
    model = AutoModelForSeq2SeqLM.from_pretrained(model_name).to(device).eval()

    def backend(redacted_text: str, n: int) -> list[tuple[str, float]]:  # pragma: no cover
        inputs = tokenizer(redacted_text, return_tensors="pt").to(device)
        with torch.no_grad():
            out = model.generate(
                **inputs,
                num_beams=max(n, num_beams or n),
                num_return_sequences=n,
                output_scores=True,
                return_dict_in_generate=True,
                max_new_tokens=64,
            )
        texts = tokenizer.batch_decode(out.sequences, skip_special_tokens=True)
        scores = torch.exp(out.sequences_scores).tolist()
        return list(zip(texts, scores))

    return backend


def build_oracle(
    name: str,
    options: dict[str, str],
    train_documents: Sequence[Document] | None = None,
    seed: int = 0,
) -> ReconstructionOracle:
    """Construct a backend by name: unigram | replay | transformer."""
    if name == "unigram":
        if train_documents is None:
            raise ConfigError("unigram oracle needs a training corpus")
        return UnigramOracle.fit(train_documents, seed=seed)
    if name == "replay":
        fixture = options.get("fixture")
        if not fixture:
            raise DataError("replay oracle requires an oracle option fixture=<path>")
        return ReplayOracle.from_file(fixture)
    if name == "transformer":
        spec = options.get("backend")
        if not spec:
            raise ConfigError(
                "transformer oracle requires an oracle option backend=module:factory"
            )
        extra = {k: v for k, v in options.items() if k != "backend"}
        return TransformerOracle.load(spec, **extra)
    raise ConfigError(f"unknown oracle backend {name!r} (expected unigram, replay or transformer)")
