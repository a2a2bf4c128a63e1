"""Labeled corpora: JSON-lines records, class balancing, stratified splits."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataError
from .textproc import round_half_up

RECORD_FIELDS = ("id", "text", "label")


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: str


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(d.label for d in self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def by_label(self) -> dict[str, list[Document]]:
        groups: dict[str, list[Document]] = {}
        for doc in self.documents:
            groups.setdefault(doc.label, []).append(doc)
        return groups


@dataclass(frozen=True)
class Split:
    train: Corpus
    test: Corpus


def load_records(path: str | Path) -> Corpus:
    """Read a UTF-8 JSON-lines corpus: one object per line with keys
    ``id``, ``text``, ``label``.

    Raises DataError for a missing file, a malformed line (reported with
    its line number) or a duplicate id.
    """
    p = Path(path)
    if not p.is_file():
        raise DataError(f"corpus file not found: {p}")
    docs: list[Document] = []
    seen: set[str] = set()
    with open(p, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{p}: line {lineno}: invalid record: {exc}") from exc
            if not isinstance(rec, dict):
                raise DataError(f"{p}: line {lineno}: record is not an object")
            missing = [f for f in RECORD_FIELDS if f not in rec]
            if missing:
                raise DataError(f"{p}: line {lineno}: missing fields {missing}")
            bad = [f for f in RECORD_FIELDS if not isinstance(rec[f], str)]
            if bad:
                raise DataError(f"{p}: line {lineno}: non-string fields {bad}")
            if not rec["id"]:
                raise DataError(f"{p}: line {lineno}: empty id")
            if rec["id"] in seen:
                raise DataError(f"{p}: line {lineno}: duplicate id {rec['id']!r}")
            seen.add(rec["id"])
            docs.append(Document(id=rec["id"], text=rec["text"], label=rec["label"]))
    return Corpus(tuple(docs))


def save_records(documents: Iterable[Document], path: str | Path) -> None:
    """Write documents in the JSON-lines record format, one per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps({"id": doc.id, "text": doc.text, "label": doc.label}))
            fh.write("\n")


def balance_by_label(corpus: Corpus, seed: int) -> Corpus:
    """Downsample every class to the size of the smallest one.

    Per-class subsampling is uniform without replacement and deterministic
    given the seed; surviving documents keep their original corpus order.
    """
    if not corpus.documents:
        raise ValueError("cannot balance an empty corpus")
    groups: dict[str, list[int]] = {}
    for i, doc in enumerate(corpus.documents):
        groups.setdefault(doc.label, []).append(i)
    target = min(len(idxs) for idxs in groups.values())
    rng = np.random.default_rng(seed)
    keep: set[int] = set()
    for label in sorted(groups):
        idxs = groups[label]
        chosen = rng.choice(len(idxs), size=target, replace=False)
        keep.update(idxs[int(i)] for i in chosen)
    return Corpus(tuple(d for i, d in enumerate(corpus.documents) if i in keep))


def split_corpus(corpus: Corpus, train_fraction: float = 0.8, seed: int = 0) -> Split:
    """Stratified train/test partition.

    Per label, round_half_up(train_fraction * n_label) documents go to the
    train side; both sides keep original corpus order. Deterministic given
    the seed, and train/test ids are always disjoint.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if not corpus.documents:
        raise ValueError("cannot split an empty corpus")
    groups: dict[str, list[int]] = {}
    for i, doc in enumerate(corpus.documents):
        groups.setdefault(doc.label, []).append(i)
    rng = np.random.default_rng(seed)
    train_idx: set[int] = set()
    for label in sorted(groups):
        idxs = groups[label]
        n_train = round_half_up(train_fraction * len(idxs))
        perm = rng.permutation(len(idxs))
        train_idx.update(idxs[int(i)] for i in perm[:n_train])
    train = tuple(d for i, d in enumerate(corpus.documents) if i in train_idx)
    test = tuple(d for i, d in enumerate(corpus.documents) if i not in train_idx)
    return Split(train=Corpus(train), test=Corpus(test))
