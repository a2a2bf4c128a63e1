"""The category-inference adversary: multinomial logistic regression over
TFIDF features, trained by deterministic full-batch gradient descent.

Training minimizes mean cross-entropy of softmax(Wx + b) plus an L2
penalty (l2/2)*||W||^2 from zero initialization, with backtracking step
halving so the recorded loss is non-increasing across accepted steps.
Reproducibility is deliberately favored over speed at the corpus sizes
this toolkit targets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError
from .redactor import RedactedDocument, render
from .tfidf import TfidfModel, to_dense, transform

_MIN_STEP = 1e-12


@dataclass
class LogRegModel:
    weights: np.ndarray  # (n_classes, n_features)
    bias: np.ndarray  # (n_classes,)
    classes: tuple[str, ...]
    l2: float
    loss_history: tuple[float, ...] = field(default=(), repr=False)


def _as_matrix(
    features: Sequence[Mapping[int, float]] | np.ndarray, n_features: int | None
) -> np.ndarray:
    if isinstance(features, np.ndarray):
        if features.ndim != 2:
            raise ValueError("feature array must be 2-D")
        return features.astype(float, copy=False)
    if n_features is None:
        raise ValueError("n_features is required when passing sparse feature mappings")
    out = np.zeros((len(features), n_features))
    for r, vec in enumerate(features):
        for i, v in vec.items():
            out[r, i] = v
    return out


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def softmax(scores: np.ndarray) -> np.ndarray:
    return np.exp(_log_softmax(scores))


def _loss_and_grads(
    weights: np.ndarray, bias: np.ndarray, x: np.ndarray, onehot: np.ndarray, l2: float
) -> tuple[float, np.ndarray, np.ndarray]:
    n = x.shape[0]
    log_p = _log_softmax(x @ weights.T + bias)
    loss = -float((onehot * log_p).sum()) / n + 0.5 * l2 * float((weights**2).sum())
    residual = np.exp(log_p) - onehot
    grad_w = residual.T @ x / n + l2 * weights
    grad_b = residual.mean(axis=0)
    return loss, grad_w, grad_b


def train(
    features: Sequence[Mapping[int, float]] | np.ndarray,
    labels: Sequence[str],
    l2: float = 1e-4,
    max_epochs: int = 500,
    step: float = 1.0,
    tol: float = 1e-6,
    n_features: int | None = None,
) -> LogRegModel:
    """Fit the classifier. Deterministic: zero init, full-batch descent,
    stopping at ``tol`` on the gradient norm or after ``max_epochs``
    accepted steps.

    Raises ValueError for a single-class label set, mismatched lengths, or
    a non-finite loss (step too large / bad features) - reported rather
    than silently repaired.
    """
    x = _as_matrix(features, n_features)
    if x.shape[0] != len(labels):
        raise ValueError(f"{x.shape[0]} feature rows but {len(labels)} labels")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ValueError(f"need at least two distinct labels, got {classes}")
    class_index = {c: i for i, c in enumerate(classes)}
    onehot = np.zeros((len(labels), len(classes)))
    for r, label in enumerate(labels):
        onehot[r, class_index[label]] = 1.0

    weights = np.zeros((len(classes), x.shape[1]))
    bias = np.zeros(len(classes))
    loss, grad_w, grad_b = _loss_and_grads(weights, bias, x, onehot, l2)
    if not np.isfinite(loss):
        raise ValueError("non-finite training loss at initialization; check features")
    history = [loss]
    alpha = step
    for _ in range(max_epochs):
        grad_norm = float(np.sqrt((grad_w**2).sum() + (grad_b**2).sum()))
        if grad_norm <= tol:
            break
        while True:
            cand_w = weights - alpha * grad_w
            cand_b = bias - alpha * grad_b
            cand_loss, cand_gw, cand_gb = _loss_and_grads(cand_w, cand_b, x, onehot, l2)
            if not np.isfinite(cand_loss):
                raise ValueError(
                    f"non-finite training loss at step size {alpha}; step too large"
                )
            if cand_loss <= loss:
                weights, bias = cand_w, cand_b
                loss, grad_w, grad_b = cand_loss, cand_gw, cand_gb
                history.append(loss)
                break
            alpha /= 2.0
            if alpha < _MIN_STEP:
                break
        if alpha < _MIN_STEP:
            break
    return LogRegModel(
        weights=weights, bias=bias, classes=classes, l2=l2, loss_history=tuple(history)
    )


def predict(model: LogRegModel, x: Mapping[int, float] | np.ndarray) -> str:
    """Argmax class of Wx + b; ties go to the lowest class index."""
    if not isinstance(x, np.ndarray):
        x = to_dense(x, model.weights.shape[1])
    if x.shape != (model.weights.shape[1],):
        raise ValueError(
            f"feature vector has shape {x.shape}, model expects ({model.weights.shape[1]},)"
        )
    scores = model.weights @ x + model.bias
    return model.classes[int(np.argmax(scores))]


def attack_accuracy(
    model: LogRegModel,
    tfidf_model: TfidfModel,
    redacted_docs: Sequence[tuple[RedactedDocument, str]],
) -> float:
    """Fraction of redacted documents whose category is predicted
    correctly. Mask symbols are out-of-vocabulary and contribute nothing."""
    if not redacted_docs:
        raise ValueError("need at least one redacted document")
    hits = sum(
        1
        for redacted, label in redacted_docs
        if predict(model, transform(tfidf_model, render(redacted))) == label
    )
    return hits / len(redacted_docs)


FORMAT_TAG = "redacteval-logreg"
FORMAT_VERSION = 1


def save_model(model: LogRegModel, path: str | Path) -> None:
    header = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "l2": model.l2,
        "n_classes": len(model.classes),
        "n_features": model.weights.shape[1],
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        fh.write("classes\t" + "\t".join(model.classes) + "\n")
        for row in model.weights:
            fh.write("w\t" + "\t".join(repr(float(v)) for v in row) + "\n")
        fh.write("b\t" + "\t".join(repr(float(v)) for v in model.bias) + "\n")


def load_model(path: str | Path) -> LogRegModel:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"classifier file not found: {p}")
    with open(p, encoding="utf-8") as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError as exc:
            raise DataError(f"{p}: bad classifier header: {exc}") from exc
        if header.get("format") != FORMAT_TAG or header.get("version") != FORMAT_VERSION:
            raise DataError(f"{p}: not a {FORMAT_TAG} v{FORMAT_VERSION} file")
        classes: tuple[str, ...] = ()
        rows: list[list[float]] = []
        bias: list[float] = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            tag, *values = line.rstrip("\n").split("\t")
            if tag == "classes":
                classes = tuple(values)
            elif tag == "w":
                rows.append([float(v) for v in values])
            elif tag == "b":
                bias = [float(v) for v in values]
            else:
                raise DataError(f"{p}: line {lineno}: unknown row tag {tag!r}")
    if len(classes) != header["n_classes"] or len(rows) != header["n_classes"]:
        raise DataError(f"{p}: class/weight row count mismatch")
    return LogRegModel(
        weights=np.array(rows),
        bias=np.array(bias),
        classes=classes,
        l2=float(header["l2"]),
    )
