"""Random word redaction over the TFIDF-eligible positions of a document.

A redaction level of X percent masks round_half_up(X/100 * |eligible|)
positions, chosen uniformly without replacement. The random choice is a
prefix of one per-document permutation derived from (seed, doc.id), which
makes corpus runs order-independent and makes mask sets nested across
redaction levels for the same seed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .corpus import Document
from .textproc import MASK_TOKEN, Token, round_half_up, tokenize
from .tfidf import TfidfModel

_MASK = Token(surface=MASK_TOKEN, normalized=MASK_TOKEN, is_mask=True)


@dataclass(frozen=True)
class RedactedDocument:
    doc_id: str
    tokens: tuple[Token, ...]
    masked_positions: frozenset[int]
    x_pct: float


def document_seed(seed: int, doc_id: str) -> int:
    """Stable per-document RNG seed scoped by (run seed, document id)."""
    digest = hashlib.sha256(f"{seed}\x1f{doc_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


def eligible_positions(tokens: list[Token] | tuple[Token, ...], model: TfidfModel) -> list[int]:
    """Indices whose normalized word is in the model vocabulary, ascending."""
    return [
        i
        for i, t in enumerate(tokens)
        if not t.is_mask and t.normalized in model.vocabulary
    ]


def redact(doc: Document, model: TfidfModel, x_pct: float, seed: int) -> RedactedDocument:
    """Mask a random ``x_pct`` percent of the eligible words of ``doc``."""
    if not 0.0 <= x_pct <= 100.0:
        raise ValueError(f"redaction percentage must be in [0, 100], got {x_pct}")
    tokens = tuple(tokenize(doc.text))
    eligible = eligible_positions(tokens, model)
    n_masked = round_half_up(x_pct / 100.0 * len(eligible))
    if n_masked:
        rng = np.random.default_rng(document_seed(seed, doc.id))
        perm = rng.permutation(len(eligible))
        masked = frozenset(eligible[int(i)] for i in perm[:n_masked])
    else:
        masked = frozenset()
    new_tokens = tuple(_MASK if i in masked else t for i, t in enumerate(tokens))
    return RedactedDocument(
        doc_id=doc.id, tokens=new_tokens, masked_positions=masked, x_pct=x_pct
    )


def render(redacted: RedactedDocument) -> str:
    """The exact string handed to reconstruction oracles: surfaces joined
    by single spaces, masked positions shown as the mask symbol."""
    return " ".join(t.surface for t in redacted.tokens)


def unmasked_text(redacted: RedactedDocument) -> str:
    """Surfaces of the non-masked tokens, space-joined."""
    return " ".join(t.surface for t in redacted.tokens if not t.is_mask)


def from_redacted_text(doc_id: str, text: str) -> RedactedDocument:
    """Wrap an externally produced redacted string (e.g. CLI input).

    The recorded redaction level is the masked fraction of all tokens,
    which is informational only here.
    """
    tokens = tuple(tokenize(text))
    masked = frozenset(i for i, t in enumerate(tokens) if t.is_mask)
    x_pct = 100.0 * len(masked) / len(tokens) if tokens else 0.0
    return RedactedDocument(
        doc_id=doc_id, tokens=tokens, masked_positions=masked, x_pct=x_pct
    )
