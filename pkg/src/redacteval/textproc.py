"""Whitespace tokenization and word normalization shared across the toolkit.

The mask symbol ``<mask>`` is treated as opaque: it survives tokenization
verbatim and is excluded from every word-identity operation.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Iterable

MASK_TOKEN = "<mask>"


@dataclass(frozen=True)
class Token:
    """One whitespace-delimited piece of text.

    ``normalized`` is the lowercased surface with leading/trailing
    punctuation stripped; it is empty only for pure-punctuation pieces.
    Mask tokens keep their literal form in both fields.
    """

    surface: str
    normalized: str
    is_mask: bool = False


def _make_token(piece: str) -> Token:
    if piece == MASK_TOKEN:
        return Token(surface=piece, normalized=MASK_TOKEN, is_mask=True)
    return Token(surface=piece, normalized=piece.lower().strip(string.punctuation))


def tokenize(text: str) -> list[Token]:
    """Split ``text`` on whitespace. Total: any string, "" gives []."""
    return [_make_token(piece) for piece in text.split()]


def unique_words(tokens: Iterable[Token]) -> set[str]:
    """Distinct non-empty normalized forms, mask tokens excluded."""
    return {t.normalized for t in tokens if not t.is_mask and t.normalized}


def round_half_up(x: float) -> int:
    """Nearest integer with .5 rounded up; the toolkit's one counting rule."""
    return int(math.floor(x + 0.5))
