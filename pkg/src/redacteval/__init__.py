"""redacteval: quantify the privacy of redacted text.

Two complementary measurements over a labeled corpus, swept from 0 to
100 percent redaction: the fraction of a reconstruction oracle's top-N
completions that are gibberish (privacy metric), and the accuracy of a
TFIDF + logistic-regression adversary at recovering the text's category
(attack metric).
"""

__version__ = "0.1.0"

from .corpus import Corpus, Document, Split, balance_by_label, load_records, split_corpus
from .errors import ConfigError, DataError, RedactevalError
from .evaluator import (
    AttackerConfig,
    PrivacyScore,
    SweepConfig,
    SweepRow,
    corpus_privacy,
    privacy_score,
    run_sweep,
    write_report,
)
from .gibberish import GibberishParams, TrigramDetector, is_gibberish, train_detector
from .oracle import Prediction, ReconstructionSet, ReplayOracle, TransformerOracle, UnigramOracle
from .redactor import RedactedDocument, eligible_positions, redact, render
from .textproc import MASK_TOKEN, Token, tokenize, unique_words

__all__ = [
    "AttackerConfig",
    "ConfigError",
    "Corpus",
    "DataError",
    "Document",
    "GibberishParams",
    "MASK_TOKEN",
    "Prediction",
    "PrivacyScore",
    "ReconstructionSet",
    "RedactedDocument",
    "RedactevalError",
    "ReplayOracle",
    "Split",
    "SweepConfig",
    "SweepRow",
    "Token",
    "TransformerOracle",
    "TrigramDetector",
    "UnigramOracle",
    "balance_by_label",
    "corpus_privacy",
    "eligible_positions",
    "is_gibberish",
    "load_records",
    "privacy_score",
    "redact",
    "render",
    "run_sweep",
    "split_corpus",
    "tokenize",
    "train_detector",
    "unique_words",
    "write_report",
]
