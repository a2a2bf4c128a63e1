"""Command-line entry point wiring configuration to the pipeline stages.

Subcommands mirror the stages so intermediate artifacts stay inspectable:
``fit-tfidf``, ``train-detector``, ``redact``, ``sweep`` and ``score``.
All randomness flows from the single ``--seed`` via per-document scoping.
Exit codes: 0 success, 1 configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import tfidf
from .corpus import Corpus, Document, Split, balance_by_label, load_records, save_records, split_corpus
from .errors import ConfigError, DataError
from .evaluator import (
    DETAIL_HEADER,
    DETAIL_HEADER_WITH_K,
    REPORT_HEADER,
    AttackerConfig,
    SweepConfig,
    format_detail_row,
    format_report_row,
    privacy_score,
    run_sweep,
)
from .gibberish import (
    DEFAULT_FP_BUDGET,
    DEFAULT_OVERLAP_PCT,
    DEFAULT_REPEAT_LIMIT,
    GibberishParams,
    is_gibberish,
    load_detector,
    save_detector,
    train_detector,
    word_overlap_pct,
)
from .oracle import build_oracle
from .redactor import from_redacted_text, redact, render
from .diversity import DEFAULT_TAU, TfidfEmbedder, estimate_k

DEFAULT_GRID_SPEC = "0,10,20,30,40,50,60,70,80,90,100"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


@dataclass
class RunConfig:
    """Fully resolved configuration, echoed into the output directory."""

    command: str
    corpus: str | None = None
    seed: int = 0
    train_fraction: float = 0.8
    min_df: float = 0.10
    stopwords_path: str | None = None
    grid: tuple[float, ...] = ()
    n_predictions: int = 100
    max_overlap_pct: float = DEFAULT_OVERLAP_PCT
    repeat_limit: int = DEFAULT_REPEAT_LIMIT
    fp_budget: float = DEFAULT_FP_BUDGET
    oracle: str = "unigram"
    oracle_options: dict[str, str] = dataclasses.field(default_factory=dict)
    out: str | None = None
    workers: int = 1
    dataset: str = "dataset"
    detector_path: str | None = None
    tfidf_model_path: str | None = None
    reference_path: str | None = None
    tau: float = DEFAULT_TAU
    with_k: bool = False
    x_pct: float | None = None

    def validate(self, need_corpus: bool = True) -> None:
        if need_corpus:
            if not self.corpus:
                raise ConfigError("missing required field: corpus")
            if not Path(self.corpus).is_file():
                raise ConfigError(f"corpus: file not found: {self.corpus}")
        for field_name in ("stopwords_path", "detector_path", "tfidf_model_path", "reference_path"):
            value = getattr(self, field_name)
            if value and not Path(value).is_file():
                raise ConfigError(f"{field_name}: file not found: {value}")
        if self.n_predictions < 1:
            raise ConfigError(f"n: must be >= 1, got {self.n_predictions}")
        if not 0.0 <= self.max_overlap_pct <= 100.0:
            raise ConfigError(f"max-overlap: must be in [0, 100], got {self.max_overlap_pct}")
        if not 0.0 < self.min_df <= 1.0:
            raise ConfigError(f"min-df: must be in (0, 1], got {self.min_df}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train-fraction: must be in (0, 1), got {self.train_fraction}")
        if not 0.0 <= self.fp_budget < 1.0:
            raise ConfigError(f"fp-budget: must be in [0, 1), got {self.fp_budget}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError(f"tau: must be in (0, 1], got {self.tau}")
        for x in self.grid:
            if not 0.0 <= x <= 100.0:
                raise ConfigError(f"grid: levels must be in [0, 100], got {x}")
        if self.x_pct is not None and not 0.0 <= self.x_pct <= 100.0:
            raise ConfigError(f"x: must be in [0, 100], got {self.x_pct}")

    def echo(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "resolved_config.json", "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _parse_grid(spec: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in spec.split(",") if part.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def _parse_options(pairs: list[str] | None) -> dict[str, str]:
    options: dict[str, str] = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ConfigError(f"oracle-opt: expected key=value, got {pair!r}")
        options[key] = value
    return options


def _load_stopwords(path: str | None) -> frozenset[str]:
    if path is None:
        return tfidf.DEFAULT_STOPWORDS
    with open(path, encoding="utf-8") as fh:
        return frozenset(w.strip().lower() for w in fh if w.strip())


def _pipeline_split(config: RunConfig) -> Split:
    corpus = load_records(config.corpus)
    balanced = balance_by_label(corpus, config.seed)
    return split_corpus(balanced, config.train_fraction, config.seed)


def _detector_for(config: RunConfig, train_corpus: Corpus):
    if config.detector_path:
        return load_detector(config.detector_path)
    return train_detector(
        [d.text for d in train_corpus.documents], fp_budget=config.fp_budget
    )


def cmd_fit_tfidf(config: RunConfig) -> int:
    config.validate()
    split = _pipeline_split(config)
    model = tfidf.fit(split.train.documents, config.min_df, _load_stopwords(config.stopwords_path))
    tfidf.save_model(model, config.out)
    print(f"fitted {model.n_features} features on {model.n_docs_fitted} train docs -> {config.out}")
    return 0


def cmd_train_detector(config: RunConfig) -> int:
    config.validate(need_corpus=config.reference_path is None)
    if config.reference_path:
        with open(config.reference_path, encoding="utf-8") as fh:
            texts = [line.strip() for line in fh if line.strip()]
    else:
        texts = [d.text for d in _pipeline_split(config).train.documents]
    detector = train_detector(texts, fp_budget=config.fp_budget)
    save_detector(detector, config.out)
    print(
        f"trained on {detector.n_reference} sentences, "
        f"threshold {detector.calibrated_theta:.4f} -> {config.out}"
    )
    return 0


def cmd_redact(config: RunConfig) -> int:
    config.validate()
    out_dir = Path(config.out)
    config.echo(out_dir)
    split = _pipeline_split(config)
    model = tfidf.fit(split.train.documents, config.min_df, _load_stopwords(config.stopwords_path))
    redacted_docs = [
        Document(id=doc.id, text=render(redact(doc, model, config.x_pct, config.seed)), label=doc.label)
        for doc in split.test.documents
    ]
    out_path = out_dir / f"redacted_x{config.x_pct:g}.jsonl"
    save_records(redacted_docs, out_path)
    print(f"wrote {len(redacted_docs)} records -> {out_path}")
    return 0


def cmd_sweep(config: RunConfig) -> int:
    config.validate()
    out_dir = Path(config.out)
    config.echo(out_dir)
    split = _pipeline_split(config)
    detector = _detector_for(config, split.train)
    oracle = build_oracle(
        config.oracle, config.oracle_options, split.train.documents, config.seed
    )
    params = GibberishParams(
        max_overlap_pct=config.max_overlap_pct, repeat_limit=config.repeat_limit
    )
    sweep_config = SweepConfig(
        grid=config.grid,
        n_predictions=config.n_predictions,
        seed=config.seed,
        min_df=config.min_df,
        stopwords=_load_stopwords(config.stopwords_path),
        workers=config.workers,
        estimate_diversity=config.with_k,
        tau=config.tau,
    )
    report_path = out_dir / "report.csv"
    detail_path = out_dir / "details.csv"
    detail_header = DETAIL_HEADER_WITH_K if config.with_k else DETAIL_HEADER
    print(REPORT_HEADER)
    with open(report_path, "w", encoding="utf-8", newline="") as report_fh, open(
        detail_path, "w", encoding="utf-8", newline=""
    ) as detail_fh:
        report_fh.write(REPORT_HEADER + "\n")
        detail_fh.write(detail_header + "\n")
        for point in run_sweep(split, oracle, detector, params, sweep_config, AttackerConfig()):
            line = format_report_row(point.row, config.dataset)
            report_fh.write(line + "\n")
            for detail in point.details:
                detail_fh.write(format_detail_row(detail, config.with_k) + "\n")
            report_fh.flush()
            detail_fh.flush()
            print(line)
    return 0


def _print_score_details(config: RunConfig, original: Document, redacted, oracle, params, detector) -> None:
    recs = oracle.reconstruct(render(redacted), config.n_predictions)
    for rank, pred in enumerate(recs.predictions, start=1):
        verdict = is_gibberish(original.text, pred.text, params, detector)
        overlap = word_overlap_pct(original.text, pred.text)
        flag = "gibberish" if verdict else "ok"
        print(f"{rank:4d}  {pred.confidence:10.6f}  {overlap:6.1f}%  {flag:9s}  {pred.text}")
    if config.tfidf_model_path:
        embedder = TfidfEmbedder(tfidf.load_model(config.tfidf_model_path))
        k = estimate_k(recs, original, params, detector, embedder, config.tau)
        print(f"k_estimate={k} (tau={config.tau:g})")
    else:
        print("k_estimate unavailable (pass --tfidf-model to enable)", file=sys.stderr)


def build_parser() -> _Parser:
    parser = _Parser(prog="redacteval", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser, out_required: bool = True) -> None:
        p.add_argument("--corpus", help="JSON-lines corpus (id/text/label per line)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--train-fraction", type=float, default=0.8)
        p.add_argument("--min-df", type=float, default=0.10)
        p.add_argument("--stopwords", dest="stopwords_path", help="file with one stopword per line")
        p.add_argument("--out", required=out_required, help="output directory or file")

    p = sub.add_parser("fit-tfidf", help="fit the TFIDF model on the train split")
    common(p)

    p = sub.add_parser("train-detector", help="train the statistical gibberish detector")
    common(p)
    p.add_argument("--reference", dest="reference_path", help="plain-text reference, one sentence per line (default: train split)")
    p.add_argument("--fp-budget", type=float, default=DEFAULT_FP_BUDGET)

    p = sub.add_parser("redact", help="write the redacted test corpus at one level")
    common(p)
    p.add_argument("--x", type=float, required=True, help="redaction percentage in [0, 100]")

    p = sub.add_parser("sweep", help="run the full redaction-level sweep")
    common(p)
    p.add_argument("--grid", default=DEFAULT_GRID_SPEC, help="comma-separated redaction levels")
    p.add_argument("--n", type=int, default=100, help="predictions requested per document")
    p.add_argument("--max-overlap", type=float, default=DEFAULT_OVERLAP_PCT)
    p.add_argument("--repeat-limit", type=int, default=DEFAULT_REPEAT_LIMIT)
    p.add_argument("--fp-budget", type=float, default=DEFAULT_FP_BUDGET)
    p.add_argument("--oracle", default="unigram", choices=["unigram", "replay", "transformer"])
    p.add_argument("--oracle-opt", action="append", metavar="KEY=VALUE")
    p.add_argument("--detector", dest="detector_path", help="saved detector file (default: train on the train split)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dataset-name", help="dataset column value (default: corpus stem)")
    p.add_argument("--with-k", action="store_true", help="add the k_estimate detail column")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)

    p = sub.add_parser("score", help="privacy score for one original/redacted pair")
    p.add_argument("--original", required=True)
    p.add_argument("--redacted", required=True)
    p.add_argument("--corpus", help="training corpus (required for the unigram oracle)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--min-df", type=float, default=0.10)
    p.add_argument("--stopwords", dest="stopwords_path")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--max-overlap", type=float, default=DEFAULT_OVERLAP_PCT)
    p.add_argument("--repeat-limit", type=int, default=DEFAULT_REPEAT_LIMIT)
    p.add_argument("--oracle", default="replay", choices=["unigram", "replay", "transformer"])
    p.add_argument("--oracle-opt", action="append", metavar="KEY=VALUE")
    p.add_argument("--detector", dest="detector_path", required=False)
    p.add_argument("--tfidf-model", dest="tfidf_model_path", help="saved TFIDF model, enables k_estimate")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--details", action="store_true", help="print per-prediction verdicts and k estimate")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    for field_obj in dataclasses.fields(RunConfig):
        if hasattr(args, field_obj.name) and getattr(args, field_obj.name) is not None:
            setattr(config, field_obj.name, getattr(args, field_obj.name))
    if hasattr(args, "grid"):
        config.grid = _parse_grid(args.grid)
    if hasattr(args, "n") and args.n is not None:
        config.n_predictions = args.n
    if hasattr(args, "max_overlap") and args.max_overlap is not None:
        config.max_overlap_pct = args.max_overlap
    if hasattr(args, "fp_budget") and args.fp_budget is not None:
        config.fp_budget = args.fp_budget
    if hasattr(args, "oracle_opt"):
        config.oracle_options = _parse_options(args.oracle_opt)
    if hasattr(args, "x") and args.x is not None:
        config.x_pct = args.x
    if hasattr(args, "with_k"):
        config.with_k = args.with_k
    if getattr(args, "dataset_name", None):
        config.dataset = args.dataset_name
    elif config.corpus:
        config.dataset = Path(config.corpus).stem
    return config


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        if args.command == "fit-tfidf":
            return cmd_fit_tfidf(config)
        if args.command == "train-detector":
            return cmd_train_detector(config)
        if args.command == "redact":
            return cmd_redact(config)
        if args.command == "sweep":
            return cmd_sweep(config)
        if args.command == "score":
            return _run_score(config, args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _run_score(config: RunConfig, args: argparse.Namespace) -> int:
    if not args.original.strip():
        raise ConfigError("original: must be non-empty text")
    if not args.redacted.strip():
        raise ConfigError("redacted: must be non-empty text")
    if not config.detector_path:
        raise ConfigError("missing required field: detector")
    config.validate(need_corpus=config.oracle == "unigram")
    detector = load_detector(config.detector_path)
    train_docs = None
    if config.oracle == "unigram":
        train_docs = _pipeline_split(config).train.documents
    oracle = build_oracle(config.oracle, config.oracle_options, train_docs, config.seed)
    params = GibberishParams(
        max_overlap_pct=config.max_overlap_pct, repeat_limit=config.repeat_limit
    )
    original = Document(id="cli", text=args.original, label="")
    redacted = from_redacted_text("cli", args.redacted)
    result = privacy_score(original, redacted, oracle, params, detector, n=config.n_predictions)
    print(f"{result.score:.4f}")
    if args.details:
        _print_score_details(config, original, redacted, oracle, params, detector)
    return 0


def entrypoint() -> None:  # console-script target
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
