#!/usr/bin/env python3
"""Regenerate the bundled synthetic benchmark corpus.

Writes the default 4-class, 500-document corpus in the JSON-lines record
format. The copy shipped under src/redacteval/data/ was produced by this
script; regenerate only when the generator defaults change.
"""

import argparse
from pathlib import Path

from redacteval.corpus import save_records
from redacteval.synthetic import SyntheticConfig, make_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        default=str(Path(__file__).resolve().parent.parent / "src/redacteval/data/synthetic_corpus.jsonl"),
    )
    parser.add_argument("--seed", type=int, default=None, help="override the generator seed")
    parser.add_argument("--docs-per-class", type=int, default=None)
    args = parser.parse_args()

    config = SyntheticConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.docs_per_class is not None:
        overrides["docs_per_class"] = args.docs_per_class
    if overrides:
        import dataclasses

        config = dataclasses.replace(config, **overrides)

    corpus = make_corpus(config)
    save_records(corpus.documents, args.out)
    print(f"wrote {len(corpus)} documents ({len(corpus.labels)} classes) -> {args.out}")


if __name__ == "__main__":
    main()
