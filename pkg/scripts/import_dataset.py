#!/usr/bin/env python3
"""Convert a CSV text-classification dataset to the JSON-lines record
format the toolkit consumes.

The toolkit itself does not download datasets; point this adapter at any
local CSV with a text column and a label column, e.g. exports of the
usual news/review classification sets. Ids are synthesized as
``<label>-<counter>`` unless an id column is named.

Example:
    python scripts/import_dataset.py reviews.csv --text-col review \\
        --label-col sentiment --out reviews.jsonl
"""

import argparse
import csv
import sys
from collections import Counter

from redacteval.corpus import Document, save_records


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv_path")
    parser.add_argument("--text-col", required=True)
    parser.add_argument("--label-col", required=True)
    parser.add_argument("--id-col", help="optional id column (default: synthesized)")
    parser.add_argument("--out", required=True)
    parser.add_argument("--limit", type=int, help="keep at most this many rows")
    args = parser.parse_args()

    docs = []
    per_label: Counter[str] = Counter()
    with open(args.csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if args.limit is not None and len(docs) >= args.limit:
                break
            try:
                text = row[args.text_col]
                label = row[args.label_col]
            except KeyError as exc:
                print(f"error: column {exc} not found in {args.csv_path}", file=sys.stderr)
                return 2
            if not text or not label:
                continue
            if args.id_col:
                doc_id = row[args.id_col]
            else:
                doc_id = f"{label}-{per_label[label]:06d}"
            per_label[label] += 1
            docs.append(Document(id=doc_id, text=text, label=label))

    save_records(docs, args.out)
    print(f"wrote {len(docs)} records -> {args.out}")
    for label, count in sorted(per_label.items()):
        print(f"  {label}: {count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
