#!/usr/bin/env python3
"""Evaluate a query file under every matching setting and print a table.

    python scripts/settings_sweep.py --kg kg.json --queries queries.jsonl

Add --markdown for a table that pastes into a report.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from tutorialkg.apis import dictionary_from_graph  # noqa: E402
from tutorialkg.cli import _load_queries  # noqa: E402
from tutorialkg.match import ALL_SETTINGS, build_index, evaluate, parse_config  # noqa: E402
from tutorialkg.model import load_graph  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kg", required=True)
    ap.add_argument("--queries", required=True)
    ap.add_argument("--top", type=int, default=3)
    ap.add_argument("--markdown", action="store_true")
    args = ap.parse_args()

    graph = load_graph(args.kg)
    dictionary = dictionary_from_graph(graph)
    queries = _load_queries(args.queries, dictionary)
    index = build_index(graph)

    rows = []
    for code in ALL_SETTINGS:
        metrics = evaluate(index, queries, parse_config(code), args.top)
        rows.append((code, metrics.as_floats()))

    if args.markdown:
        print("| setting | accuracy | precision | recall | f1 |")
        print("|---------|----------|-----------|--------|----|")
        for code, f in rows:
            print(
                f"| {code} | {f['accuracy']:.4f} | {f['precision']:.4f}"
                f" | {f['recall']:.4f} | {f['f1']:.4f} |"
            )
    else:
        print(f"{len(queries)} queries, top {args.top}")
        print(f"{'setting':8} {'accuracy':>8} {'precision':>9} {'recall':>8} {'f1':>8}")
        for code, f in rows:
            print(
                f"{code:8} {f['accuracy']:8.4f} {f['precision']:9.4f}"
                f" {f['recall']:8.4f} {f['f1']:8.4f}"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
