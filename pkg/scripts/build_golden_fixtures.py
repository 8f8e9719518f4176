#!/usr/bin/env python3
"""Regenerate the golden test fixtures from the fixture corpus.

Writes tests/fixtures/golden_kg.json and tests/fixtures/queries.jsonl.  The
queries file carries literal snippet ids (content hashes), so the two files
must always be regenerated together.  Run from anywhere:

    python scripts/build_golden_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from tutorialkg.apis import load_dictionary  # noqa: E402
from tutorialkg.model import save_graph  # noqa: E402
from tutorialkg.pipeline import build_graph_from_dir  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"

QUERY_CODE = """public void createDialog() {
    Dialog dialog = new Dialog(getActivity());
    LayoutInflater inflater = getActivity().getLayoutInflater();
    dialog.setContentView(inflater.inflate(R.layout.my_dialog, null));
}
"""


def main() -> int:
    dictionary = load_dictionary(FIXTURES / "api_dict.jsonl")
    graph = build_graph_from_dir(FIXTURES / "corpus", dictionary)

    def snippet(page: str, kind: str, contains: str | None = None) -> str:
        hits = [
            s.id
            for s in graph.snippets.values()
            if s.page_uri == page
            and s.kind.value == kind
            and (contains is None or contains in s.text)
        ]
        if len(hits) != 1:
            raise SystemExit(f"fixture drift: {page}/{kind}/{contains} -> {hits}")
        return hits[0]

    dialog_block = snippet("dialogs.html", "full_block", "onCreateDialog")
    layouts_block = snippet("layouts.html", "full_block")
    fragments_block = snippet("fragments.html", "full_block")

    save_graph(graph, FIXTURES / "golden_kg.json")

    queries = [
        {
            "query_id": "q1",
            "origin": "all_code",
            "code": QUERY_CODE,
            "truth_snippet_ids": [dialog_block],
        },
        {
            "query_id": "q2",
            "origin": "key_api",
            "apis": ["android.os.Bundle"],
            "truth_snippet_ids": [layouts_block],
        },
        {
            "query_id": "q3",
            "origin": "key_api",
            "apis": ["android.view.Window.FEATURE_NO_TITLE"],
            "truth_snippet_ids": [dialog_block],
        },
        {
            "query_id": "q4",
            "origin": "all_code",
            "code": "int x = 1;\n",
            "truth_snippet_ids": [fragments_block],
        },
    ]
    with open(FIXTURES / "queries.jsonl", "w", encoding="utf-8") as fh:
        for record in queries:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    counts = graph.meta.counts
    print(f"golden_kg.json: {sum(counts['actions_by_source'].values())} actions, "
          f"{sum(counts['snippets_by_kind'].values())} snippets")
    print("queries.jsonl: 4 queries")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
