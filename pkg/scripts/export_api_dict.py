#!/usr/bin/env python3
"""Convert an API reference dump into the dictionary JSONL format.

Accepts either a JSON file (an array of {fqn, kind, declaring_class}
records, or an object with an "entries" array) or a whitespace-separated
text listing:

    class  android.app.Dialog
    method android.app.Dialog.show android.app.Dialog

Records are de-duplicated on fqn (first wins, matching the loader) and
written sorted by fqn so regeneration is stable.

    python scripts/export_api_dict.py reference.json api_dict.jsonl
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

KINDS = {"class", "method", "field", "constant"}


def parse_records(path: Path) -> list[dict]:
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        data = json.loads(text)
        if isinstance(data, dict):
            data = data.get("entries", [])
        if not isinstance(data, list):
            raise SystemExit(f"{path}: expected an array or an object with 'entries'")
        return [dict(r) for r in data]
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise SystemExit(f"{path}:{lineno}: want 'kind fqn [declaring_class]'")
        record = {"kind": parts[0], "fqn": parts[1]}
        if len(parts) == 3:
            record["declaring_class"] = parts[2]
        records.append(record)
    return records


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("reference", type=Path, help="API reference dump (.json or .txt)")
    ap.add_argument("out", type=Path, help="output dictionary (.jsonl)")
    args = ap.parse_args()

    seen: dict[str, dict] = {}
    skipped = 0
    for record in parse_records(args.reference):
        fqn = record.get("fqn")
        kind = record.get("kind")
        if not fqn or kind not in KINDS:
            skipped += 1
            continue
        if kind != "class" and not record.get("declaring_class"):
            # members without an owner cannot support co-occurrence checks
            guess = fqn.rsplit(".", 1)[0]
            if "." not in fqn:
                skipped += 1
                continue
            record["declaring_class"] = guess
        seen.setdefault(fqn, record)

    with open(args.out, "w", encoding="utf-8") as fh:
        for fqn in sorted(seen):
            record = seen[fqn]
            out = {"fqn": record["fqn"], "kind": record["kind"]}
            if record.get("declaring_class"):
                out["declaring_class"] = record["declaring_class"]
            fh.write(json.dumps(out, sort_keys=True) + "\n")
    print(f"{args.out}: {len(seen)} entries ({skipped} skipped)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
