#!/usr/bin/env python3
"""Convert external NER toolkit output into the engine's interchange format.

Reads a documents file (one JSON object per line with "id" and "text") and an
external entity file (one JSON object per line with "document_id", "text",
"start", "end", "type", and optionally "sentence"), and writes one
interchange record per entity:

    {"document_id": ..., "label": ..., "mention": ..., "start": ...,
     "end": ..., "context_sentence": ...}

Entities whose span does not reproduce their text are skipped with a
warning; unknown document ids abort the run.  The adapter is deliberately a
standalone file-to-file tool: the interchange format is its only contract
with the engine.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


class AdapterError(Exception):
    pass


def load_documents(path: Path) -> dict:
    if not path.exists():
        raise AdapterError(f"documents file not found: {path}")
    docs = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                docs[record["id"]] = record["text"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise AdapterError(f"{path}:{lineno}: malformed document: {exc}")
    return docs


def convert(entities_path: Path, docs_path: Path, out_path: Path,
            warn=lambda msg: print(msg, file=sys.stderr)) -> tuple[int, int]:
    """Write interchange records for all valid entities.

    Returns (written, skipped)."""
    docs = load_documents(docs_path)
    if not entities_path.exists():
        raise AdapterError(f"entity file not found: {entities_path}")
    written = skipped = 0
    with entities_path.open(encoding="utf-8") as fh, \
            out_path.open("w", encoding="utf-8") as out:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                doc_id = record["document_id"]
                text = record["text"]
                start = int(record["start"])
                end = int(record["end"])
                label = record["type"]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise AdapterError(f"{entities_path}:{lineno}: malformed entity: {exc}")
            if doc_id not in docs:
                raise AdapterError(f"{entities_path}:{lineno}: unknown document "
                                   f"id {doc_id!r}")
            if docs[doc_id][start:end] != text:
                skipped += 1
                warn(f"warning: {entities_path}:{lineno}: span [{start},{end}) "
                     f"does not match entity text {text!r}; skipped")
                continue
            out.write(json.dumps({
                "document_id": doc_id,
                "label": label,
                "mention": text,
                "start": start,
                "end": end,
                "context_sentence": record.get("sentence"),
            }, ensure_ascii=False))
            out.write("\n")
            written += 1
    return written, skipped


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Convert external NER output to the interchange format.")
    parser.add_argument("--entities", required=True,
                        help="external entity records (JSON lines)")
    parser.add_argument("--docs", required=True, help="documents file")
    parser.add_argument("--out", required=True, help="interchange output path")
    args = parser.parse_args(argv)
    try:
        written, skipped = convert(Path(args.entities), Path(args.docs),
                                   Path(args.out))
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {written} records to {args.out} ({skipped} skipped)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
