"""Document collections and rule-based sentence segmentation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List

_TERMINATORS = ".!?"


class CorpusError(Exception):
    pass


@dataclass(frozen=True)
class Document:
    id: str
    text: str


@dataclass(frozen=True)
class SentenceSpan:
    start: int
    end: int


@dataclass
class DocumentCollection:
    documents: List[Document]

    def __post_init__(self) -> None:
        seen = set()
        for doc in self.documents:
            if not doc.id:
                raise CorpusError("document id must be non-empty")
            if doc.id in seen:
                raise CorpusError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)
        self._by_id = {doc.id: doc for doc in self.documents}

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def get(self, doc_id: str) -> Document:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise CorpusError(f"unknown document id {doc_id!r}") from None


def load_documents(path: str | Path) -> DocumentCollection:
    """Read a line-delimited collection file (one JSON object per line)."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"collection file not found: {path}")
    documents = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed record: {exc}") from None
            if not isinstance(record, dict) or not isinstance(record.get("id"), str) \
                    or not isinstance(record.get("text"), str):
                raise CorpusError(
                    f"{path}:{lineno}: record must be an object with string "
                    f'fields "id" and "text"'
                )
            documents.append(Document(id=record["id"], text=record["text"]))
    return DocumentCollection(documents)


def write_documents(collection: Iterable[Document], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in collection:
            fh.write(json.dumps({"id": doc.id, "text": doc.text}, ensure_ascii=False))
            fh.write("\n")


def split_sentences(text: str) -> List[SentenceSpan]:
    """Segment text into sentence spans.

    A sentence ends after '.', '!' or '?' when followed by whitespace and an
    uppercase letter, or by (optional whitespace and) end of text.  A trailing
    fragment without a terminator forms its own span.  Spans never start or
    end on whitespace.
    """
    spans: List[SentenceSpan] = []
    n = len(text)
    start = None
    for pos, ch in enumerate(text):
        if start is None:
            if ch.isspace():
                continue
            start = pos
        if ch in _TERMINATORS:
            j = pos + 1
            while j < n and text[j].isspace():
                j += 1
            if j == n or (j > pos + 1 and text[j].isupper()):
                spans.append(SentenceSpan(start, pos + 1))
                start = None
    if start is not None:
        end = n
        while end > start and text[end - 1].isspace():
            end -= 1
        spans.append(SentenceSpan(start, end))
    return spans


def sentence_for_span(text: str, spans: List[SentenceSpan], start: int, end: int) -> str:
    """Text of the sentence(s) covering [start, end); spans joined when the
    region crosses a sentence boundary so the result always contains it."""
    covering = [s for s in spans if s.start < end and start < s.end]
    if not covering:
        return text[start:end]
    return text[covering[0].start:covering[-1].end]
