"""Rule-based nugget extraction, interchange import/export, and value
canonicalization."""

from __future__ import annotations

import datetime
import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Tuple

from .corpus import Document, DocumentCollection, SentenceSpan, sentence_for_span, split_sentences


class ExtractionError(Exception):
    pass


@dataclass(frozen=True)
class CanonicalValue:
    kind: str  # "date" | "number" | "text"
    value: str

    def __post_init__(self) -> None:
        if self.kind == "date" and not re.fullmatch(r"\d{4}-\d{2}-\d{2}", self.value):
            raise ValueError(f"canonical date must be YYYY-MM-DD, got {self.value!r}")


@dataclass(frozen=True)
class Nugget:
    id: str
    document_id: str
    label: str
    mention: str
    mention_span: Tuple[int, int]
    context_sentence: str
    position: float
    canonical: Optional[CanonicalValue] = None


@dataclass(frozen=True)
class ExtractorDescriptor:
    name: str
    labels_emitted: frozenset


_MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5, "june": 6,
    "july": 7, "august": 8, "september": 9, "october": 10, "november": 11,
    "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7, "aug": 8,
    "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
}
_MONTH_ALT = "|".join(sorted(_MONTHS, key=len, reverse=True))

# Supported date surface forms: "October 25, 1999" / "Oct 25 1999",
# "25 October 1999", "25.10.1999" (day-first), "1999-10-25" (ISO),
# "10/25/1999" (month-first).
_DATE_RE = re.compile(
    rf"\b(?:(?:{_MONTH_ALT})\.?\s+\d{{1,2}}(?:,\s*|\s+)\d{{4}}"
    rf"|\d{{1,2}}\.?\s+(?:{_MONTH_ALT})\.?\s+\d{{4}}"
    r"|\d{1,2}\.\d{1,2}\.\d{4}"
    r"|\d{4}-\d{2}-\d{2}"
    r"|\d{1,2}/\d{1,2}/\d{4})\b",
    re.IGNORECASE,
)

# Digit runs with optional thousands grouping and decimal part; a comma
# followed by 1-2 trailing digits reads as a decimal comma.
_NUMBER_RE = re.compile(
    r"\d{1,3}(?:,\d{3})+(?:\.\d+)?"
    r"|\d{1,3}(?:\.\d{3})+(?:,\d{1,2})?"
    r"|\d+,\d{1,2}(?!\d)"
    r"|\d+(?:\.\d+)?"
)

_WORD_RE = re.compile(r"[A-Za-z][A-Za-z'-]*")


def nugget_id(document_id: str, start: int, end: int, label: str) -> str:
    return f"{document_id}#{start}-{end}#{label}"


def _make_nugget(doc: Document, spans: List[SentenceSpan], label: str,
                 start: int, end: int) -> Nugget:
    mention = doc.text[start:end]
    return Nugget(
        id=nugget_id(doc.id, start, end, label),
        document_id=doc.id,
        label=label,
        mention=mention,
        mention_span=(start, end),
        context_sentence=sentence_for_span(doc.text, spans, start, end),
        position=start / max(1, len(doc.text)),
        canonical=normalize_mention(label, mention),
    )


def extract_builtin(doc: Document, spans: List[SentenceSpan]) -> List[Nugget]:
    """Run the three built-in rule extractors (DATE, NUMBER, ENTITY).

    NUMBER and ENTITY matches falling inside a DATE match are suppressed so
    date fragments are not re-emitted.
    """
    nuggets: List[Nugget] = []
    date_spans: List[Tuple[int, int]] = []
    for m in _DATE_RE.finditer(doc.text):
        date_spans.append(m.span())
        nuggets.append(_make_nugget(doc, spans, "DATE", m.start(), m.end()))

    def inside_date(start: int, end: int) -> bool:
        return any(ds <= start and end <= de for ds, de in date_spans)

    for m in _NUMBER_RE.finditer(doc.text):
        if inside_date(m.start(), m.end()):
            continue
        nuggets.append(_make_nugget(doc, spans, "NUMBER", m.start(), m.end()))

    for sent in spans:
        words = [w for w in _WORD_RE.finditer(doc.text, sent.start, sent.end)]
        run: List[re.Match] = []
        for idx, w in enumerate(words):
            capitalized = (w.group()[0].isupper() and idx > 0
                           and not inside_date(w.start(), w.end()))
            if capitalized:
                run.append(w)
                continue
            if run:
                nuggets.append(_make_nugget(doc, spans, "ENTITY",
                                            run[0].start(), run[-1].end()))
                run = []
        if run:
            nuggets.append(_make_nugget(doc, spans, "ENTITY",
                                        run[0].start(), run[-1].end()))
    nuggets.sort(key=lambda n: (n.mention_span[0], n.mention_span[1], n.label))
    return nuggets


def _parse_date(mention: str) -> Optional[datetime.date]:
    text = mention.strip()
    m = re.fullmatch(rf"({_MONTH_ALT})\.?\s+(\d{{1,2}})(?:,\s*|\s+)(\d{{4}})",
                     text, re.IGNORECASE)
    if m:
        return _safe_date(int(m.group(3)), _MONTHS[m.group(1).lower()], int(m.group(2)))
    m = re.fullmatch(rf"(\d{{1,2}})\.?\s+({_MONTH_ALT})\.?\s+(\d{{4}})",
                     text, re.IGNORECASE)
    if m:
        return _safe_date(int(m.group(3)), _MONTHS[m.group(2).lower()], int(m.group(1)))
    m = re.fullmatch(r"(\d{1,2})\.(\d{1,2})\.(\d{4})", text)
    if m:  # dotted form is day-first
        return _safe_date(int(m.group(3)), int(m.group(2)), int(m.group(1)))
    m = re.fullmatch(r"(\d{4})-(\d{2})-(\d{2})", text)
    if m:
        return _safe_date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    m = re.fullmatch(r"(\d{1,2})/(\d{1,2})/(\d{4})", text)
    if m:  # slashed form is month-first
        return _safe_date(int(m.group(3)), int(m.group(1)), int(m.group(2)))
    return None


def _safe_date(year: int, month: int, day: int) -> Optional[datetime.date]:
    try:
        return datetime.date(year, month, day)
    except ValueError:
        return None


def _parse_number(mention: str) -> Optional[float]:
    text = mention.strip()
    if re.fullmatch(r"\d{1,3}(?:,\d{3})+(?:\.\d+)?", text):
        text = text.replace(",", "")
    elif re.fullmatch(r"\d{1,3}(?:\.\d{3})+(?:,\d{1,2})?", text):
        text = text.replace(".", "").replace(",", ".")
    elif re.fullmatch(r"\d+,\d{1,2}", text):
        text = text.replace(",", ".")
    elif not re.fullmatch(r"\d+(?:\.\d+)?", text):
        return None
    try:
        return float(text)
    except ValueError:
        return None


def format_number(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def normalize_mention(label: str, mention: str) -> CanonicalValue:
    """Canonicalize a mention according to its label; falls back to trimmed
    text when the mention does not parse under the label's grammar."""
    if label.upper() == "DATE":
        date = _parse_date(mention)
        if date is not None:
            return CanonicalValue("date", date.isoformat())
    elif label.upper() == "NUMBER":
        number = _parse_number(mention)
        if number is not None and number == number and abs(number) != float("inf"):
            return CanonicalValue("number", format_number(number))
    return CanonicalValue("text", mention.strip())


def validate_nugget(nugget: Nugget, doc: Document) -> None:
    start, end = nugget.mention_span
    if not (0 <= start < end <= len(doc.text)):
        raise ExtractionError(f"nugget {nugget.id}: span {nugget.mention_span} "
                              f"out of bounds for document {doc.id}")
    if doc.text[start:end] != nugget.mention:
        raise ExtractionError(
            f"nugget {nugget.id}: mention {nugget.mention!r} disagrees with "
            f"document slice {doc.text[start:end]!r}")
    if nugget.mention not in nugget.context_sentence:
        raise ExtractionError(f"nugget {nugget.id}: context sentence does not "
                              f"contain the mention")
    if not (0.0 <= nugget.position <= 1.0):
        raise ExtractionError(f"nugget {nugget.id}: position out of [0,1]")


def import_interchange(path: str | Path, collection: DocumentCollection) -> List[Nugget]:
    """Load nuggets from an interchange file, validating against the
    collection and filling in missing context sentences."""
    path = Path(path)
    if not path.exists():
        raise ExtractionError(f"interchange file not found: {path}")
    nuggets: List[Nugget] = []
    span_cache = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ExtractionError(f"{path}:{lineno}: malformed record: {exc}") from None
            try:
                doc_id = record["document_id"]
                label = record["label"]
                mention = record["mention"]
                start = int(record["start"])
                end = int(record["end"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ExtractionError(f"{path}:{lineno}: malformed record: {exc}") from None
            if doc_id not in collection:
                raise ExtractionError(f"{path}:{lineno}: unknown document id {doc_id!r}")
            doc = collection.get(doc_id)
            context = record.get("context_sentence")
            if context is None:
                if doc_id not in span_cache:
                    span_cache[doc_id] = split_sentences(doc.text)
                context = sentence_for_span(doc.text, span_cache[doc_id], start, end)
            nugget = Nugget(
                id=nugget_id(doc_id, start, end, label),
                document_id=doc_id,
                label=label,
                mention=mention,
                mention_span=(start, end),
                context_sentence=context,
                position=start / max(1, len(doc.text)),
                canonical=normalize_mention(label, mention),
            )
            validate_nugget(nugget, doc)
            nuggets.append(nugget)
    return nuggets


def export_interchange(nuggets: List[Nugget], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for n in nuggets:
            record = {
                "document_id": n.document_id,
                "label": n.label,
                "mention": n.mention,
                "start": n.mention_span[0],
                "end": n.mention_span[1],
                "context_sentence": n.context_sentence,
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
