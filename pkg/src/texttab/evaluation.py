"""Ground-truth handling, the simulated feedback oracle, and
precision/recall/F1 scoring of extracted tables."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .corpus import DocumentCollection
from .extraction import Nugget
from .matching import CONFIRM, REJECT, Cell, ExtractedTable


class EvaluationError(Exception):
    pass


@dataclass(frozen=True)
class Annotation:
    start: int
    end: int
    canonical: Optional[str] = None


class GroundTruth:
    def __init__(self, annotations: Dict[Tuple[str, str], List[Annotation]]):
        self.annotations = annotations

    def for_cell(self, document_id: str, attribute: str) -> List[Annotation]:
        return self.annotations.get((document_id, attribute), [])

    def attributes(self) -> List[str]:
        return sorted({attr for _, attr in self.annotations})


def load_ground_truth(path: str | Path) -> GroundTruth:
    path = Path(path)
    if not path.exists():
        raise EvaluationError(f"ground-truth file not found: {path}")
    annotations: Dict[Tuple[str, str], List[Annotation]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                key = (record["document_id"], record["attribute"])
                ann = Annotation(start=int(record["start"]), end=int(record["end"]),
                                 canonical=record.get("canonical"))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise EvaluationError(f"{path}:{lineno}: malformed record: {exc}") from None
            annotations.setdefault(key, []).append(ann)
    return GroundTruth(annotations)


def save_ground_truth(gt: GroundTruth, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for (doc_id, attribute), anns in gt.annotations.items():
            for ann in anns:
                fh.write(json.dumps({
                    "document_id": doc_id, "attribute": attribute,
                    "start": ann.start, "end": ann.end,
                    "canonical": ann.canonical,
                }, ensure_ascii=False))
                fh.write("\n")


def _overlaps(a: Tuple[int, int], b: Tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def oracle_feedback(gt: GroundTruth, attribute: str, nugget: Nugget) -> str:
    """Confirm iff the nugget's span overlaps any annotated span for its
    document and the attribute; deterministic."""
    for ann in gt.for_cell(nugget.document_id, attribute):
        if _overlaps(nugget.mention_span, (ann.start, ann.end)):
            return CONFIRM
    return REJECT


@dataclass(frozen=True)
class AttributeScores:
    attribute: str
    precision: float
    recall: float
    f1: float
    support: int
    tp: int = 0
    fp: int = 0
    fn: int = 0
    missing_from_gt: bool = False


def _numbers_equal(a: str, b: str) -> bool:
    try:
        return float(a) == float(b)
    except ValueError:
        return False


def _cell_correct(cell: Cell, anns: List[Annotation], doc_text: str) -> bool:
    for ann in anns:
        if ann.canonical is not None:
            if cell.value == ann.canonical or _numbers_equal(cell.value, ann.canonical):
                return True
            continue
        annotated = doc_text[ann.start:ann.end]
        if cell.value.strip().casefold() == annotated.strip().casefold():
            return True
        if _overlaps(cell.span, (ann.start, ann.end)):
            return True
    return False


def score_table(table: ExtractedTable, gt: GroundTruth,
                collection: DocumentCollection) -> Tuple[List[AttributeScores], float]:
    """Per-attribute precision/recall/F1 plus the unweighted macro-average F1."""
    scores: List[AttributeScores] = []
    gt_attrs = set(gt.attributes())
    for attr in table.attribute_names:
        tp = fp = fn = support = 0
        for doc_id in table.document_ids:
            anns = gt.for_cell(doc_id, attr)
            cell = table.cells[(doc_id, attr)]
            if anns:
                support += 1
            if cell is None:
                if anns:
                    fn += 1
                continue
            if not anns:
                fp += 1
            elif _cell_correct(cell, anns, collection.get(doc_id).text):
                tp += 1
            else:
                fp += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        scores.append(AttributeScores(
            attribute=attr, precision=precision, recall=recall, f1=f1,
            support=support, tp=tp, fp=fp, fn=fn,
            missing_from_gt=attr not in gt_attrs))
    macro_f1 = sum(s.f1 for s in scores) / len(scores) if scores else 0.0
    return scores, macro_f1


def report_text(scores: List[AttributeScores], macro_f1: float) -> str:
    lines = [f"{'attribute':<24} {'P':>7} {'R':>7} {'F1':>7} {'support':>8}"]
    for s in scores:
        flag = "  (not in ground truth)" if s.missing_from_gt else ""
        lines.append(f"{s.attribute:<24} {s.precision:7.4f} {s.recall:7.4f} "
                     f"{s.f1:7.4f} {s.support:8d}{flag}")
    lines.append(f"{'macro avg F1':<24} {'':7} {'':7} {macro_f1:7.4f}")
    return "\n".join(lines) + "\n"


def report_records(scores: List[AttributeScores], macro_f1: float) -> str:
    out = []
    for s in scores:
        out.append(json.dumps({
            "attribute": s.attribute, "precision": s.precision,
            "recall": s.recall, "f1": s.f1, "support": s.support,
            "tp": s.tp, "fp": s.fp, "fn": s.fn,
            "missing_from_gt": s.missing_from_gt,
        }, sort_keys=True))
    out.append(json.dumps({"macro_f1": macro_f1}, sort_keys=True))
    return "\n".join(out) + "\n"
