"""Planted-cluster benchmark generator: documents, nuggets, vectors and
ground truth where each attribute has a tight embedding cluster of true
values, well separated from distractors."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List

import numpy as np

from .corpus import Document, DocumentCollection, write_documents
from .embedding import VectorStore, cosine_distance, save_vector_store
from .evaluation import Annotation, GroundTruth, save_ground_truth
from .extraction import Nugget, export_interchange, nugget_id, normalize_mention

DEFAULT_ATTRIBUTES = ["alpha", "bravo", "charlie", "delta"]


@dataclass
class SynthBenchmark:
    collection: DocumentCollection
    nuggets: List[Nugget]
    store: VectorStore
    ground_truth: GroundTruth
    attributes: List[str]
    margin: float


def _jitter(rng: random.Random, base: np.ndarray, scale: float) -> np.ndarray:
    noise = np.array([rng.gauss(0.0, scale) for _ in range(base.shape[0])])
    vec = base + noise
    return vec / np.linalg.norm(vec)


def generate(seed: int, n_documents: int = 200,
             attributes: List[str] | None = None,
             distractors_per_doc: int = 2,
             noise: float = 0.02) -> SynthBenchmark:
    """Build the benchmark: one true value token per (document, attribute)
    clustered around the attribute's direction, plus distractor tokens on
    unrelated directions."""
    attributes = list(attributes or DEFAULT_ATTRIBUTES)
    rng = random.Random(seed)
    n_attrs = len(attributes)
    dim = 2 * n_attrs + distractors_per_doc * 2
    entries: Dict[str, List[float]] = {}

    attr_dirs = []
    for j, name in enumerate(attributes):
        direction = np.zeros(dim)
        direction[j] = 1.0
        attr_dirs.append(direction)
        entries[name] = direction.tolist()

    distractor_dirs = []
    for m in range(distractors_per_doc):
        direction = np.zeros(dim)
        direction[n_attrs + m] = 1.0
        distractor_dirs.append(direction)

    documents: List[Document] = []
    nuggets: List[Nugget] = []
    annotations: Dict = {}
    cluster_vectors: List[List[np.ndarray]] = [[] for _ in attributes]
    distractor_vectors: List[np.ndarray] = []

    for i in range(n_documents):
        doc_id = f"doc{i:04d}"
        tokens = []
        for j in range(n_attrs):
            token = f"v{j}x{i:04d}"
            vec = _jitter(rng, attr_dirs[j], noise)
            entries[token] = vec.tolist()
            cluster_vectors[j].append(vec)
            tokens.append(("true", j, token))
        for m in range(distractors_per_doc):
            token = f"dx{m}x{i:04d}"
            vec = _jitter(rng, distractor_dirs[m], noise)
            entries[token] = vec.tolist()
            distractor_vectors.append(vec)
            tokens.append(("noise", m, token))

        pieces = [f"Report {i} filed."]
        offsets = {}
        cursor = len(pieces[0])
        for kind, idx, token in tokens:
            sentence = f" Observed field reading {token} here."
            marker = f" Observed field reading "
            offsets[token] = cursor + len(marker)
            cursor += len(sentence)
            pieces.append(sentence)
        text = "".join(pieces)
        documents.append(Document(id=doc_id, text=text))

        for kind, j, token in tokens:
            start = offsets[token]
            end = start + len(token)
            assert text[start:end] == token
            label = "VALUE"
            nuggets.append(Nugget(
                id=nugget_id(doc_id, start, end, label),
                document_id=doc_id,
                label=label,
                mention=token,
                mention_span=(start, end),
                context_sentence=f"Observed field reading {token} here.",
                position=start / max(1, len(text)),
                canonical=normalize_mention(label, token),
            ))
            if kind == "true":
                annotations.setdefault((doc_id, attributes[j]), []).append(
                    Annotation(start=start, end=end, canonical=token))

    # verify the planted separation: true clusters vs distractors
    margin = float("inf")
    for j in range(n_attrs):
        centroid = np.mean(cluster_vectors[j], axis=0)
        centroid /= np.linalg.norm(centroid)
        for vec in distractor_vectors:
            margin = min(margin, cosine_distance(centroid, vec))
        for other in range(n_attrs):
            if other != j:
                for vec in cluster_vectors[other][:10]:
                    margin = min(margin, cosine_distance(centroid, vec))
    if margin < 0.3:
        raise AssertionError(f"planted margin {margin:.3f} below 0.3")

    return SynthBenchmark(
        collection=DocumentCollection(documents),
        nuggets=nuggets,
        store=VectorStore(entries),
        ground_truth=GroundTruth(annotations),
        attributes=attributes,
        margin=margin,
    )


def write_benchmark(bench: SynthBenchmark, out_dir: str | Path) -> Dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "docs": out / "docs.jsonl",
        "nuggets": out / "nuggets.jsonl",
        "vectors": out / "vectors.txt",
        "gt": out / "gt.jsonl",
        "attributes": out / "attributes.txt",
    }
    write_documents(bench.collection, paths["docs"])
    export_interchange(bench.nuggets, paths["nuggets"])
    save_vector_store(bench.store, paths["vectors"])
    save_ground_truth(bench.ground_truth, paths["gt"])
    paths["attributes"].write_text(",".join(bench.attributes) + "\n", encoding="utf-8")
    return paths
