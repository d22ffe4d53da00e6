"""Shared vector space for attribute names and nugget signals, and the
cosine distance used throughout matching."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from .extraction import Nugget

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_CAMEL_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")

LabelMap = Dict[str, str]


class EmbeddingError(Exception):
    pass


@dataclass(frozen=True)
class SignalWeights:
    w_label: float = 1.0
    w_mention: float = 1.0
    w_context: float = 1.0
    w_position: float = 0.0

    def __post_init__(self) -> None:
        weights = (self.w_label, self.w_mention, self.w_context, self.w_position)
        if any(w < 0 for w in weights):
            raise EmbeddingError("signal weights must be non-negative")
        if sum(weights) <= 0:
            raise EmbeddingError("at least one signal weight must be positive")


class VectorStore:
    """Immutable token -> vector table; all vectors share one dimension."""

    def __init__(self, entries: Mapping[str, Sequence[float]]):
        if not entries:
            raise EmbeddingError("empty store")
        self._vectors: Dict[str, np.ndarray] = {}
        self.dimension = None
        for token, values in entries.items():
            vec = np.asarray(values, dtype=np.float64)
            if self.dimension is None:
                self.dimension = vec.shape[0]
            elif vec.shape[0] != self.dimension:
                raise EmbeddingError(f"inconsistent dimension for token {token!r}")
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"non-finite vector for token {token!r}")
            self._vectors[token.lower()] = vec

    def __contains__(self, token: str) -> bool:
        return token.lower() in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def get(self, token: str) -> Optional[np.ndarray]:
        return self._vectors.get(token.lower())

    def items(self):
        return self._vectors.items()


def load_vector_store(path: str | Path) -> VectorStore:
    """Parse a plain-text word-vector file (optional "count dim" header)."""
    path = Path(path)
    if not path.exists():
        raise EmbeddingError(f"vector file not found: {path}")
    entries: Dict[str, List[float]] = {}
    dimension = None
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                    continue  # header row
                except ValueError:
                    pass
            token, fields = parts[0], parts[1:]
            try:
                values = [float(f) for f in fields]
            except ValueError:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric field") from None
            if dimension is None:
                dimension = len(values)
            elif len(values) != dimension:
                raise EmbeddingError(f"{path}:{lineno}: expected {dimension} values, "
                                     f"got {len(values)}")
            entries[token] = values
    if not entries:
        raise EmbeddingError(f"{path}: empty store")
    return VectorStore(entries)


def save_vector_store(store: VectorStore, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"{len(store)} {store.dimension}\n")
        for token, vec in store.items():
            fh.write(token + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def tokenize(text: str) -> List[str]:
    return _TOKEN_RE.findall(text.lower())


def tokenize_attribute_name(name: str) -> List[str]:
    # split camel-case boundaries before the usual lowercasing pass
    return tokenize(_CAMEL_RE.sub(" ", name))


def _normalize(vec: np.ndarray) -> Optional[np.ndarray]:
    norm = np.linalg.norm(vec)
    if norm == 0:
        return None
    return vec / norm


def embed_tokens(tokens: Sequence[str], store: VectorStore) -> Optional[np.ndarray]:
    """Unit-length mean of in-vocabulary token vectors; None when all OOV."""
    vectors = [store.get(t) for t in tokens]
    vectors = [v for v in vectors if v is not None]
    if not vectors:
        return None
    return _normalize(np.mean(vectors, axis=0))


def _compose(parts: List[Optional[np.ndarray]], weights: List[float],
             dimension: int, w_position: float,
             position: Optional[float]) -> Optional[np.ndarray]:
    if all(p is None for p in parts):
        return None
    combined = np.zeros(dimension, dtype=np.float64)
    for part, weight in zip(parts, weights):
        if part is not None and weight > 0:
            combined = combined + weight * part
    if w_position > 0:
        coord = w_position * (position if position is not None else 0.0)
        combined = np.append(combined, coord)
    return _normalize(combined)


def embed_nugget(nugget: Nugget, store: VectorStore, labels: LabelMap,
                 w: SignalWeights) -> Optional[np.ndarray]:
    """Fuse label, mention and context signals (plus optional position
    coordinate) into one unit vector; None when all text signals are OOV."""
    label_phrase = labels.get(nugget.label, nugget.label)
    parts = [
        embed_tokens(tokenize(label_phrase), store),
        embed_tokens(tokenize(nugget.mention), store),
        embed_tokens(tokenize(nugget.context_sentence), store),
    ]
    return _compose(parts, [w.w_label, w.w_mention, w.w_context],
                    store.dimension, w.w_position, nugget.position)


def embed_attribute(name: str, store: VectorStore,
                    w: SignalWeights) -> Optional[np.ndarray]:
    """Embed an attribute name (underscore/camel-case aware); the position
    coordinate, when enabled, is zero."""
    vec = embed_tokens(tokenize_attribute_name(name), store)
    if vec is None:
        return None
    if w.w_position > 0:
        vec = np.append(vec, 0.0)
        vec = _normalize(vec)
    return vec


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise EmbeddingError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(1.0 - np.dot(a, b))


def load_label_map(path: str | Path) -> LabelMap:
    """Flat config file: one "LABEL = natural language phrase" per line;
    '#' starts a comment."""
    labels: LabelMap = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise EmbeddingError(f"{path}:{lineno}: expected LABEL = phrase")
            key, phrase = (part.strip() for part in line.split("=", 1))
            if not phrase:
                raise EmbeddingError(f"{path}:{lineno}: empty phrase for {key!r}")
            labels[key] = phrase
    return labels
