"""Glue shared by the CLI and the HTTP service: loading inputs, embedding
the pool, and constructing per-attribute sessions."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .corpus import DocumentCollection, load_documents
from .embedding import (LabelMap, SignalWeights, VectorStore, embed_attribute,
                        embed_nugget, load_label_map, load_vector_store)
from .extraction import Nugget, import_interchange
from .matching import Attribute, MatchingSession, SessionConfig


class PipelineError(Exception):
    pass


@dataclass
class MatchingContext:
    collection: DocumentCollection
    nuggets: List[Nugget]
    store: VectorStore
    labels: LabelMap
    weights: SignalWeights
    config: SessionConfig
    attributes: List[Attribute] = field(default_factory=list)
    embeddings: Dict[str, np.ndarray] = field(default_factory=dict)
    skipped_oov: int = 0

    def nugget(self, nugget_id: str) -> Nugget:
        return self._by_id[nugget_id]

    def __post_init__(self) -> None:
        self._by_id = {n.id: n for n in self.nuggets}


def build_context(docs_path: str | Path, nuggets_path: str | Path,
                  vectors_path: str | Path, attribute_names: List[str],
                  config: SessionConfig, weights: SignalWeights,
                  labelmap_path: Optional[str | Path] = None) -> MatchingContext:
    if not attribute_names:
        raise PipelineError("attribute list must not be empty")
    if len(set(attribute_names)) != len(attribute_names):
        raise PipelineError("attribute names must be unique")
    collection = load_documents(docs_path)
    nuggets = import_interchange(nuggets_path, collection)
    store = load_vector_store(vectors_path)
    labels = load_label_map(labelmap_path) if labelmap_path else {}
    ctx = MatchingContext(collection=collection, nuggets=nuggets, store=store,
                          labels=labels, weights=weights, config=config)
    for nugget in nuggets:
        vec = embed_nugget(nugget, store, labels, weights)
        if vec is None:
            ctx.skipped_oov += 1
        else:
            ctx.embeddings[nugget.id] = vec
    for name in attribute_names:
        vec = embed_attribute(name, store, weights)
        if vec is None:
            raise PipelineError(f"attribute {name!r} is fully out of vocabulary")
        ctx.attributes.append(Attribute(name=name, embedding=vec))
    return ctx


def make_sessions(ctx: MatchingContext) -> Dict[str, MatchingSession]:
    return {
        attr.name: MatchingSession(attr, ctx.config, ctx.embeddings)
        for attr in ctx.attributes
    }
