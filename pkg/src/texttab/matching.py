"""Interactive per-attribute matching: temperature-based root sampling,
explore-away tree expansion, static matching, and table assembly."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from .corpus import DocumentCollection
from .embedding import cosine_distance
from .extraction import Nugget

SESSION_FORMAT_VERSION = 1

CONFIRM = "confirm"
REJECT = "reject"

UNEXPLORED = "unexplored"
CANDIDATE = "candidate"
CONFIRMED = "confirmed"
REJECTED = "rejected"

DistanceFn = Callable[[np.ndarray, np.ndarray], float]
FeedbackSource = Callable[["Candidate"], str]


class MatchingError(Exception):
    pass


@dataclass(frozen=True)
class Attribute:
    name: str
    embedding: np.ndarray


@dataclass
class TreeNode:
    nugget_id: str
    parent: Optional[str] = None
    children: List[str] = field(default_factory=list)
    expanded: bool = False


@dataclass
class SearchTree:
    roots: List[str] = field(default_factory=list)
    nodes: Dict[str, TreeNode] = field(default_factory=dict)

    def add_root(self, nugget_id: str) -> None:
        if nugget_id in self.nodes:
            raise MatchingError(f"{nugget_id} already in tree")
        self.roots.append(nugget_id)
        self.nodes[nugget_id] = TreeNode(nugget_id)

    def add_child(self, parent_id: str, nugget_id: str) -> None:
        if nugget_id in self.nodes:
            raise MatchingError(f"{nugget_id} already in tree")
        self.nodes[parent_id].children.append(nugget_id)
        self.nodes[nugget_id] = TreeNode(nugget_id, parent=parent_id)

    def expanded_ids(self) -> List[str]:
        return [nid for nid, node in self.nodes.items() if node.expanded]


@dataclass(frozen=True)
class SessionConfig:
    k: int = 2
    confirm_threshold: int = 10
    budget: int = 25
    q0: float = 0.05
    tau: float = math.inf
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise MatchingError("k must be >= 1")
        if self.budget < 1:
            raise MatchingError("budget must be >= 1")
        if not (0 < self.q0 <= 1):
            raise MatchingError("q0 must be in (0, 1]")
        if not self.tau > 0:
            raise MatchingError("tau must be positive")


@dataclass(frozen=True)
class Candidate:
    nugget_id: str
    distance: float
    parent: Optional[str]  # None for root-search samples


def candidate_successors(tree: SearchTree, x_id: str,
                         vectors: Mapping[str, np.ndarray],
                         eligible: Set[str],
                         dist: DistanceFn = cosine_distance) -> Set[str]:
    """Potential successors of x under the explore-away constraints:
    (1) closer to x than to any other already-expanded node, and
    (2) farther from every other tree node than x is from its parent
    (vacuous when x is a root)."""
    x_vec = vectors[x_id]
    other_expanded = [nid for nid in tree.expanded_ids() if nid != x_id]
    parent_id = tree.nodes[x_id].parent
    radius = dist(x_vec, vectors[parent_id]) if parent_id is not None else None
    other_tree = [nid for nid in tree.nodes if nid != x_id]
    result: Set[str] = set()
    for cid in eligible:
        if cid in tree.nodes:
            continue
        c_vec = vectors[cid]
        d_x = dist(c_vec, x_vec)
        if any(dist(c_vec, vectors[e]) <= d_x for e in other_expanded):
            continue
        if radius is not None and other_tree:
            if min(dist(c_vec, vectors[t]) for t in other_tree) <= radius:
                continue
        result.add(cid)
    return result


def select_candidates(cands: Set[str], x_id: str,
                      vectors: Mapping[str, np.ndarray], k: int,
                      dist: DistanceFn = cosine_distance) -> List[str]:
    """The k candidates closest to x, ties broken by ascending nugget id."""
    x_vec = vectors[x_id]
    ranked = sorted(cands, key=lambda cid: (dist(vectors[cid], x_vec), cid))
    return ranked[:k]


def static_match(confirmed: Mapping[str, np.ndarray],
                 doc_nuggets: Mapping[str, np.ndarray],
                 tau: float,
                 dist: DistanceFn = cosine_distance) -> Optional[Tuple[str, float]]:
    """Nearest nugget of one document to the confirmed group; None when the
    document has no nuggets or the best distance exceeds tau."""
    if not confirmed:
        raise MatchingError("static_match requires a non-empty confirmed set")
    best: Optional[Tuple[float, str]] = None
    for nid in sorted(doc_nuggets):
        d = min(dist(doc_nuggets[nid], cvec) for cvec in confirmed.values())
        if best is None or d < best[0]:
            best = (d, nid)
    if best is None or best[0] > tau:
        return None
    return best[1], best[0]


class MatchingSession:
    """Single-attribute interactive session.

    Candidates are offered one at a time via :meth:`peek` (idempotent until
    feedback arrives) and answered via :meth:`submit`.  Each answered
    candidate costs one interaction, whether it came from root sampling or
    tree expansion.
    """

    def __init__(self, attribute: Attribute, config: SessionConfig,
                 pool: Mapping[str, np.ndarray],
                 dist: DistanceFn = cosine_distance,
                 rng: Optional[random.Random] = None):
        self.attribute = attribute
        self.config = config
        self.pool = dict(pool)
        self.dist = dist
        self.rng = rng if rng is not None else random.Random(f"{config.seed}:{attribute.name}")
        self.tree = SearchTree()
        self.statuses: Dict[str, str] = {nid: UNEXPLORED for nid in self.pool}
        self.queue: List[str] = []
        self.interactions_used = 0
        self.confirmed_count = 0
        self.phase = "root_search"
        self.done_reason: Optional[str] = None
        self._offer: Optional[Candidate] = None
        self._batch: List[str] = []
        self._batch_parent: Optional[str] = None
        self._root_round = 0
        self._root_order: List[str] = []
        self._root_q: float = 0.0

    # -- candidate scheduling ------------------------------------------------

    def peek(self) -> Optional[Candidate]:
        """Current candidate, or None once the session is done."""
        self._advance()
        return self._offer

    def _eligible(self) -> List[str]:
        return [nid for nid, st in self.statuses.items()
                if st not in (CONFIRMED, REJECTED)]

    def _finish(self, reason: str) -> None:
        self.phase = "done"
        self.done_reason = reason
        self._offer = None
        self._batch = []
        self._root_order = []

    def _advance(self) -> None:
        while self._offer is None and self.phase != "done":
            if self.interactions_used >= self.config.budget:
                self._finish("budget")
                return
            if self.phase == "expanding":
                if self._batch:
                    nid = self._batch.pop(0)
                    if self.statuses.get(nid) != UNEXPLORED:
                        continue
                    # re-check the explore-away constraints: a confirmed
                    # sibling may have invalidated a batch mate
                    still_valid = nid in candidate_successors(
                        self.tree, self._batch_parent, self._with_tree_vectors(),
                        {nid}, self.dist)
                    if not still_valid:
                        continue
                    self.statuses[nid] = CANDIDATE
                    self._offer = Candidate(
                        nid, self.dist(self.pool[nid], self.pool[self._batch_parent]),
                        parent=self._batch_parent)
                elif self.queue:
                    x_id = self.queue.pop(0)
                    eligible = set(self._eligible())
                    cands = candidate_successors(
                        self.tree, x_id, self._with_tree_vectors(), eligible, self.dist)
                    selected = select_candidates(cands, x_id, self.pool,
                                                 self.config.k, self.dist)
                    self.tree.nodes[x_id].expanded = True
                    self._batch = selected
                    self._batch_parent = x_id
                else:
                    self.phase = "root_search"
                    self._root_round = 0
                    self._root_order = []
                    self._root_q = 0.0
            else:  # root_search
                if not self._root_order:
                    eligible = self._eligible()
                    if not eligible or self._root_q >= 1.0:
                        self._finish("no_root")
                        return
                    q = min(self.config.q0 * (2 ** self._root_round), 1.0)
                    ranked = sorted(
                        eligible,
                        key=lambda nid: (self.dist(self.pool[nid],
                                                   self.attribute.embedding), nid))
                    m = max(1, math.ceil(q * len(ranked)))
                    subset = ranked[:m]
                    self._root_order = self.rng.sample(subset, len(subset))
                    self._root_q = q
                    self._root_round += 1
                    continue
                nid = self._root_order.pop(0)
                if self.statuses.get(nid) != UNEXPLORED:
                    continue
                self.statuses[nid] = CANDIDATE
                self._offer = Candidate(
                    nid, self.dist(self.pool[nid], self.attribute.embedding),
                    parent=None)

    def _with_tree_vectors(self) -> Mapping[str, np.ndarray]:
        return self.pool

    # -- feedback ------------------------------------------------------------

    def submit(self, nugget_id: str, decision: str) -> None:
        if self.phase == "done":
            raise MatchingError("session complete")
        if decision not in (CONFIRM, REJECT):
            raise MatchingError(f"unknown decision {decision!r}")
        offer = self.peek()
        if offer is None:
            raise MatchingError("session complete")
        if nugget_id != offer.nugget_id:
            raise MatchingError(
                f"feedback for {nugget_id!r} but current candidate is "
                f"{offer.nugget_id!r}")
        self.interactions_used += 1
        if decision == CONFIRM:
            self.statuses[nugget_id] = CONFIRMED
            self.confirmed_count += 1
            if offer.parent is None:
                self.tree.add_root(nugget_id)
                self.phase = "expanding"
                self._root_order = []
                self._root_q = 0.0
                self._root_round = 0
            else:
                self.tree.add_child(offer.parent, nugget_id)
            self.queue.append(nugget_id)
        else:
            self.statuses[nugget_id] = REJECTED
        self._offer = None
        if self.phase != "done" and self.confirmed_count >= self.config.confirm_threshold:
            self._finish("threshold")
        elif self.phase != "done" and self.interactions_used >= self.config.budget:
            self._finish("budget")

    def confirmed_ids(self) -> List[str]:
        return sorted(self.tree.nodes)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": SESSION_FORMAT_VERSION,
            "attribute": self.attribute.name,
            "config": {
                "k": self.config.k,
                "confirm_threshold": self.config.confirm_threshold,
                "budget": self.config.budget,
                "q0": self.config.q0,
                "tau": "inf" if math.isinf(self.config.tau) else self.config.tau,
                "seed": self.config.seed,
            },
            "phase": self.phase,
            "done_reason": self.done_reason,
            "interactions_used": self.interactions_used,
            "confirmed_count": self.confirmed_count,
            "statuses": {nid: st for nid, st in sorted(self.statuses.items())
                         if st != UNEXPLORED},
            "tree": {
                "roots": self.tree.roots,
                "nodes": {
                    nid: {"parent": node.parent, "children": node.children,
                          "expanded": node.expanded}
                    for nid, node in sorted(self.tree.nodes.items())
                },
            },
            "queue": self.queue,
            "offer": None if self._offer is None else {
                "nugget_id": self._offer.nugget_id,
                "distance": self._offer.distance,
                "parent": self._offer.parent,
            },
            "batch": self._batch,
            "batch_parent": self._batch_parent,
            "root_round": self._root_round,
            "root_order": self._root_order,
            "root_q": self._root_q,
            "rng_state": _encode_rng_state(self.rng.getstate()),
        }

    @classmethod
    def from_dict(cls, state: dict, attribute: Attribute,
                  pool: Mapping[str, np.ndarray],
                  dist: DistanceFn = cosine_distance) -> "MatchingSession":
        if state.get("version") != SESSION_FORMAT_VERSION:
            raise MatchingError(f"unsupported session version {state.get('version')!r}")
        cfg = state["config"]
        tau = math.inf if cfg["tau"] == "inf" else float(cfg["tau"])
        config = SessionConfig(k=cfg["k"], confirm_threshold=cfg["confirm_threshold"],
                               budget=cfg["budget"], q0=cfg["q0"], tau=tau,
                               seed=cfg["seed"])
        session = cls(attribute, config, pool, dist=dist)
        session.phase = state["phase"]
        session.done_reason = state["done_reason"]
        session.interactions_used = state["interactions_used"]
        session.confirmed_count = state["confirmed_count"]
        session.statuses.update(state["statuses"])
        tree = SearchTree(roots=list(state["tree"]["roots"]))
        for nid, node in state["tree"]["nodes"].items():
            tree.nodes[nid] = TreeNode(nid, parent=node["parent"],
                                       children=list(node["children"]),
                                       expanded=node["expanded"])
        session.tree = tree
        session.queue = list(state["queue"])
        offer = state["offer"]
        session._offer = None if offer is None else Candidate(
            offer["nugget_id"], offer["distance"], offer["parent"])
        session._batch = list(state["batch"])
        session._batch_parent = state["batch_parent"]
        session._root_round = state["root_round"]
        session._root_order = list(state["root_order"])
        session._root_q = state["root_q"]
        session.rng.setstate(_decode_rng_state(state["rng_state"]))
        return session

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)
            fh.write("\n")


def _encode_rng_state(state):
    version, internal, gauss = state
    return [version, list(internal), gauss]


def _decode_rng_state(state):
    version, internal, gauss = state
    return (version, tuple(internal), gauss)


def run_matching(session: MatchingSession, feedback: FeedbackSource) -> MatchingSession:
    """Drive the session to completion with the given feedback source."""
    while (candidate := session.peek()) is not None:
        session.submit(candidate.nugget_id, feedback(candidate))
    return session


# -- table assembly ---------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    value: str
    kind: str
    nugget_id: str
    span: Tuple[int, int]
    distance: float


@dataclass
class ExtractedTable:
    document_ids: List[str]
    attribute_names: List[str]
    cells: Dict[Tuple[str, str], Optional[Cell]]

    def cell(self, doc_id: str, attr: str) -> Optional[Cell]:
        return self.cells[(doc_id, attr)]

    def to_csv(self) -> str:
        import csv
        import io
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["document_id"] + self.attribute_names)
        for doc_id in self.document_ids:
            row = [doc_id]
            for attr in self.attribute_names:
                cell = self.cells[(doc_id, attr)]
                row.append("" if cell is None else cell.value)
            writer.writerow(row)
        return buf.getvalue()

    def to_json(self) -> str:
        rows = []
        for doc_id in self.document_ids:
            cells = {}
            for attr in self.attribute_names:
                cell = self.cells[(doc_id, attr)]
                cells[attr] = None if cell is None else {
                    "value": cell.value,
                    "kind": cell.kind,
                    "nugget_id": cell.nugget_id,
                    "span": list(cell.span),
                    "distance": cell.distance,
                }
            rows.append({"document_id": doc_id, "cells": cells})
        return json.dumps({"attributes": self.attribute_names, "rows": rows},
                          indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExtractedTable":
        payload = json.loads(text)
        attrs = payload["attributes"]
        document_ids = []
        cells: Dict[Tuple[str, str], Optional[Cell]] = {}
        for row in payload["rows"]:
            doc_id = row["document_id"]
            document_ids.append(doc_id)
            for attr in attrs:
                raw = row["cells"].get(attr)
                cells[(doc_id, attr)] = None if raw is None else Cell(
                    value=raw["value"], kind=raw["kind"],
                    nugget_id=raw["nugget_id"], span=tuple(raw["span"]),
                    distance=raw["distance"])
        return cls(document_ids, attrs, cells)


def build_table(collection: DocumentCollection,
                nuggets: Sequence[Nugget],
                embeddings: Mapping[str, np.ndarray],
                sessions: Mapping[str, MatchingSession],
                dist: DistanceFn = cosine_distance) -> ExtractedTable:
    """One row per document; cells filled by confirmed nuggets first, then by
    static matching against each attribute's confirmed group."""
    by_id = {n.id: n for n in nuggets}
    by_doc: Dict[str, Dict[str, np.ndarray]] = {doc.id: {} for doc in collection}
    for n in nuggets:
        if n.id in embeddings:
            by_doc[n.document_id][n.id] = embeddings[n.id]

    def cell_for(nid: str, distance: float) -> Cell:
        nugget = by_id[nid]
        canonical = nugget.canonical
        if canonical is None:
            value, kind = nugget.mention.strip(), "text"
        else:
            value, kind = canonical.value, canonical.kind
        return Cell(value=value, kind=kind, nugget_id=nid,
                    span=nugget.mention_span, distance=distance)

    cells: Dict[Tuple[str, str], Optional[Cell]] = {}
    attribute_names = list(sessions)
    for attr_name, session in sessions.items():
        confirmed = {nid: embeddings[nid] for nid in session.confirmed_ids()
                     if nid in embeddings}
        for doc in collection:
            key = (doc.id, attr_name)
            if not confirmed:
                cells[key] = None
                continue
            own = sorted(nid for nid in confirmed if by_id[nid].document_id == doc.id)
            if own:
                cells[key] = cell_for(own[0], 0.0)
                continue
            hit = static_match(confirmed, by_doc[doc.id], session.config.tau, dist)
            cells[key] = None if hit is None else cell_for(hit[0], hit[1])
    return ExtractedTable([doc.id for doc in collection], attribute_names, cells)
