"""
Persisted Artifacts
===================
JSON documents for the intermediate pipeline files (knowledge base, graph,
spread trace) and for situation universes. Documents are written compact,
with every collection already in its canonical sorted order, so identical
inputs give byte-identical files.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from core_model import KnowledgeBase, SituationUniverse
from diffusion import SpreadTrace
from errors import ArtifactError, KnowledgeShareError
from graph_builder import KnowledgeGraph, WeightMode

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Document = TypeVar("Document", bound=BaseModel)


class KnowledgeBaseDocument(BaseModel):
    actors: List[str]
    universe: List[str]
    sigma: Dict[str, Dict[str, float]]

    @classmethod
    def from_domain(cls, kb: KnowledgeBase) -> "KnowledgeBaseDocument":
        return cls(
            actors=list(kb.actors),
            universe=list(kb.universe),
            sigma={a: dict(h) for a, h in kb.sigma.items()},
        )

    def to_domain(self) -> KnowledgeBase:
        return KnowledgeBase(actors=tuple(self.actors), universe=tuple(self.universe), sigma=self.sigma)


class EdgeRecord(BaseModel):
    source: str
    target: str
    weight: float


class EdgeListDocument(BaseModel):
    """The edge-json export format."""
    vertices: List[str]
    edges: List[EdgeRecord]

    @classmethod
    def from_graph(cls, g: KnowledgeGraph) -> "EdgeListDocument":
        return cls(
            vertices=g.vertices,
            edges=[EdgeRecord(source=s, target=t, weight=w) for s, t, w in g.edges],
        )


class GraphDocument(EdgeListDocument):
    """edge-json plus the construction parameters needed to rebuild the graph."""
    weight_mode: WeightMode
    threshold: float

    @classmethod
    def from_graph(cls, g: KnowledgeGraph) -> "GraphDocument":
        edges = EdgeListDocument.from_graph(g)
        return cls(
            vertices=edges.vertices,
            edges=edges.edges,
            weight_mode=g.weight_mode,
            threshold=g.threshold,
        )

    def to_domain(self) -> KnowledgeGraph:
        return KnowledgeGraph.from_edges(
            self.vertices,
            [(e.source, e.target, e.weight) for e in self.edges],
            weight_mode=self.weight_mode,
            threshold=self.threshold,
        )


class UniverseDocument(BaseModel):
    situations: List[str]
    satisfies: Dict[str, List[str]] = {}

    def to_domain(self) -> SituationUniverse:
        return SituationUniverse(
            situations=tuple(self.situations),
            satisfied_by={m: frozenset(gs) for m, gs in self.satisfies.items()},
        )


# ============================================
# FILE I/O
# ============================================

def dump_document(document: BaseModel) -> bytes:
    return (document.model_dump_json(by_alias=True) + "\n").encode("utf-8")


def _write(path: PathLike, document: BaseModel) -> None:
    Path(path).write_bytes(dump_document(document))
    logger.info(f"[ARTIFACT] wrote {type(document).__name__} to {path}")


def _read(path: PathLike, model: Type[Document]) -> Document:
    try:
        return model.model_validate_json(Path(path).read_bytes())
    except ValidationError as exc:
        raise ArtifactError(f"{path}: not a valid {model.__name__}: {exc}") from None


def _rebuild(path: PathLike, document):
    try:
        return document.to_domain()
    except KnowledgeShareError as exc:
        raise ArtifactError(f"{path}: {exc}") from None


def save_knowledge_base(kb: KnowledgeBase, path: PathLike) -> None:
    _write(path, KnowledgeBaseDocument.from_domain(kb))


def load_knowledge_base(path: PathLike) -> KnowledgeBase:
    return _rebuild(path, _read(path, KnowledgeBaseDocument))


def save_graph(g: KnowledgeGraph, path: PathLike) -> None:
    _write(path, GraphDocument.from_graph(g))


def load_graph(path: PathLike) -> KnowledgeGraph:
    return _rebuild(path, _read(path, GraphDocument))


def save_trace(trace: SpreadTrace, path: PathLike) -> None:
    _write(path, trace)


def load_trace(path: PathLike) -> SpreadTrace:
    return _read(path, SpreadTrace)


def load_universe(path: PathLike) -> SituationUniverse:
    return _rebuild(path, _read(path, UniverseDocument))


def to_json_bytes(payload) -> bytes:
    """Compact, key-sorted JSON for ad-hoc CLI output."""
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")
