"""
Actor Graph
===========
Turns an overlap matrix into a weighted undirected graph.

- every actor becomes a vertex (isolated actors included)
- every actor pair with a weight above the threshold becomes an edge

Weight modes:
- intersection: |Σ_a ∩ Σ_b| (default)
- union:        |Σ_a ∪ Σ_b| = |Σ_a| + |Σ_b| - |Σ_a ∩ Σ_b|
- normalized:   |Σ_a ∩ Σ_b| / min(|Σ_a|, |Σ_b|), always in (0, 1]

An edge exists only when its weight is strictly greater than the threshold.
With weighted-min overlaps the sizes |Σ| become weight sums.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, List, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel

from config import DEFAULT_THRESHOLD, UNION_MODE_WARN_ACTORS
from core_model import ActorId, KnowledgeBase, validate_token
from errors import InvalidGraphError, MatrixMismatchError, UnknownVertexError
from overlap import OverlapMatrix

logger = logging.getLogger(__name__)

Edge = Tuple[ActorId, ActorId, float]


class WeightMode(str, Enum):
    INTERSECTION = "intersection"
    UNION = "union"
    NORMALIZED = "normalized"


@dataclass(frozen=True)
class KnowledgeGraph:
    """Immutable weighted actor graph. Vertices and edges come back in lexicographic order."""
    graph: nx.Graph
    weight_mode: WeightMode = WeightMode.INTERSECTION
    threshold: float = DEFAULT_THRESHOLD

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[ActorId],
        edges: Iterable[Edge],
        weight_mode: WeightMode = WeightMode.INTERSECTION,
        threshold: float = DEFAULT_THRESHOLD,
    ) -> "KnowledgeGraph":
        weight_mode = WeightMode(weight_mode)
        if threshold < 0:
            raise InvalidGraphError(f"threshold must be >= 0, got {threshold}")

        g = nx.Graph()
        ordered = sorted({validate_token(v, "vertex") for v in vertices})
        g.add_nodes_from(ordered)
        checked = []
        for source, target, weight in edges:
            if source == target:
                raise InvalidGraphError(f"self-loop on {source!r}")
            if source not in g or target not in g:
                missing = source if source not in g else target
                raise UnknownVertexError(missing)
            if source > target:
                source, target = target, source
            weight = float(weight)
            if not weight > threshold:
                raise InvalidGraphError(
                    f"edge ({source}, {target}) weight {weight} is not above threshold {threshold}"
                )
            if weight_mode is WeightMode.NORMALIZED and weight > 1.0:
                raise InvalidGraphError(f"normalized weight above 1 on ({source}, {target}): {weight}")
            checked.append((source, target, weight))
        checked.sort()
        for (source, target, _), (next_source, next_target, _) in zip(checked, checked[1:]):
            if (source, target) == (next_source, next_target):
                raise InvalidGraphError(f"duplicate edge ({source}, {target})")
        g.add_weighted_edges_from(checked)
        return cls(graph=nx.freeze(g), weight_mode=weight_mode, threshold=float(threshold))

    @property
    def vertices(self) -> List[ActorId]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> List[Edge]:
        """(source, target, weight) with source < target, sorted."""
        return sorted(
            (min(u, v), max(u, v), float(w)) for u, v, w in self.graph.edges(data="weight")
        )

    @property
    def order(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def size(self) -> int:
        return self.graph.number_of_edges()

    def __contains__(self, vertex: object) -> bool:
        return vertex in self.graph

    def weight(self, u: ActorId, v: ActorId) -> float:
        return float(self.graph.edges[u, v]["weight"])


class GraphStats(BaseModel):
    order: int
    size: int
    degree_histogram: List[int]
    component_count: int
    largest_component_size: int


# ============================================
# CONSTRUCTION
# ============================================

def _edge_weight(intersection: float, size_a: float, size_b: float, mode: WeightMode) -> float:
    if mode is WeightMode.INTERSECTION:
        return float(intersection)
    if mode is WeightMode.UNION:
        return float(size_a + size_b - intersection)
    smaller = min(size_a, size_b)
    if smaller <= 0:
        return 0.0
    # weighted-min sums may differ from the size sums in the last bit
    return min(1.0, float(intersection) / smaller)


def build_graph(
    kb: KnowledgeBase,
    matrix: OverlapMatrix,
    weight_mode: WeightMode = WeightMode.INTERSECTION,
    threshold: float = DEFAULT_THRESHOLD,
) -> KnowledgeGraph:
    """Vertices = every actor; edge {a, b} iff the selected weight exceeds threshold."""
    weight_mode = WeightMode(weight_mode)
    if tuple(matrix.actors) != tuple(kb.actors):
        raise MatrixMismatchError(f"{len(matrix.actors)} matrix actors vs {len(kb.actors)} in knowledge base")

    sizes = {actor: matrix.size_of(actor) for actor in kb.actors}
    edges: List[Edge] = []

    if weight_mode is WeightMode.UNION:
        # actors with an empty Σ stay isolated; every other pair is a candidate
        knowing = [actor for actor in kb.actors if sizes[actor] > 0]
        if len(knowing) > UNION_MODE_WARN_ACTORS:
            logger.warning(f"[GRAPH] union mode scores all pairs of {len(knowing)} actors")
        entries = matrix.entries
        pairs: Iterable[Tuple[Tuple[ActorId, ActorId], float]] = (
            ((a, b), entries.get((a, b), 0)) for a, b in combinations(knowing, 2)
        )
    else:
        pairs = matrix.items()

    for (a, b), intersection in pairs:
        weight = _edge_weight(intersection, sizes[a], sizes[b], weight_mode)
        if weight > threshold:
            edges.append((a, b, weight))

    graph = KnowledgeGraph.from_edges(kb.actors, edges, weight_mode, threshold)
    logger.info(
        f"[GRAPH] {weight_mode.value} graph: |V|={graph.order}, |E|={graph.size}, threshold={threshold}"
    )
    return graph


# ============================================
# QUERIES
# ============================================

def graph_stats(g: KnowledgeGraph) -> GraphStats:
    """Order, size, degree histogram (index = degree) and connected components."""
    components = [len(c) for c in nx.connected_components(g.graph)]
    return GraphStats(
        order=g.order,
        size=g.size,
        degree_histogram=nx.degree_histogram(g.graph),
        component_count=len(components),
        largest_component_size=max(components, default=0),
    )


def neighbors(g: KnowledgeGraph, v: ActorId) -> List[Tuple[ActorId, float]]:
    """Lexicographically ordered adjacency list of v."""
    if v not in g.graph:
        raise UnknownVertexError(v)
    return sorted((u, float(attrs["weight"])) for u, attrs in g.graph.adj[v].items())


def components_touching(g: KnowledgeGraph, vertices: Sequence[ActorId]) -> set:
    """Union of the connected components containing any of the given vertices."""
    touched = set()
    for v in vertices:
        if v not in touched:
            touched |= nx.node_connected_component(g.graph, v)
    return touched
