"""
Exporters
=========
Byte-deterministic renderings of graphs, traces, overlap matrices and
knowledge bases. Sorting rules are part of each format:

- graph edge-json: {"vertices": sorted, "edges": [{source, target, weight}] sorted by (source, target)}
- graph dot:       undirected graph, weight as edge label (rendered from templates/graph.dot.j2)
- graph csv:       header `source,target,weight`, rows sorted by (source, target)
- trace json:      the SpreadTrace fields
- trace csv:       header `round,actor_id`, rows sorted by (round, actor)
- overlap csv:     header `source,target,overlap`
- knowledge csv:   `actor_id,generator_id,weight` rows without header (ingest round-trips it)

Weights print in shortest round-trip form, integral values without a
decimal point ("1", not "1.0").
"""

import csv
from enum import Enum
from io import StringIO
from typing import Iterable, Optional, Sequence

from jinja2 import Environment, FileSystemLoader

from config import TEMPLATES_DIR
from core_model import KnowledgeBase
from diffusion import SpreadTrace
from .artifacts import EdgeListDocument, dump_document
from graph_builder import KnowledgeGraph
from overlap import OverlapMatrix


class GraphFormat(str, Enum):
    EDGE_JSON = "edge-json"
    DOT = "dot"
    CSV = "csv"


class TraceFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


def format_weight(weight: float) -> str:
    value = float(weight)
    if value.is_integer():
        return str(int(value))
    return repr(value)


def dot_id(token: str) -> str:
    escaped = str(token).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


jinja_env = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    keep_trailing_newline=True,
)
jinja_env.filters["dot_id"] = dot_id
jinja_env.filters["weight"] = format_weight


def _csv_bytes(rows: Iterable[Sequence], header: Optional[Sequence[str]] = None) -> bytes:
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if header:
        writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().encode("utf-8")


def export_graph(g: KnowledgeGraph, fmt: GraphFormat = GraphFormat.EDGE_JSON) -> bytes:
    fmt = GraphFormat(fmt)
    if fmt is GraphFormat.EDGE_JSON:
        return dump_document(EdgeListDocument.from_graph(g))
    if fmt is GraphFormat.DOT:
        document = EdgeListDocument.from_graph(g)
        template = jinja_env.get_template("graph.dot.j2")
        return template.render(vertices=document.vertices, edges=document.edges).encode("utf-8")
    return _csv_bytes(
        ((s, t, format_weight(w)) for s, t, w in g.edges),
        header=("source", "target", "weight"),
    )


def export_trace(t: SpreadTrace, fmt: TraceFormat = TraceFormat.JSON) -> bytes:
    fmt = TraceFormat(fmt)
    if fmt is TraceFormat.JSON:
        return dump_document(t)
    rows = sorted((number, actor) for number, newly in enumerate(t.rounds) for actor in newly)
    return _csv_bytes(rows, header=("round", "actor_id"))


def export_overlap(matrix: OverlapMatrix) -> bytes:
    return _csv_bytes(
        ((a, b, format_weight(v)) for (a, b), v in sorted(matrix.items())),
        header=("source", "target", "overlap"),
    )


def export_knowledge_base(kb: KnowledgeBase) -> bytes:
    return _csv_bytes((a, g, format_weight(w)) for a, g, w in kb.records())
