"""
File formats for knowledge-share

Architecture:
- ingest:    incidence CSV/JSON → KnowledgeBase
- export:    byte-deterministic graph, trace, overlap and knowledge-base renderings
- artifacts: JSON documents persisted between CLI steps
"""

from .artifacts import (
    load_graph,
    load_knowledge_base,
    load_trace,
    load_universe,
    save_graph,
    save_knowledge_base,
    save_trace,
)
from .export import (
    GraphFormat,
    TraceFormat,
    export_graph,
    export_knowledge_base,
    export_overlap,
    export_trace,
)
from .ingest import IncidenceRecord, InputFormat, ingest

__all__ = [
    'IncidenceRecord',
    'InputFormat',
    'GraphFormat',
    'TraceFormat',
    'ingest',
    'export_graph',
    'export_trace',
    'export_overlap',
    'export_knowledge_base',
    'save_knowledge_base',
    'load_knowledge_base',
    'save_graph',
    'load_graph',
    'save_trace',
    'load_trace',
    'load_universe',
]
