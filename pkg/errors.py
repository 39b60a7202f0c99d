"""
Exception hierarchy for knowledge-share.

Every error raised on purpose by the library derives from
KnowledgeShareError so the CLI can turn it into a data-error exit code.
"""

from typing import Optional


class KnowledgeShareError(Exception):
    """Root of all library errors."""


class InvalidTokenError(KnowledgeShareError, ValueError):
    pass


class InvalidWeightError(KnowledgeShareError, ValueError):
    pass


class UnknownActorError(KnowledgeShareError, LookupError):
    def __init__(self, actor: str):
        super().__init__(f"unknown actor id: {actor!r}")
        self.actor = actor


class EmptyGeneratorSetError(KnowledgeShareError, ValueError):
    def __init__(self):
        super().__init__("empty generator set")


class EmptyKnowledgeError(KnowledgeShareError, ValueError):
    def __init__(self, actor: str):
        super().__init__(f"empty knowledge base for actor: {actor!r}")
        self.actor = actor


class OracleLimitError(KnowledgeShareError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"oracle limit exceeded: {count} actors (limit {limit})")


class MatrixMismatchError(KnowledgeShareError):
    def __init__(self, detail: str = ""):
        message = "matrix does not match knowledge base"
        super().__init__(f"{message}: {detail}" if detail else message)


class InvalidGraphError(KnowledgeShareError, ValueError):
    pass


class UnknownVertexError(KnowledgeShareError, LookupError):
    def __init__(self, vertex: str):
        super().__init__(f"unknown vertex: {vertex!r}")
        self.vertex = vertex


class UnknownSeedError(KnowledgeShareError, LookupError):
    def __init__(self, seed: str):
        super().__init__(f"unknown seed actor: {seed!r}")
        self.seed = seed


class SpreadConfigError(KnowledgeShareError, ValueError):
    pass


class IngestError(KnowledgeShareError):
    """A rejected input row. `line` is 1-based (record number for JSON arrays)."""

    def __init__(self, path: str, message: str, line: Optional[int] = None):
        location = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{location}: {message}")
        self.path = str(path)
        self.line = line
        self.reason = message


class ArtifactError(KnowledgeShareError):
    """A persisted knowledge base, graph, trace or universe file could not be loaded."""
