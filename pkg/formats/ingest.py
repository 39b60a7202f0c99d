"""
Incidence Data Ingestion
========================
Reads actor/generator incidence lists into a KnowledgeBase.

Both formats are read as UTF-8; a leading byte order mark is ignored.

CSV:  one `actor_id,generator_id[,weight]` row per line, optional header,
      weight defaults to 1.0, blank lines ignored.
JSON: either an array of {"actor_id", "generator_id", "weight"?} records or
      a persisted knowledge-base document.

Rules:
- duplicate (actor, generator) rows keep the MAXIMUM weight
- weight 0 rows are rejected; the error lists every offending line
- any other malformed row fails immediately, naming its 1-based line
- an empty file is a valid, empty knowledge base
"""

import codecs
import csv
import io
import json
import logging
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError, field_validator

from core_model import KnowledgeBase, validate_token, validate_weight
from errors import IngestError, KnowledgeShareError
from .artifacts import KnowledgeBaseDocument

logger = logging.getLogger(__name__)

CSV_HEADER = ("actor_id", "generator_id", "weight")


class InputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class IncidenceRecord(BaseModel):
    actor_id: str
    generator_id: str
    weight: float = 1.0

    @field_validator("actor_id", "generator_id")
    @classmethod
    def _token(cls, value: str) -> str:
        return validate_token(value)


Triple = Tuple[str, str, float]


def _parse_weight(raw: Optional[str]) -> float:
    if raw is None:
        return 1.0
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"weight is not a number: {raw!r}") from None


def _check_row(path: str, line: int, actor: str, generator: str, weight: float,
               zero_lines: List[int]) -> Optional[Triple]:
    if weight == 0.0:
        zero_lines.append(line)
        return None
    try:
        return (
            validate_token(actor, "actor id"),
            validate_token(generator, "generator id"),
            validate_weight(weight),
        )
    except KnowledgeShareError as exc:
        raise IngestError(path, str(exc), line=line) from None


def _reject_zero_weights(path: str, zero_lines: List[int], unit: str = "line") -> None:
    if zero_lines:
        listed = ", ".join(str(n) for n in zero_lines)
        raise IngestError(path, f"weight 0 rows rejected on {unit}s {listed}")


def _decode_error(path: str, raw: bytes, exc: UnicodeDecodeError) -> IngestError:
    line = raw.count(b"\n", 0, exc.start) + 1
    return IngestError(path, f"not valid UTF-8 (byte 0x{raw[exc.start]:02x})", line=line)


def _read_text(path: str) -> str:
    raw = Path(path).read_bytes().removeprefix(codecs.BOM_UTF8)
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise _decode_error(path, raw, exc) from None


def _read_csv(path: str) -> List[Triple]:
    triples: List[Triple] = []
    zero_lines: List[int] = []
    reader = csv.reader(io.StringIO(_read_text(path), newline=""))
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if line == 1 and tuple(cell.strip() for cell in row) in (CSV_HEADER, CSV_HEADER[:2]):
            continue
        if len(row) not in (2, 3):
            raise IngestError(path, f"expected 2 or 3 fields, got {len(row)}", line=line)
        try:
            weight = _parse_weight(row[2] if len(row) == 3 else None)
        except ValueError as exc:
            raise IngestError(path, str(exc), line=line) from None
        triple = _check_row(path, line, row[0], row[1], weight, zero_lines)
        if triple:
            triples.append(triple)
    _reject_zero_weights(path, zero_lines)
    return triples


def _read_json(path: str) -> Union[List[Triple], KnowledgeBase]:
    text = _read_text(path)
    if not text.strip():
        return []
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(path, f"invalid JSON: {exc.msg}", line=exc.lineno) from None

    if isinstance(payload, dict):
        try:
            return KnowledgeBaseDocument.model_validate(payload).to_domain()
        except (ValidationError, KnowledgeShareError) as exc:
            raise IngestError(path, f"invalid knowledge base document: {exc}") from None

    if not isinstance(payload, list):
        raise IngestError(path, "expected an array of records or a knowledge base object")

    triples: List[Triple] = []
    zero_lines: List[int] = []
    for number, item in enumerate(payload, start=1):
        try:
            record = IncidenceRecord.model_validate(item)
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(p) for p in first["loc"]) or "record"
            raise IngestError(path, f"record {number}: {where}: {first['msg']}", line=number) from None
        triple = _check_row(path, number, record.actor_id, record.generator_id, record.weight, zero_lines)
        if triple:
            triples.append(triple)
    _reject_zero_weights(path, zero_lines, unit="record")
    return triples


def ingest(path: Union[str, Path], fmt: InputFormat = InputFormat.CSV) -> KnowledgeBase:
    """Build a KnowledgeBase from an incidence file."""
    path = str(path)
    fmt = InputFormat(fmt)
    loaded = _read_csv(path) if fmt is InputFormat.CSV else _read_json(path)
    if isinstance(loaded, KnowledgeBase):
        kb = loaded
    else:
        kb = KnowledgeBase.from_records(loaded)
    if not kb.actors:
        logger.warning(f"[INGEST] {path} holds no incidence rows - empty knowledge base")
    logger.info(f"[INGEST] {path}: {len(kb.actors)} actors, {len(kb.universe)} generators")
    return kb
