"""
Shared Knowledge Between Actors
===============================
Pairwise overlap |Σ_a ∩ Σ_b| for every actor pair.

The all-pairs join never scans full Σ sets pairwise:
1. Build an inverted index generator → posting list of (actor, weight)
2. Every posting list contributes one unit (or min weight) to each pair it contains
3. Contributions are buffered and flushed into a sparse upper-triangular matrix

Memory stays proportional to the number of nonzero pairs plus one buffer;
the dense n×n matrix is never built.

Two modes:
- count:         |Σ_a ∩ Σ_b| as exact integers
- weighted-min:  Σ over shared g of min(f_a(g), f_b(g))
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from config import DEFAULT_WORKERS, ORACLE_ACTOR_LIMIT, OVERLAP_CHUNK_PAIRS
from core_model import ActorId, GeneratorId, KnowledgeBase
from errors import OracleLimitError, UnknownActorError

logger = logging.getLogger(__name__)

Pair = Tuple[ActorId, ActorId]


class OverlapMode(str, Enum):
    COUNT = "count"
    WEIGHTED_MIN = "weighted-min"


@dataclass(frozen=True)
class InvertedIndex:
    """generator → [(actor, weight), ...] sorted by actor."""
    postings: Mapping[GeneratorId, Tuple[Tuple[ActorId, float], ...]]

    @classmethod
    def from_knowledge_base(cls, kb: KnowledgeBase) -> "InvertedIndex":
        postings: Dict[GeneratorId, List[Tuple[ActorId, float]]] = {}
        # kb.records() is sorted by actor, so every list comes out sorted
        for actor, generator, weight in kb.records():
            postings.setdefault(generator, []).append((actor, weight))
        return cls(postings={g: tuple(p) for g, p in sorted(postings.items())})

    def __len__(self) -> int:
        return len(self.postings)

    def pair_contributions(self) -> int:
        """How many (pair, generator) contributions the join will accumulate."""
        return sum(len(p) * (len(p) - 1) // 2 for p in self.postings.values())


@dataclass(frozen=True)
class OverlapMatrix:
    """
    Sparse symmetric overlap matrix.

    Only pairs (a, b) with a < b and a positive overlap are stored. The
    diagonal is defined rather than stored: |Σ_a| in count mode, the
    weight sum of Σ_a in weighted-min mode.
    """
    actors: Tuple[ActorId, ...]
    mode: OverlapMode
    upper: csr_matrix
    diagonal: np.ndarray
    _positions: Mapping[ActorId, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_positions", {a: i for i, a in enumerate(self.actors)})

    @property
    def entries(self) -> Dict[Pair, float]:
        """{(a, b): value} with a < b, in (a, b) order."""
        return dict(self.items())

    def items(self) -> Iterator[Tuple[Pair, float]]:
        cast = int if self.mode is OverlapMode.COUNT else float
        upper = self.upper
        for row in range(upper.shape[0]):
            start, end = upper.indptr[row], upper.indptr[row + 1]
            for col, value in zip(upper.indices[start:end], upper.data[start:end]):
                yield (self.actors[row], self.actors[col]), cast(value)

    def value(self, a: ActorId, b: ActorId) -> float:
        i, j = self._index(a), self._index(b)
        cast = int if self.mode is OverlapMode.COUNT else float
        if i == j:
            return cast(self.diagonal[i])
        if i > j:
            i, j = j, i
        return cast(self.upper[i, j])

    def size_of(self, actor: ActorId) -> float:
        return self.value(actor, actor)

    def _index(self, actor: ActorId) -> int:
        try:
            return self._positions[actor]
        except KeyError:
            raise UnknownActorError(actor) from None

    @property
    def nnz(self) -> int:
        return int(self.upper.nnz)

    def __len__(self) -> int:
        return self.nnz

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OverlapMatrix):
            return NotImplemented
        return (
            self.actors == other.actors
            and self.mode is other.mode
            and self.entries == other.entries
        )


# ============================================
# PAIRWISE
# ============================================

def pairwise_overlap(
    kb: KnowledgeBase, a: ActorId, b: ActorId, mode: OverlapMode = OverlapMode.COUNT
):
    """|Σ_a ∩ Σ_b| (count) or the sum of shared min weights (weighted-min)."""
    mode = OverlapMode(mode)
    sigma_a, sigma_b = kb.holdings(a), kb.holdings(b)
    shared = sigma_a.keys() & sigma_b.keys()
    if mode is OverlapMode.COUNT:
        return len(shared)
    return float(sum(min(sigma_a[g], sigma_b[g]) for g in sorted(shared)))


def shared_generators(kb: KnowledgeBase, a: ActorId, b: ActorId) -> List[Tuple[GeneratorId, float]]:
    """The medium two actors interact through: shared generators with min(f_a, f_b)."""
    sigma_a, sigma_b = kb.holdings(a), kb.holdings(b)
    return [(g, min(sigma_a[g], sigma_b[g])) for g in sorted(sigma_a.keys() & sigma_b.keys())]


def _diagonal(kb: KnowledgeBase, mode: OverlapMode) -> np.ndarray:
    if mode is OverlapMode.COUNT:
        return np.array([len(kb.sigma[a]) for a in kb.actors], dtype=np.int64)
    return np.array([sum(kb.sigma[a].values()) for a in kb.actors], dtype=np.float64)


def _dtype(mode: OverlapMode):
    return np.int64 if mode is OverlapMode.COUNT else np.float64


# ============================================
# ORACLE
# ============================================

def brute_force_matrix(kb: KnowledgeBase, mode: OverlapMode = OverlapMode.COUNT) -> OverlapMatrix:
    """Nested-loop reference: pairwise_overlap on every pair."""
    mode = OverlapMode(mode)
    n = len(kb.actors)
    if n > ORACLE_ACTOR_LIMIT:
        raise OracleLimitError(n, ORACLE_ACTOR_LIMIT)

    rows, cols, data = [], [], []
    for i, j in combinations(range(n), 2):
        value = pairwise_overlap(kb, kb.actors[i], kb.actors[j], mode)
        if value > 0:
            rows.append(i)
            cols.append(j)
            data.append(value)
    upper = coo_matrix(
        (np.array(data, dtype=_dtype(mode)), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(n, n),
    ).tocsr()
    return OverlapMatrix(actors=kb.actors, mode=mode, upper=upper, diagonal=_diagonal(kb, mode))


# ============================================
# INVERTED-INDEX JOIN
# ============================================

def _pair_blocks(k: int, limit: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """(left, right) position arrays of all i < j pairs in a posting list of length k, in blocks."""
    if k < 2:
        return
    if k * (k - 1) // 2 <= limit:
        yield np.triu_indices(k, 1)
        return
    # one posting list is too long for the buffer: split it by row ranges
    start = 0
    while start < k - 1:
        stop, pairs = start, 0
        while stop < k - 1 and (pairs == 0 or pairs + (k - 1 - stop) <= limit):
            pairs += k - 1 - stop
            stop += 1
        lengths = k - 1 - np.arange(start, stop)
        left = np.repeat(np.arange(start, stop), lengths)
        right = np.concatenate([np.arange(i + 1, k) for i in range(start, stop)])
        yield left, right
        start = stop


def _accumulate(
    postings: Sequence[Tuple[np.ndarray, np.ndarray]],
    n: int,
    mode: OverlapMode,
    chunk_pairs: int,
) -> csr_matrix:
    """Sum per-posting-list pair contributions for one partition of posting lists."""
    dtype = _dtype(mode)
    total = csr_matrix((n, n), dtype=dtype)
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    data: List[np.ndarray] = []
    buffered = 0

    def flush():
        nonlocal total, buffered
        if not rows:
            return
        chunk = coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        ).tocsr()  # sums duplicate pairs
        total = total + chunk
        rows.clear()
        cols.clear()
        data.clear()
        buffered = 0

    for indices, weights in postings:
        for left, right in _pair_blocks(len(indices), chunk_pairs):
            # indices are ascending, so every pair lands above the diagonal
            rows.append(indices[left])
            cols.append(indices[right])
            if mode is OverlapMode.COUNT:
                data.append(np.ones(len(left), dtype=dtype))
            else:
                data.append(np.minimum(weights[left], weights[right]))
            buffered += len(left)
            if buffered >= chunk_pairs:
                flush()
    flush()
    return total


def overlap_matrix(
    kb: KnowledgeBase,
    mode: OverlapMode = OverlapMode.COUNT,
    workers: int = DEFAULT_WORKERS,
    chunk_pairs: Optional[int] = None,
) -> OverlapMatrix:
    """
    All-pairs overlap through the inverted index.

    With workers > 1 the posting lists are split into contiguous partitions,
    each accumulated on its own thread; partial matrices are summed in
    partition order.
    """
    mode = OverlapMode(mode)
    started = time.perf_counter()
    chunk_pairs = chunk_pairs or OVERLAP_CHUNK_PAIRS
    n = len(kb.actors)
    position = {a: i for i, a in enumerate(kb.actors)}

    index = InvertedIndex.from_knowledge_base(kb)
    postings = [
        (
            np.fromiter((position[a] for a, _ in plist), dtype=np.int64, count=len(plist)),
            np.fromiter((w for _, w in plist), dtype=np.float64, count=len(plist)),
        )
        for plist in index.postings.values()
    ]
    logger.info(
        f"[OVERLAP] Indexed {n} actors, {len(index)} generators, "
        f"{index.pair_contributions()} pair contributions"
    )

    workers = max(1, int(workers))
    if workers == 1 or len(postings) < 2:
        upper = _accumulate(postings, n, mode, chunk_pairs)
    else:
        bounds = np.linspace(0, len(postings), workers + 1, dtype=int)
        partitions = [postings[bounds[i]:bounds[i + 1]] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda part: _accumulate(part, n, mode, chunk_pairs), partitions))
        upper = partials[0]
        for partial in partials[1:]:
            upper = upper + partial

    upper = upper.tocsr()
    upper.eliminate_zeros()
    upper.sort_indices()

    matrix = OverlapMatrix(actors=kb.actors, mode=mode, upper=upper, diagonal=_diagonal(kb, mode))
    logger.info(
        f"[OVERLAP] {mode.value} matrix: {matrix.nnz} nonzero pairs "
        f"in {time.perf_counter() - started:.2f}s"
    )
    return matrix
