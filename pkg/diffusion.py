"""
Trait Spread Simulation
=======================
Spreads a trait (a disease, a piece of knowledge) over a KnowledgeGraph.

Models:
- SI: every round each infected vertex tries every susceptible neighbour again

Both models stop at max_rounds or after the first round with no new infection.
- IC: independent cascade, a vertex tries each edge once, in the round after it got infected

Transmission probability per edge:
- unit:          p = 1
- proportional:  p = edge weight (normalized graphs only)
- scaled:        p = 1 - exp(-λ · weight)

Randomness
----------
Every run draws from numpy's PCG64 bit generator seeded through a
SeedSequence. A single simulate() run uses SeedSequence(entropy=rng_seed);
Monte Carlo trial t uses SeedSequence(entropy=rng_seed, spawn_key=(t,)).
Both derivations are part of numpy's stable stream contract, so a given
(graph, config) always yields the same trace and the same estimates no
matter how trials are spread across workers.

Each round, candidate edges are examined in lexicographic (source, target)
order and one uniform draw is consumed per candidate, in that order.
"""

import logging
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from config import (
    DEFAULT_LAMBDA,
    DEFAULT_MAX_ROUNDS,
    DEFAULT_WORKERS,
    EXPECTED_INFECTION_CUTOFF,
    MAX_RNG_SEED,
)
from core_model import ActorId
from errors import SpreadConfigError, UnknownSeedError
from graph_builder import KnowledgeGraph, WeightMode, neighbors

logger = logging.getLogger(__name__)


class SpreadModel(str, Enum):
    SI = "si"
    IC = "ic"


class Transmission(str, Enum):
    UNIT = "unit"
    PROPORTIONAL = "proportional"
    SCALED = "scaled"


class SpreadConfig(BaseModel):
    model: SpreadModel = SpreadModel.SI
    seeds: List[ActorId]
    max_rounds: int = Field(default=DEFAULT_MAX_ROUNDS, gt=0)
    transmission: Transmission = Transmission.UNIT
    lambda_: float = Field(default=DEFAULT_LAMBDA, gt=0, alias="lambda")
    rng_seed: int = Field(default=0, ge=0, le=MAX_RNG_SEED)

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @field_validator("seeds")
    @classmethod
    def _sorted_unique_seeds(cls, seeds: List[ActorId]) -> List[ActorId]:
        return sorted(set(seeds))


class SpreadTrace(BaseModel):
    rounds: List[List[ActorId]]
    final_infected: List[ActorId]
    config_echo: SpreadConfig


# ============================================
# RANDOM STREAMS
# ============================================

def trial_seed_sequence(rng_seed: int, trial: Optional[int] = None) -> np.random.SeedSequence:
    """Stream-splitting rule: the master seed mixed with the trial index via SeedSequence."""
    if trial is None:
        return np.random.SeedSequence(entropy=rng_seed)
    return np.random.SeedSequence(entropy=rng_seed, spawn_key=(trial,))


def _generator(rng_seed: int, trial: Optional[int] = None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(trial_seed_sequence(rng_seed, trial)))


# ============================================
# SIMULATION
# ============================================

def edge_probability(weight: float, cfg: SpreadConfig) -> float:
    if cfg.transmission is Transmission.UNIT:
        return 1.0
    if cfg.transmission is Transmission.PROPORTIONAL:
        return float(weight)
    return float(-math.expm1(-cfg.lambda_ * weight))


def _validate(g: KnowledgeGraph, cfg: SpreadConfig) -> None:
    if g.order == 0:
        raise SpreadConfigError("graph has no vertices")
    if not cfg.seeds:
        raise SpreadConfigError("empty seed set")
    for seed in cfg.seeds:
        if seed not in g:
            raise UnknownSeedError(seed)
    if cfg.transmission is Transmission.PROPORTIONAL and g.weight_mode is not WeightMode.NORMALIZED:
        raise SpreadConfigError(
            f"proportional transmission requires a normalized graph, got {g.weight_mode.value}"
        )


class _Contacts:
    """Sorted adjacency with per-edge transmission probabilities, built once per graph+config."""

    def __init__(self, g: KnowledgeGraph, cfg: SpreadConfig):
        self.adjacency: Dict[ActorId, List[Tuple[ActorId, float]]] = {
            v: [(u, edge_probability(w, cfg)) for u, w in neighbors(g, v)]
            for v in g.vertices
        }


def _run(contacts: _Contacts, cfg: SpreadConfig, rng: np.random.Generator) -> List[List[ActorId]]:
    infected: Set[ActorId] = set(cfg.seeds)
    rounds: List[List[ActorId]] = [list(cfg.seeds)]
    frontier: List[ActorId] = list(cfg.seeds)

    for _ in range(cfg.max_rounds):
        sources = sorted(infected) if cfg.model is SpreadModel.SI else frontier
        targets: List[ActorId] = []
        probabilities: List[float] = []
        for source in sources:
            for target, p in contacts.adjacency[source]:
                if target not in infected:
                    targets.append(target)
                    probabilities.append(p)
        if not targets:
            break
        draws = rng.random(len(targets))
        newly = sorted({t for t, p, x in zip(targets, probabilities, draws) if x < p})
        if not newly:
            break
        infected.update(newly)
        rounds.append(newly)
        frontier = newly
    return rounds


def simulate(g: KnowledgeGraph, cfg: SpreadConfig) -> SpreadTrace:
    """One seeded run. Round 0 holds the seeds; later rounds hold newly infected actors."""
    _validate(g, cfg)
    rounds = _run(_Contacts(g, cfg), cfg, _generator(cfg.rng_seed))
    final = sorted(a for r in rounds for a in r)
    logger.info(
        f"[SIMULATE] {cfg.model.value}/{cfg.transmission.value}: "
        f"{len(final)}/{g.order} infected after {len(rounds) - 1} rounds"
    )
    return SpreadTrace(rounds=rounds, final_infected=final, config_echo=cfg)


def _count_trials(contacts: _Contacts, cfg: SpreadConfig, trials: Iterable[int]) -> Counter:
    counts: Counter = Counter()
    for trial in trials:
        for r in _run(contacts, cfg, _generator(cfg.rng_seed, trial)):
            counts.update(r)
    return counts


def monte_carlo(
    g: KnowledgeGraph,
    cfg: SpreadConfig,
    trials: int,
    workers: int = DEFAULT_WORKERS,
) -> Dict[ActorId, float]:
    """Per-actor infected fraction over `trials` independently seeded runs."""
    if trials < 1:
        raise SpreadConfigError(f"trials must be >= 1, got {trials}")
    _validate(g, cfg)
    started = time.perf_counter()
    contacts = _Contacts(g, cfg)

    workers = max(1, min(int(workers), trials))
    if workers == 1:
        counts = _count_trials(contacts, cfg, range(trials))
    else:
        bounds = np.linspace(0, trials, workers + 1, dtype=int)
        ranges = [range(bounds[i], bounds[i + 1]) for i in range(workers)]
        counts = Counter()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for partial in pool.map(lambda r: _count_trials(contacts, cfg, r), ranges):
                counts.update(partial)

    estimates = {v: counts[v] / trials for v in g.vertices}
    logger.info(
        f"[MONTE CARLO] {trials} trials from {cfg.seeds} in {time.perf_counter() - started:.2f}s"
    )
    return estimates


def jaccard(a: Set[ActorId], b: Set[ActorId]) -> float:
    union = a | b
    return len(a & b) / len(union) if union else 1.0


def trace_root(
    g: KnowledgeGraph,
    infected: Iterable[ActorId],
    cfg: SpreadConfig,
    trials: int,
    workers: int = DEFAULT_WORKERS,
) -> List[Tuple[ActorId, float]]:
    """
    Rank each infected actor as the likely origin.

    A candidate is seeded alone; actors with an estimate >= 0.5 form its
    expected outbreak, scored by Jaccard similarity against the observed set.
    Highest score first, ties broken lexicographically.
    """
    observed = set(infected)
    if not observed:
        raise SpreadConfigError("empty infected set")
    for actor in observed:
        if actor not in g:
            raise UnknownSeedError(actor)

    scores = []
    for candidate in sorted(observed):
        single = cfg.model_copy(update={"seeds": [candidate]})
        estimates = monte_carlo(g, single, trials, workers=workers)
        expected = {v for v, p in estimates.items() if p >= EXPECTED_INFECTION_CUTOFF}
        scores.append((candidate, jaccard(expected, observed)))
    scores.sort(key=lambda item: (-item[1], item[0]))
    logger.info(f"[TRACE ROOT] best candidate {scores[0][0]} (score {scores[0][1]:.3f})")
    return scores
