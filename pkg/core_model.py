"""
Knowledge Model
===============
Actors, generators and what each actor knows.

An actor's knowledge Σ is a set of generators, each carried with its
disseminator value f(σ) in (0, 1]. A generator an actor does not hold has
f(σ) = 0 and is simply absent, so "absence encodes zero" holds by
construction.

The joint disseminator over several generators is the minimum of the
member values. That closure satisfies:
1. f(σi, σi) = f(σi)
2. f(σi, σj) = f(σj, σi)
3. grouping does not matter: f(σi, (σj, σk)) = f((σi, σj), σk)
4. f(σi, σj) <= min{f(σi), f(σj)}  (with equality)
and a single zero member zeroes the whole joint value.

Situations and the model class mod(Σ) use logical-theory semantics: a
situation belongs to mod(Σ) when it satisfies every generator of Σ, so
mod(Σ) shrinks as Σ grows.
"""

import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Mapping, Tuple

from errors import (
    EmptyGeneratorSetError,
    EmptyKnowledgeError,
    InvalidTokenError,
    InvalidWeightError,
    UnknownActorError,
)

logger = logging.getLogger(__name__)

GeneratorId = str
ActorId = str

_FORBIDDEN_CHARS = (",", "\n", "\r")


def validate_token(token: object, kind: str = "token") -> str:
    """Return the token if it is a legal actor/generator id, else raise."""
    if not isinstance(token, str) or not token:
        raise InvalidTokenError(f"{kind} must be a nonempty string, got {token!r}")
    if any(ch in token for ch in _FORBIDDEN_CHARS):
        raise InvalidTokenError(f"{kind} may not contain commas or newlines: {token!r}")
    return token


def validate_weight(weight: object, context: str = "weight") -> float:
    """Weights live in (0, 1]. Zero is rejected (absence encodes zero); >1 is never clamped."""
    try:
        value = float(weight)
    except (TypeError, ValueError):
        raise InvalidWeightError(f"{context} is not a number: {weight!r}") from None
    if math.isnan(value) or value <= 0.0 or value > 1.0:
        raise InvalidWeightError(f"{context} must be in (0, 1], got {weight!r}")
    return value


def _freeze(mapping: Mapping) -> Mapping:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class KnowledgeBase:
    """
    Map from actor to its weighted generator set.

    actors and universe are kept in lexicographic order; sigma holds an
    entry (possibly empty) for every actor.
    """
    actors: Tuple[ActorId, ...]
    universe: Tuple[GeneratorId, ...]
    sigma: Mapping[ActorId, Mapping[GeneratorId, float]] = field(default_factory=dict)

    def __post_init__(self):
        actors = tuple(sorted({validate_token(a, "actor id") for a in self.actors}))
        universe = tuple(sorted({validate_token(g, "generator id") for g in self.universe}))
        known_generators = set(universe)
        known_actors = set(actors)

        frozen_sigma: Dict[ActorId, Mapping[GeneratorId, float]] = {}
        for actor, holdings in self.sigma.items():
            if actor not in known_actors:
                raise UnknownActorError(actor)
            checked = {}
            for generator, weight in holdings.items():
                if generator not in known_generators:
                    raise InvalidTokenError(
                        f"generator {generator!r} of actor {actor!r} is not in the universe"
                    )
                checked[generator] = validate_weight(weight, f"weight of ({actor}, {generator})")
            frozen_sigma[actor] = _freeze(sorted(checked.items()))
        for actor in actors:
            frozen_sigma.setdefault(actor, MappingProxyType({}))

        object.__setattr__(self, "actors", actors)
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "sigma", MappingProxyType(dict(sorted(frozen_sigma.items()))))

    # --------------------------------------------
    # constructors
    # --------------------------------------------

    @classmethod
    def build(
        cls,
        sigma: Mapping[ActorId, Mapping[GeneratorId, float]],
        actors: Iterable[ActorId] = (),
        universe: Iterable[GeneratorId] = (),
    ) -> "KnowledgeBase":
        """Build a knowledge base, widening actors and universe to cover sigma."""
        all_actors = set(actors) | set(sigma)
        all_generators = set(universe)
        for holdings in sigma.values():
            all_generators.update(holdings)
        return cls(actors=tuple(all_actors), universe=tuple(all_generators), sigma=sigma)

    @classmethod
    def from_records(
        cls,
        records: Iterable[Tuple[ActorId, GeneratorId, float]],
        actors: Iterable[ActorId] = (),
    ) -> "KnowledgeBase":
        """
        Build from (actor, generator, weight) incidence triples.
        Duplicate (actor, generator) pairs keep the maximum weight.
        """
        sigma: Dict[ActorId, Dict[GeneratorId, float]] = {}
        for actor, generator, weight in records:
            holdings = sigma.setdefault(actor, {})
            holdings[generator] = max(weight, holdings.get(generator, 0.0))
        return cls.build(sigma, actors=actors)

    def transpose(self) -> "KnowledgeBase":
        """Swap roles: generators become actors, actors become generators."""
        flipped: Dict[GeneratorId, Dict[ActorId, float]] = {g: {} for g in self.universe}
        for actor, holdings in self.sigma.items():
            for generator, weight in holdings.items():
                flipped[generator][actor] = weight
        return KnowledgeBase(actors=self.universe, universe=self.actors, sigma=flipped)

    # --------------------------------------------
    # helpers
    # --------------------------------------------

    def holdings(self, actor: ActorId) -> Mapping[GeneratorId, float]:
        try:
            return self.sigma[actor]
        except KeyError:
            raise UnknownActorError(actor) from None

    def records(self) -> Iterable[Tuple[ActorId, GeneratorId, float]]:
        """Incidence triples sorted by (actor, generator)."""
        for actor in self.actors:
            for generator, weight in self.sigma[actor].items():
                yield actor, generator, weight

    def __len__(self) -> int:
        return len(self.actors)


@dataclass(frozen=True)
class SituationUniverse:
    """Finite set of situations M plus which generators each situation satisfies."""
    situations: Tuple[str, ...]
    satisfied_by: Mapping[str, FrozenSet[GeneratorId]] = field(default_factory=dict)

    def __post_init__(self):
        situations = tuple(sorted({validate_token(m, "situation") for m in self.situations}))
        known = set(situations)
        relation = {}
        for situation, generators in self.satisfied_by.items():
            if situation not in known:
                raise InvalidTokenError(f"situation {situation!r} is not declared")
            relation[situation] = frozenset(validate_token(g, "generator id") for g in generators)
        object.__setattr__(self, "situations", situations)
        object.__setattr__(self, "satisfied_by", _freeze(sorted(relation.items())))

    def satisfies(self, situation: str, generator: GeneratorId) -> bool:
        # total relation, default false
        return generator in self.satisfied_by.get(situation, frozenset())


# ============================================
# DISSEMINATOR
# ============================================

def f_single(kb: KnowledgeBase, actor: ActorId, g: GeneratorId) -> float:
    """f(σ) for one actor: the stored weight, or 0.0 when the generator is absent."""
    return kb.holdings(actor).get(g, 0.0)


def f_joint(kb: KnowledgeBase, actor: ActorId, gs: Iterable[GeneratorId]) -> float:
    """Joint disseminator f(σ1, ..., σm) = min of the member values."""
    holdings = kb.holdings(actor)
    generators = set(gs)
    if not generators:
        raise EmptyGeneratorSetError()
    return min(holdings.get(g, 0.0) for g in generators)


def sigma_size(kb: KnowledgeBase, actor: ActorId) -> int:
    """|Σ| for an actor."""
    return len(kb.holdings(actor))


def mass_probability(kb: KnowledgeBase, actor: ActorId, g: GeneratorId) -> float:
    """L(σ) = f(σ) / |Σ|."""
    size = sigma_size(kb, actor)
    if size == 0:
        raise EmptyKnowledgeError(actor)
    return f_single(kb, actor, g) / size


def mass_distribution(
    kb: KnowledgeBase, actor: ActorId, normalized: bool = False
) -> Dict[GeneratorId, float]:
    """
    L over the whole of Σ.

    The literal formula only sums to 1 when every weight is 1; pass
    normalized=True to rescale by the weight sum instead.
    """
    holdings = kb.holdings(actor)
    if not holdings:
        raise EmptyKnowledgeError(actor)
    if normalized:
        total = math.fsum(holdings.values())
        return {g: w / total for g, w in holdings.items()}
    size = len(holdings)
    return {g: w / size for g, w in holdings.items()}


# ============================================
# MODEL CLASS
# ============================================

def mod_of(universe: SituationUniverse, sigma: Iterable[GeneratorId]) -> FrozenSet[str]:
    """mod(Σ): situations satisfying every generator of sigma. Empty sigma → all situations."""
    required = frozenset(sigma)
    return frozenset(
        m for m in universe.situations
        if required <= universe.satisfied_by.get(m, frozenset())
    )


def model_size(universe: SituationUniverse, sigma: Iterable[GeneratorId]) -> int:
    """|mod(Σ)|, always a nonnegative count."""
    return len(mod_of(universe, sigma))


def actor_models(
    universe: SituationUniverse, kb: KnowledgeBase, actor: ActorId
) -> FrozenSet[str]:
    """mod(Σ_actor)."""
    models = mod_of(universe, kb.holdings(actor).keys())
    logger.debug(f"[MODELS] {actor}: {len(models)}/{len(universe.situations)} situations")
    return models

