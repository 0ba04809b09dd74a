"""End-to-end search: facet selection, weighting, candidates, ranked answers.

Candidate answers come only from the few highest-weighted meta-paths, but
scores sum over every selected facet: all meta-paths (count-clamped, weighted,
length-penalized) plus all properties (weighted, no length penalty).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import NoFacetsError, UnknownEntityError
from .kg import KnowledgeGraph, Property
from .metapath import MetaPath, instance_path_count, mp_search, reachable_set
from .stats import StatsIndex
from .weighting import (
    ModelParams,
    WeightedFacet,
    gamma_mp,
    gamma_prop,
    mp_posteriors,
    prop_posteriors,
    regularizer,
)

VARIANTS = ("full", "np")


@dataclass(frozen=True)
class SearchRequest:
    query: str
    examples: tuple[tuple[str, str], ...]
    params: ModelParams = ModelParams()
    variant: str = "full"

    def __post_init__(self):
        if not self.examples:
            raise ValueError("examples must be non-empty")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


@dataclass(frozen=True)
class Contribution:
    facet: str
    gamma: float
    weight: float
    regularizer: float

    @property
    def product(self) -> float:
        return self.gamma * self.weight * self.regularizer


@dataclass(frozen=True)
class RankedAnswer:
    entity: str
    score: float
    contributions: tuple[Contribution, ...]


@dataclass
class SearchOutcome:
    answers: list[RankedAnswer]
    meta_path_facets: list[WeightedFacet]
    property_facets: list[WeightedFacet]
    params: ModelParams = field(default_factory=ModelParams)
    variant: str = "full"


def _resolve(kg: KnowledgeGraph, request: SearchRequest) -> tuple[int, list[tuple[int, int]]]:
    q = kg.id_of(request.query)
    pairs = []
    for idx, (s_label, t_label) in enumerate(request.examples):
        try:
            s = kg.id_of(s_label)
            t = kg.id_of(t_label)
        except UnknownEntityError as e:
            raise UnknownEntityError(f"example {idx}: {e}", label=e.label) from None
        if s == t:
            raise ValueError(f"example {idx}: source equals target")
        pairs.append((s, t))
    return q, pairs


def select_facets(
    kg: KnowledgeGraph, index: StatsIndex, request: SearchRequest
) -> tuple[set[MetaPath], set[Property]]:
    """Meta-paths witnessed by example paths, and properties of example targets.

    Property facets are disabled entirely under the meta-path-only variant.
    """
    _q, pairs = _resolve(kg, request)
    unique_pairs = list(dict.fromkeys(pairs))
    omega_mp = mp_search(kg, unique_pairs, request.params.max_len)
    omega_prop: set[Property] = set()
    if request.variant == "full":
        for _s, t in unique_pairs:
            omega_prop |= kg.properties_of(t)
    return omega_mp, omega_prop


def _score_one(
    kg: KnowledgeGraph,
    q: int,
    v: int,
    mp_facets: list[WeightedFacet],
    prop_facets: list[WeightedFacet],
    params: ModelParams,
    top_counts: dict[MetaPath, dict[int, int]] | None = None,
) -> tuple[float, tuple[Contribution, ...]]:
    score = 0.0
    contributions = []
    for wf in mp_facets:
        mp = wf.facet
        assert isinstance(mp, MetaPath)
        if top_counts is not None and mp in top_counts:
            count = top_counts[mp].get(v, 0)
        else:
            count = instance_path_count(kg, q, v, mp)
        g = gamma_mp(count, params)
        if g > 0.0:
            j = regularizer(mp, params)
            score += g * wf.weight * j
            contributions.append(Contribution(wf.text, g, wf.weight, j))
    if prop_facets:
        v_props = kg.properties_of(v)
        for wf in prop_facets:
            prop = wf.facet
            assert isinstance(prop, Property)
            g = gamma_prop(v_props, prop, params)
            if g > 0.0:
                score += g * wf.weight
                contributions.append(Contribution(wf.text, g, wf.weight, 1.0))
    return score, tuple(contributions)


def rel_score(
    kg: KnowledgeGraph,
    index: StatsIndex,
    q: int,
    v: int,
    mp_facets: list[WeightedFacet],
    prop_facets: list[WeightedFacet],
    params: ModelParams,
) -> tuple[float, tuple[Contribution, ...]]:
    """Relevance of v to q under the given weighted facets, with its breakdown."""
    if q == v:
        raise ValueError("query equals candidate")
    return _score_one(kg, q, v, mp_facets, prop_facets, params)


def grease_search(
    kg: KnowledgeGraph, index: StatsIndex, request: SearchRequest
) -> SearchOutcome:
    """Run the full search pipeline and return ranked answers with explanations.

    Examples may repeat a pair: duplicates count in the likelihoods but are
    deduplicated for facet derivation.
    """
    params = request.params
    q, pairs = _resolve(kg, request)
    unique_pairs = list(dict.fromkeys(pairs))

    omega_mp = mp_search(kg, unique_pairs, params.max_len)
    omega_prop: set[Property] = set()
    if request.variant == "full":
        for _s, t in unique_pairs:
            omega_prop |= kg.properties_of(t)
    if not omega_mp and not omega_prop:
        raise NoFacetsError("no facets derivable from examples")

    mp_facets = mp_posteriors(kg, index, sorted(omega_mp, key=lambda m: m.text), pairs)
    prop_facets = prop_posteriors(kg, index, sorted(omega_prop), pairs)

    top = [wf.facet for wf in mp_facets[: params.top_mp]]
    top_counts: dict[MetaPath, dict[int, int]] = {}
    candidates: set[int] = set()
    for mp in top:
        assert isinstance(mp, MetaPath)
        counts = reachable_set(kg, q, mp, params.alpha_mp)
        top_counts[mp] = counts
        candidates |= counts.keys()
    candidates.discard(q)

    answers = []
    for v in sorted(candidates):
        score, contributions = _score_one(
            kg, q, v, mp_facets, prop_facets, params, top_counts
        )
        if score > 0.0:
            answers.append(RankedAnswer(kg.label_of(v), score, contributions))
    answers.sort(key=lambda a: (-a.score, a.entity))
    return SearchOutcome(
        answers=answers[: params.k],
        meta_path_facets=mp_facets,
        property_facets=prop_facets,
        params=params,
        variant=request.variant,
    )


def timed_search(
    kg: KnowledgeGraph, index: StatsIndex, request: SearchRequest
) -> tuple[SearchOutcome, float]:
    """Run grease_search and report elapsed wall-clock seconds."""
    start = time.perf_counter()
    outcome = grease_search(kg, index, request)
    return outcome, time.perf_counter() - start
