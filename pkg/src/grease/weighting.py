"""Generative facet weighting: priors, likelihoods, smoothing, posteriors.

Facet weights are Bayesian posteriors, prior times likelihood up to a
constant. Everything runs in log space with a floor at the smallest positive
normalized float: likelihoods are products over examples of counts divided by
approximate counts and underflow on large graphs otherwise. Posteriors are
normalized within each facet family (meta-paths to 1, properties to 1),
which keeps the two relevance sums on comparable scales and leaves the
property-strength parameter as the single balance knob.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence, Union

from .kg import KnowledgeGraph, Property
from .metapath import MetaPath, apc, instance_path_count
from .stats import StatsIndex, same_type_extent

FLOOR = sys.float_info.min
LOG_FLOOR = math.log(FLOOR)

Facet = Union[MetaPath, Property]


@dataclass(frozen=True)
class ModelParams:
    """Tunable parameters with the engine's defaults."""

    alpha_mp: int = 5
    alpha_prop: float = 2.0
    beta: float = 10.0
    max_len: int = 3
    top_mp: int = 3
    k: int = 10

    def __post_init__(self):
        for name in ("alpha_mp", "alpha_prop", "beta", "max_len", "top_mp", "k"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")


@dataclass(frozen=True)
class WeightedFacet:
    facet: Facet
    log_prior: float
    log_likelihood: float
    weight: float

    @property
    def kind(self) -> str:
        return "meta_path" if isinstance(self.facet, MetaPath) else "property"

    @property
    def text(self) -> str:
        return self.facet.text


def _safe_log(x: float) -> float:
    return math.log(x) if x > 0 else LOG_FLOOR


def mp_log_prior(index: StatsIndex, mp: MetaPath) -> float:
    """Log of the approximate global path count (floored when zero)."""
    return _safe_log(apc(index, mp))


def mp_log_likelihood(
    kg: KnowledgeGraph,
    index: StatsIndex,
    examples: Sequence[tuple[int, int]],
    mp: MetaPath,
) -> float:
    """Sum over examples of log(count / approximate count).

    A zero pair count is replaced by the expected count between two entities
    of the same types as the pair, approximate count over the product of the
    two same-type extents. When the approximate count itself is zero it is
    floored and every term takes the smoothing path.
    """
    a = apc(index, mp)
    total = 0.0
    if a <= 0.0:
        a = FLOOR
        for s, t in examples:
            c = a / (same_type_extent(index, s) * same_type_extent(index, t))
            total += math.log(c) - math.log(a)
        return total
    log_a = math.log(a)
    for s, t in examples:
        pair_count = instance_path_count(kg, s, t, mp)
        if pair_count > 0:
            c = float(pair_count)
        else:
            c = a / (same_type_extent(index, s) * same_type_extent(index, t))
        total += math.log(c) - log_a
    return total


def prop_log_prior(index: StatsIndex, prop: Property) -> float:
    """Log of the fraction of entities the property constrains (floored when zero)."""
    extent = index.property_extent.get(prop, 0)
    return _safe_log(extent / index.entity_total)


def prop_log_likelihood(
    kg: KnowledgeGraph,
    index: StatsIndex,
    examples: Sequence[tuple[int, int]],
    prop: Property,
) -> float:
    """Sum over examples of log(1/extent) when the target is constrained, else log(1/|V|)."""
    extent = index.property_extent.get(prop, 0)
    total = 0.0
    for _s, t in examples:
        if extent > 0 and prop in kg.properties_of(t):
            total -= math.log(extent)
        else:
            total -= math.log(index.entity_total)
    return total


def _normalized_weights(log_posteriors: Sequence[float]) -> list[float]:
    m = max(log_posteriors)
    raw = [math.exp(lp - m) for lp in log_posteriors]
    s = sum(raw)
    return [w / s for w in raw]


def _ranked(facets: list[WeightedFacet]) -> list[WeightedFacet]:
    return sorted(facets, key=lambda wf: (-wf.weight, wf.text))


def mp_posteriors(
    kg: KnowledgeGraph,
    index: StatsIndex,
    omega_mp: Sequence[MetaPath],
    examples: Sequence[tuple[int, int]],
) -> list[WeightedFacet]:
    """Posterior weights over the meta-path family, descending (ties by text)."""
    mps = sorted(omega_mp, key=lambda mp: mp.text)
    if not mps:
        return []
    entries = []
    for mp in mps:
        lp = mp_log_prior(index, mp)
        ll = mp_log_likelihood(kg, index, examples, mp)
        entries.append((mp, lp, ll))
    weights = _normalized_weights([lp + ll for _, lp, ll in entries])
    return _ranked(
        [
            WeightedFacet(mp, lp, ll, w)
            for (mp, lp, ll), w in zip(entries, weights)
        ]
    )


def prop_posteriors(
    kg: KnowledgeGraph,
    index: StatsIndex,
    omega_prop: Sequence[Property],
    examples: Sequence[tuple[int, int]],
) -> list[WeightedFacet]:
    """Posterior weights over the property family, descending (ties by text)."""
    props = sorted(omega_prop)
    if not props:
        return []
    entries = []
    for prop in props:
        lp = prop_log_prior(index, prop)
        ll = prop_log_likelihood(kg, index, examples, prop)
        entries.append((prop, lp, ll))
    weights = _normalized_weights([lp + ll for _, lp, ll in entries])
    return _ranked(
        [
            WeightedFacet(prop, lp, ll, w)
            for (prop, lp, ll), w in zip(entries, weights)
        ]
    )


def gamma_mp(instance_count: int, params: ModelParams) -> float:
    """Path-count relevance, clamped to avoid highly skewed values."""
    return float(min(instance_count, params.alpha_mp))


def gamma_prop(v_properties: set[Property], prop: Property, params: ModelParams) -> float:
    """Property relevance: the property-strength constant if v is constrained, else 0."""
    return params.alpha_prop if prop in v_properties else 0.0


def regularizer(mp: MetaPath, params: ModelParams) -> float:
    """Exponential length penalty against overfitting long meta-paths."""
    return math.exp(-params.beta * mp.length)
