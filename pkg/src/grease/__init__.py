"""Example-supervised relevance search over knowledge graphs.

Given a query entity and a few query-answer example pairs, the engine learns
posterior weights for meta-path and property facets and returns the top-k
most relevant entities with per-facet explanations.
"""

from .errors import (
    GenerationError,
    GreaseError,
    IndexFormatError,
    LoadError,
    NoFacetsError,
    UnknownEntityError,
)
from .evaluation import (
    BenchmarkReport,
    PlantedSpec,
    QueryInstance,
    generate_planted,
    ndcg_at_k,
    parse_instances,
    run_benchmark,
)
from .kg import KnowledgeGraph, Property, RelationStep, load_kg
from .metapath import (
    MetaPath,
    apc,
    instance_path_count,
    metapath,
    mp_search,
    parse_metapath,
    reachable_set,
)
from .search import (
    Contribution,
    RankedAnswer,
    SearchOutcome,
    SearchRequest,
    grease_search,
    rel_score,
    select_facets,
)
from .stats import StatsIndex, build_index, load_index, pc_short, same_type_extent, save_index
from .weighting import (
    ModelParams,
    WeightedFacet,
    gamma_mp,
    gamma_prop,
    mp_log_likelihood,
    mp_log_prior,
    mp_posteriors,
    prop_log_likelihood,
    prop_log_prior,
    prop_posteriors,
    regularizer,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkReport",
    "Contribution",
    "GenerationError",
    "GreaseError",
    "IndexFormatError",
    "KnowledgeGraph",
    "LoadError",
    "MetaPath",
    "ModelParams",
    "NoFacetsError",
    "PlantedSpec",
    "Property",
    "QueryInstance",
    "RankedAnswer",
    "RelationStep",
    "SearchOutcome",
    "SearchRequest",
    "StatsIndex",
    "UnknownEntityError",
    "WeightedFacet",
    "apc",
    "build_index",
    "gamma_mp",
    "gamma_prop",
    "generate_planted",
    "grease_search",
    "instance_path_count",
    "load_index",
    "load_kg",
    "metapath",
    "mp_log_likelihood",
    "mp_log_prior",
    "mp_posteriors",
    "mp_search",
    "ndcg_at_k",
    "parse_instances",
    "parse_metapath",
    "pc_short",
    "prop_log_likelihood",
    "prop_log_prior",
    "prop_posteriors",
    "reachable_set",
    "regularizer",
    "rel_score",
    "run_benchmark",
    "same_type_extent",
    "save_index",
    "select_facets",
]
