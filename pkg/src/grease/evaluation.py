"""Evaluation: NDCG scoring, query-instance files, benchmark runner, generator.

Query instances live in JSON-lines files, one object per line with fields
group, query, examples, gold, k. The synthetic generator plants a known
meta-path (optionally plus a property) into a random graph so that gold
answers are exactly the entities satisfying the planted semantics; noise
edges use disjoint relation types and are re-checked against an exhaustive
oracle before emission.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import GenerationError, GreaseError, LoadError, NoFacetsError
from .kg import KnowledgeGraph, Property
from .metapath import MetaPath, parse_metapath
from .search import SearchRequest, timed_search
from .stats import StatsIndex
from .weighting import ModelParams


def ndcg_at_k(ranking: Sequence[str], gold: set[str] | frozenset[str], k: int) -> float:
    """Binary-gain NDCG: discount 1/log2(i+1), ideal = min(|gold|, k) leading ones."""
    if k < 1:
        raise ValueError("k must be >= 1")
    dcg = 0.0
    for i, entity in enumerate(ranking[:k], start=1):
        if entity in gold:
            dcg += 1.0 / math.log2(i + 1)
    ideal = sum(1.0 / math.log2(i + 1) for i in range(1, min(len(gold), k) + 1))
    return dcg / ideal if ideal > 0 else 0.0


@dataclass(frozen=True)
class QueryInstance:
    group: str
    query: str
    examples: tuple[tuple[str, str], ...]
    gold: frozenset[str]
    k: int = 10

    def __post_init__(self):
        if not self.gold:
            raise ValueError("gold set must be non-empty")
        if not self.examples:
            raise ValueError("examples must be non-empty")

    def to_json_dict(self) -> dict:
        return {
            "group": self.group,
            "query": self.query,
            "examples": [[s, t] for s, t in self.examples],
            "gold": sorted(self.gold),
            "k": self.k,
        }


def parse_instances(lines: Iterable[str]) -> list[QueryInstance]:
    instances = []
    for n, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            instances.append(
                QueryInstance(
                    group=obj["group"],
                    query=obj["query"],
                    examples=tuple((s, t) for s, t in obj["examples"]),
                    gold=frozenset(obj["gold"]),
                    k=int(obj.get("k", 10)),
                )
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
            raise LoadError(f"queries line {n}: {e}", line_number=n) from None
    return instances


def dump_instances(instances: Sequence[QueryInstance]) -> str:
    return "".join(json.dumps(inst.to_json_dict()) + "\n" for inst in instances)


@dataclass
class InstanceResult:
    group: str
    query: str
    example_count: int
    ndcg: float | None
    seconds: float
    error: str | None = None


@dataclass
class BenchmarkReport:
    results: list[InstanceResult] = field(default_factory=list)

    @property
    def failures(self) -> list[InstanceResult]:
        return [r for r in self.results if r.error is not None]

    def group_means(self) -> dict[tuple[str, int], float]:
        """Mean NDCG per (group, example count), failed instances excluded."""
        sums: dict[tuple[str, int], list[float]] = {}
        for r in self.results:
            if r.error is None and r.ndcg is not None:
                sums.setdefault((r.group, r.example_count), []).append(r.ndcg)
        return {key: sum(vals) / len(vals) for key, vals in sorted(sums.items())}

    def mean_seconds(self) -> float:
        scored = [r.seconds for r in self.results if r.error is None]
        return sum(scored) / len(scored) if scored else 0.0

    def to_json_dict(self, include_timing: bool = True) -> dict:
        groups = [
            {
                "group": group,
                "examples": n,
                "instances": sum(
                    1
                    for r in self.results
                    if r.group == group and r.example_count == n and r.error is None
                ),
                "mean_ndcg": mean,
            }
            for (group, n), mean in self.group_means().items()
        ]
        results = []
        for r in self.results:
            entry: dict = {
                "group": r.group,
                "query": r.query,
                "examples": r.example_count,
                "ndcg": r.ndcg,
            }
            if include_timing:
                entry["seconds"] = r.seconds
            if r.error is not None:
                entry["error"] = r.error
            results.append(entry)
        return {"groups": groups, "results": results}

    def to_table(self) -> str:
        lines = [f"{'group':<16}{'|S|':>4}{'instances':>11}{'mean NDCG':>11}"]
        for (group, n), mean in self.group_means().items():
            count = sum(
                1
                for r in self.results
                if r.group == group and r.example_count == n and r.error is None
            )
            lines.append(f"{group:<16}{n:>4}{count:>11}{mean:>11.4f}")
        if self.failures:
            lines.append(f"failed instances: {len(self.failures)}")
        return "\n".join(lines)


def run_benchmark(
    kg: KnowledgeGraph,
    index: StatsIndex,
    instances: Sequence[QueryInstance],
    params: ModelParams = ModelParams(),
    variant: str = "full",
) -> BenchmarkReport:
    """Search and score every instance; failures are recorded and excluded from means.

    An instance whose examples derive no facets at all scores 0 rather than
    failing: the search ran and returned nothing relevant.
    """
    report = BenchmarkReport()
    for inst in instances:
        inst_params = params if params.k == inst.k else replace(params, k=inst.k)
        request = SearchRequest(
            query=inst.query,
            examples=inst.examples,
            params=inst_params,
            variant=variant,
        )
        start = time.perf_counter()
        try:
            outcome, seconds = timed_search(kg, index, request)
            ranking = [a.entity for a in outcome.answers]
            score = ndcg_at_k(ranking, inst.gold, inst.k)
            report.results.append(
                InstanceResult(inst.group, inst.query, len(inst.examples), score, seconds)
            )
        except NoFacetsError:
            seconds = time.perf_counter() - start
            report.results.append(
                InstanceResult(inst.group, inst.query, len(inst.examples), 0.0, seconds)
            )
        except (GreaseError, ValueError) as e:
            seconds = time.perf_counter() - start
            report.results.append(
                InstanceResult(
                    inst.group, inst.query, len(inst.examples), None, seconds, error=str(e)
                )
            )
    return report


# --- synthetic planted-semantics generation ---------------------------------


@dataclass(frozen=True)
class PlantedSpec:
    """Shape of one synthetic benchmark group."""

    group: str
    entity_count: int
    planted_metapath: str
    planted_property: tuple[str, str] | None = None
    instance_count: int = 20
    example_count: int = 2
    extra_anchors: int = 8
    targets_per_anchor: int = 12
    gold_targets_per_anchor: int = 6
    chunks_per_anchor: int = 2
    noise_relation_types: int = 8
    noise_edge_rate: float = 1.5
    noise_attribute_types: int = 2
    noise_attribute_values: int = 60
    noise_attributes_per_entity: int = 2
    type_count: int = 4
    k: int = 10

    def validate(self) -> MetaPath:
        for name in (
            "entity_count",
            "instance_count",
            "example_count",
            "targets_per_anchor",
            "gold_targets_per_anchor",
            "chunks_per_anchor",
            "noise_relation_types",
            "noise_attribute_types",
            "noise_attribute_values",
            "type_count",
            "k",
        ):
            if getattr(self, name) <= 0:
                raise GenerationError(f"{name} must be positive")
        if self.noise_edge_rate < 0 or self.noise_attributes_per_entity < 0 or self.extra_anchors < 0:
            raise GenerationError("rates and extras must be non-negative")
        if self.gold_targets_per_anchor > self.targets_per_anchor:
            raise GenerationError("gold_targets_per_anchor exceeds targets_per_anchor")
        try:
            mp = parse_metapath(self.planted_metapath)
        except ValueError as e:
            raise GenerationError(f"bad planted meta-path: {e}") from None
        planted_rels = {step.relation for step in mp.steps}
        if any(rel.startswith("noise") for rel in planted_rels):
            raise GenerationError("planted relation names collide with the noise namespace")
        anchors = self.instance_count + self.extra_anchors
        middles = anchors * self.chunks_per_anchor * (mp.length - 1)
        need = anchors * (1 + self.targets_per_anchor) + middles
        if need > self.entity_count:
            raise GenerationError(
                f"entity budget too small: need {need} structural entities, have {self.entity_count}"
            )
        return mp


def _oriented_edge(step, a: int, b: int) -> tuple[int, str, int]:
    if step.inverted:
        return (b, step.relation, a)
    return (a, step.relation, b)


def _satisfying_entities(
    adjacency_out: dict[int, dict[str, list[int]]],
    adjacency_in: dict[int, dict[str, list[int]]],
    start: int,
    mp: MetaPath,
) -> set[int]:
    """Exhaustive acyclic enumeration over the full emitted graph."""
    found: set[int] = set()
    stack = [((start,), 0)]
    while stack:
        nodes, depth = stack.pop()
        if depth == mp.length:
            found.add(nodes[-1])
            continue
        step = mp.steps[depth]
        adj = adjacency_in if step.inverted else adjacency_out
        for u in adj.get(nodes[-1], {}).get(step.relation, []):
            if u not in nodes:
                stack.append((nodes + (u,), depth + 1))
    return found


def generate_planted(
    seed: int, spec: PlantedSpec
) -> tuple[list[str], list[str], list[QueryInstance]]:
    """Emit (relations lines, attributes lines, instances), deterministic per seed."""
    mp = spec.validate()
    rng = random.Random(seed)
    n = spec.entity_count
    labels = [f"e{i:05d}" for i in range(n)]

    order = list(range(n))
    rng.shuffle(order)
    cursor = 0

    def take(count: int) -> list[int]:
        nonlocal cursor
        chunk = order[cursor : cursor + count]
        cursor += count
        return chunk

    anchors_n = spec.instance_count + spec.extra_anchors
    anchors = take(anchors_n)
    anchor_targets: dict[int, list[int]] = {a: take(spec.targets_per_anchor) for a in anchors}

    edges: list[tuple[int, str, int]] = []
    edge_set: set[tuple[int, str, int]] = set()

    def add_edge(e: tuple[int, str, int]) -> None:
        if e not in edge_set:
            edge_set.add(e)
            edges.append(e)

    for a in anchors:
        targets = anchor_targets[a]
        chunk_size = math.ceil(len(targets) / spec.chunks_per_anchor)
        for c in range(spec.chunks_per_anchor):
            chunk = targets[c * chunk_size : (c + 1) * chunk_size]
            if not chunk:
                continue
            chain = [a] + take(mp.length - 1)
            for i in range(1, mp.length):
                add_edge(_oriented_edge(mp.steps[i - 1], chain[i - 1], chain[i]))
            for t in chunk:
                add_edge(_oriented_edge(mp.steps[-1], chain[-1], t))

    badge_holders: set[int] = set()
    if spec.planted_property is not None:
        for a in anchors:
            for t in anchor_targets[a][: spec.gold_targets_per_anchor]:
                badge_holders.add(t)

    forbidden_pairs: set[tuple[int, int]] = set()
    for a in anchors:
        for t in anchor_targets[a]:
            forbidden_pairs.add((a, t))
            forbidden_pairs.add((t, a))

    noise_target = round(spec.noise_edge_rate * n)
    attempts = 0
    added = 0
    while added < noise_target:
        attempts += 1
        if attempts > 50 * max(noise_target, 1):
            raise GenerationError("could not place the requested noise edges")
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v or (u, v) in forbidden_pairs:
            continue
        rel = f"noise{rng.randrange(spec.noise_relation_types)}"
        e = (u, rel, v)
        if e in edge_set:
            continue
        add_edge(e)
        added += 1

    attributes: list[tuple[int, str, str]] = []
    for i in range(n):
        attributes.append((i, "type", f"type{i % spec.type_count}"))
    if spec.planted_property is not None:
        attr, value = spec.planted_property
        for t in sorted(badge_holders):
            attributes.append((t, attr, value))
    for i in range(n):
        seen = set()
        for _ in range(spec.noise_attributes_per_entity):
            pair = (
                f"a{rng.randrange(spec.noise_attribute_types)}",
                f"v{rng.randrange(spec.noise_attribute_values)}",
            )
            if pair not in seen:
                seen.add(pair)
                attributes.append((i, pair[0], pair[1]))

    # Oracle re-check on the assembled graph: the gold set of every anchor
    # must be exactly its planted targets (noise must not add satisfiers).
    adjacency_out: dict[int, dict[str, list[int]]] = {}
    adjacency_in: dict[int, dict[str, list[int]]] = {}
    for s, rel, o in edges:
        adjacency_out.setdefault(s, {}).setdefault(rel, []).append(o)
        adjacency_in.setdefault(o, {}).setdefault(rel, []).append(s)

    prop_set = set(badge_holders) if spec.planted_property is not None else None
    gold_by_anchor: dict[int, list[int]] = {}
    for a in anchors:
        satisfied = _satisfying_entities(adjacency_out, adjacency_in, a, mp)
        satisfied.discard(a)
        if prop_set is not None:
            satisfied &= prop_set
        expected = set(anchor_targets[a])
        if prop_set is not None:
            expected &= prop_set
        if satisfied != expected:
            raise GenerationError(
                f"planted semantics corrupted for anchor {labels[a]}: "
                f"oracle found {len(satisfied)} satisfiers, planted {len(expected)}"
            )
        gold_by_anchor[a] = sorted(satisfied)

    instances = []
    for i in range(spec.instance_count):
        q = anchors[i]
        others = [a for a in anchors if a != q]
        sources = rng.sample(others, spec.example_count)
        examples = tuple(
            (labels[src], labels[rng.choice(gold_by_anchor[src])]) for src in sources
        )
        instances.append(
            QueryInstance(
                group=spec.group,
                query=labels[q],
                examples=examples,
                gold=frozenset(labels[v] for v in gold_by_anchor[q]),
                k=spec.k,
            )
        )

    relations_lines = [f"{labels[s]}\t{rel}\t{labels[o]}" for s, rel, o in edges]
    attributes_lines = [f"{labels[s]}\t{a}\t{v}" for s, a, v in attributes]
    return relations_lines, attributes_lines, instances
