"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion. Each test prints ``ACCEPTANCE[<criterion>] PASS`` on success;
a failure shows up as the usual pytest failure for that test.
"""

from __future__ import annotations

import json
import math
import random
import time

import pytest

from grease import (
    ModelParams,
    PlantedSpec,
    QueryInstance,
    RelationStep,
    apc,
    build_index,
    gamma_mp,
    generate_planted,
    grease_search,
    instance_path_count,
    load_kg,
    mp_log_likelihood,
    mp_posteriors,
    mp_search,
    ndcg_at_k,
    parse_metapath,
    pc_short,
    prop_log_likelihood,
    prop_posteriors,
    regularizer,
    run_benchmark,
)
from grease.evaluation import dump_instances
from grease.payloads import build_search_payload, canonical_json
from grease.search import SearchRequest

import oracles
from conftest import (
    S1,
    TINY_ATTRIBUTES,
    TINY_RELATIONS,
    random_graph_triples,
    to_lines,
)


def _passed(name: str) -> None:
    print(f"ACCEPTANCE[{name}] PASS")


def _random_graph_suite():
    """50 random graphs (<= 5,000 edges, <= 20 relation types), deterministic."""
    rng = random.Random(20240817)
    suite = []
    for i in range(50):
        if i < 40:
            n, rels, edges = (
                rng.randrange(20, 80),
                rng.randrange(2, 9),
                rng.randrange(60, 400),
            )
        elif i < 48:
            n, rels, edges = (
                rng.randrange(100, 200),
                rng.randrange(5, 21),
                rng.randrange(600, 1500),
            )
        elif i == 48:
            n, rels, edges = 300, 12, 3000
        else:
            n, rels, edges = 400, 20, 5000
        triples = random_graph_triples(rng, n, rels, edges)
        suite.append((rng.randrange(1 << 30), triples))
    return suite


@pytest.fixture(scope="module")
def graph_suite():
    return _random_graph_suite()


def test_oracle_equivalence_path_counts(graph_suite):
    """pc_short and instance_path_count match an exhaustive acyclic-DFS oracle."""
    started = time.perf_counter()
    for seed, triples in graph_suite:
        rng = random.Random(seed)
        kg = load_kg(to_lines(triples))
        index = build_index(kg)

        expected = oracles.global_counts(triples, 2)
        for steps, count in expected.items():
            key = tuple(RelationStep(r, inv) for r, inv in steps)
            assert pc_short(index, key) == count
        for (s1, s2), count in index.pair_counts.items():
            oracle_key = ((s1.relation, s1.inverted), (s2.relation, s2.inverted))
            assert expected[oracle_key] == count
        assert pc_short(index, (RelationStep("never-seen"),)) == 0

        entities = sorted(oracles.all_entities(triples))
        for start in rng.sample(entities, min(3, len(entities))):
            tallies: dict = {}
            for nodes, steps in oracles.iter_acyclic_paths(triples, start, 3):
                key = (nodes[-1], steps)
                tallies[key] = tallies.get(key, 0) + 1
            checked = 0
            for (target, steps), count in sorted(tallies.items()):
                mp = parse_metapath(oracles.mp_text(steps))
                assert (
                    instance_path_count(kg, kg.id_of(start), kg.id_of(target), mp)
                    == count
                )
                checked += 1
                if checked >= 40:
                    break
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"oracle equivalence took {elapsed:.1f}s"
    _passed("oracle-path-counts")


def test_apc_correctness(graph_suite, tiny_kg, tiny_index):
    """apc is exact at length <= 2; the fixture length-3 value is 2.5 vs exact 1."""
    for seed, triples in graph_suite[:25]:
        kg = load_kg(to_lines(triples))
        index = build_index(kg)
        for steps, count in oracles.global_counts(triples, 2).items():
            mp = parse_metapath(oracles.mp_text(steps))
            assert apc(index, mp) == float(count)

    mp = parse_metapath("stars^-1/stars/stars^-1")
    assert apc(tiny_index, mp) == 2.5
    exact = sum(
        1
        for start in tiny_kg.labels()
        for nodes, steps in oracles.iter_acyclic_paths(
            [tuple(line.split("\t")) for line in TINY_RELATIONS], start, 3
        )
        if oracles.mp_text(steps) == "stars^-1/stars/stars^-1" and len(steps) == 3
    )
    assert exact == 1
    _passed("apc-correctness")


def test_mpsearch_completeness(graph_suite):
    """mp_search at L=3 equals the oracle set of witnessed meta-paths."""
    for seed, triples in graph_suite:
        rng = random.Random(seed ^ 0x5EED)
        kg = load_kg(to_lines(triples))
        entities = sorted(oracles.all_entities(triples))
        if len(entities) < 4:
            continue
        pairs = []
        while len(pairs) < 2:
            s, t = rng.sample(entities, 2)
            pairs.append((s, t))
        expected = set()
        for s, t in pairs:
            expected |= {
                oracles.mp_text(steps)
                for steps in oracles.metapaths_between(triples, s, t, 3)
            }
        found = mp_search(kg, [(kg.id_of(s), kg.id_of(t)) for s, t in pairs], 3)
        assert {m.text for m in found} == expected
    _passed("mpsearch-completeness")


def test_generative_weighting_sanity(tiny_kg, tiny_index):
    """Co-star meta-path and gender property win on the fixture; smoothing keeps
    every selected facet's log-likelihood finite on 1,000 random example sets."""
    pairs = [(tiny_kg.id_of(s), tiny_kg.id_of(t)) for s, t in S1]
    omega_mp = sorted(mp_search(tiny_kg, pairs, 3), key=lambda m: m.text)
    mp_facets = mp_posteriors(tiny_kg, tiny_index, omega_mp, pairs)
    assert mp_facets[0].text == "stars^-1/stars"

    shared_props = tiny_kg.properties_of(pairs[0][1]) & tiny_kg.properties_of(pairs[1][1])
    prop_facets = prop_posteriors(tiny_kg, tiny_index, sorted(shared_props), pairs)
    assert prop_facets[0].text == "gender=F"

    rng = random.Random(73)
    n = tiny_kg.entity_count
    for _ in range(1000):
        examples = []
        while len(examples) < rng.choice((1, 2, 3)):
            s, t = rng.randrange(n), rng.randrange(n)
            if s != t:
                examples.append((s, t))
        for mp in mp_search(tiny_kg, examples, 3):
            assert math.isfinite(mp_log_likelihood(tiny_kg, tiny_index, examples, mp))
        for _s, t in examples:
            for prop in tiny_kg.properties_of(t):
                assert math.isfinite(
                    prop_log_likelihood(tiny_kg, tiny_index, examples, prop)
                )
    _passed("generative-weighting-sanity")


MP_ONLY_GROUPS = [
    PlantedSpec(
        group="alpha-mp",
        entity_count=2000,
        planted_metapath="supports^-1/chairs",
        instance_count=20,
        targets_per_anchor=12,
        gold_targets_per_anchor=12,
        noise_edge_rate=1.5,
    ),
    PlantedSpec(
        group="bravo-mp",
        entity_count=2000,
        planted_metapath="member_of/member_of^-1",
        instance_count=20,
        targets_per_anchor=12,
        gold_targets_per_anchor=12,
        noise_edge_rate=1.5,
    ),
    PlantedSpec(
        group="charlie-mp",
        entity_count=2000,
        planted_metapath="funds^-1/leads",
        instance_count=20,
        targets_per_anchor=12,
        gold_targets_per_anchor=12,
        noise_edge_rate=1.5,
    ),
]

PROP_GROUPS = [
    PlantedSpec(
        group="delta-prop",
        entity_count=2000,
        planted_metapath="collab^-1/directs",
        planted_property=("badge", "gold"),
        instance_count=20,
        targets_per_anchor=12,
        gold_targets_per_anchor=6,
        noise_edge_rate=1.5,
    ),
    PlantedSpec(
        group="echo-prop",
        entity_count=2000,
        planted_metapath="attends^-1/hosts/performs",
        planted_property=("marker", "special"),
        instance_count=20,
        targets_per_anchor=12,
        gold_targets_per_anchor=6,
        noise_edge_rate=1.5,
    ),
]


def test_planted_benchmark_end_to_end():
    """Desk-scale analogue of the headline comparison: the full model wins on
    property-planted groups, the meta-path-only variant wins on its own turf."""
    started = time.perf_counter()
    mp_only_means = {}
    prop_full_means = {}
    prop_np_means = {}
    for i, spec in enumerate(MP_ONLY_GROUPS):
        relations, attributes, instances = generate_planted(1000 + i, spec)
        kg = load_kg(relations, attributes)
        index = build_index(kg)
        report = run_benchmark(kg, index, instances, variant="np")
        assert not report.failures
        mp_only_means[spec.group] = report.group_means()[(spec.group, 2)]
    for i, spec in enumerate(PROP_GROUPS):
        relations, attributes, instances = generate_planted(2000 + i, spec)
        kg = load_kg(relations, attributes)
        index = build_index(kg)
        full = run_benchmark(kg, index, instances, variant="full")
        np_variant = run_benchmark(kg, index, instances, variant="np")
        assert not full.failures and not np_variant.failures
        prop_full_means[spec.group] = full.group_means()[(spec.group, 2)]
        prop_np_means[spec.group] = np_variant.group_means()[(spec.group, 2)]

    print(
        "planted benchmark:",
        {k: round(v, 4) for k, v in mp_only_means.items()},
        {k: round(v, 4) for k, v in prop_full_means.items()},
        {k: round(v, 4) for k, v in prop_np_means.items()},
    )
    for group, mean in mp_only_means.items():
        assert mean >= 0.90, f"np on {group}: {mean:.4f}"
    for group, mean in prop_full_means.items():
        assert mean >= 0.90, f"full on {group}: {mean:.4f}"
    for group in prop_full_means:
        assert prop_np_means[group] < prop_full_means[group], group

    elapsed = time.perf_counter() - started
    assert elapsed < 300.0, f"planted benchmark took {elapsed:.1f}s"
    _passed("planted-benchmark")


def test_latency_at_scale():
    """100,000-edge graph: index build under 60 s, mean search under 1 s."""
    anchors = 50 + 8
    planted_edges = anchors * 2 * 7  # two chunks: one chain edge + six targets
    spec = PlantedSpec(
        group="latency",
        entity_count=20000,
        planted_metapath="works_at^-1/leads",
        planted_property=("badge", "vip"),
        instance_count=50,
        targets_per_anchor=12,
        gold_targets_per_anchor=6,
        noise_edge_rate=(100000 - planted_edges) / 20000,
    )
    relations, attributes, instances = generate_planted(42, spec)
    assert len(relations) == 100000
    kg = load_kg(relations, attributes)

    started = time.perf_counter()
    index = build_index(kg)
    build_seconds = time.perf_counter() - started
    assert build_seconds < 60.0, f"index build took {build_seconds:.1f}s"

    report = run_benchmark(kg, index, instances, variant="full")
    assert not report.failures
    assert len(report.results) == 50
    mean_seconds = report.mean_seconds()
    print(f"latency: index build {build_seconds:.2f}s, mean search {mean_seconds*1000:.1f}ms")
    assert mean_seconds < 1.0, f"mean search latency {mean_seconds:.3f}s"
    _passed("latency-at-scale")


def test_regularizer_and_clamp_identities():
    params = ModelParams()
    for length in range(1, 8):
        shorter = parse_metapath("/".join(["r"] * length))
        longer = parse_metapath("/".join(["r"] * (length + 1)))
        ratio = regularizer(shorter, params) / regularizer(longer, params)
        assert abs(ratio - math.exp(params.beta)) <= 1e-12 * math.exp(params.beta)
    for x in range(21):
        assert gamma_mp(x, params) == float(min(x, params.alpha_mp))
    _passed("regularizer-and-clamp")


def test_ndcg_unit_values():
    worked = ndcg_at_k(["a", "x", "b"], {"a", "b"}, 3)
    assert abs(worked - 1.5 / (1 + 1 / math.log2(3))) <= 1e-6
    assert abs(worked - 0.91972079) <= 1e-6
    assert abs(ndcg_at_k(["a", "b"], {"a", "b"}, 10) - 1.0) <= 1e-6
    assert abs(ndcg_at_k(["x", "y"], {"a"}, 2) - 0.0) <= 1e-6
    _passed("ndcg-unit-values")


def test_determinism_byte_identical_outputs():
    """Search payloads, generator outputs, and benchmark reports are
    byte-identical across two independent runs (timing fields excluded)."""

    def search_payload_bytes() -> str:
        kg = load_kg(TINY_RELATIONS, TINY_ATTRIBUTES)
        index = build_index(kg)
        outcome = grease_search(
            kg, index, SearchRequest(query="TomHardy", examples=S1)
        )
        return canonical_json(build_search_payload(outcome))

    assert search_payload_bytes() == search_payload_bytes()

    spec = MP_ONLY_GROUPS[0]
    first = generate_planted(5, spec)
    second = generate_planted(5, spec)
    assert "\n".join(first[0]) == "\n".join(second[0])
    assert "\n".join(first[1]) == "\n".join(second[1])
    assert dump_instances(first[2]) == dump_instances(second[2])

    def report_bytes() -> str:
        kg = load_kg(TINY_RELATIONS, TINY_ATTRIBUTES)
        index = build_index(kg)
        instances = [
            QueryInstance("g", "TomHardy", S1, frozenset({"LeonardoDiCaprio"})),
            QueryInstance("g", "MattDamon", S1, frozenset({"JuliaRoberts"})),
        ]
        report = run_benchmark(kg, index, instances)
        return canonical_json(report.to_json_dict(include_timing=False))

    assert report_bytes() == report_bytes()
    _passed("determinism")
