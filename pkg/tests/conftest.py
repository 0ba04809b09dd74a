from __future__ import annotations

import random

import pytest

from grease import build_index, load_kg

FILMS = ["Inception", "Suburbicon", "OceansEleven", "AStarIsBorn"]
PEOPLE = [
    "TomHardy",
    "LeonardoDiCaprio",
    "ChristopherNolan",
    "MattDamon",
    "GeorgeClooney",
    "JuliaRoberts",
    "StevenSoderbergh",
    "LadyGaga",
    "DaveChappelle",
    "BradleyCooper",
]

TINY_RELATION_TRIPLES = [
    ("Inception", "stars", "TomHardy"),
    ("Inception", "stars", "LeonardoDiCaprio"),
    ("Inception", "director", "ChristopherNolan"),
    ("Suburbicon", "stars", "MattDamon"),
    ("Suburbicon", "director", "GeorgeClooney"),
    ("OceansEleven", "stars", "MattDamon"),
    ("OceansEleven", "stars", "JuliaRoberts"),
    ("OceansEleven", "director", "StevenSoderbergh"),
    ("AStarIsBorn", "stars", "LadyGaga"),
    ("AStarIsBorn", "stars", "DaveChappelle"),
    ("AStarIsBorn", "stars", "BradleyCooper"),
    ("AStarIsBorn", "director", "BradleyCooper"),
    ("Suburbicon", "subsequentWork", "OceansEleven"),
]

TINY_ATTRIBUTE_TRIPLES = (
    [(p, "type", "Person") for p in PEOPLE]
    + [(f, "type", "Film") for f in FILMS]
    + [(p, "gender", "F") for p in ("LadyGaga", "JuliaRoberts")]
    + [
        (p, "gender", "M")
        for p in PEOPLE
        if p not in ("LadyGaga", "JuliaRoberts")
    ]
    + [(p, "country", "UK") for p in ("TomHardy", "ChristopherNolan")]
    + [
        (p, "country", "US")
        for p in PEOPLE
        if p not in ("TomHardy", "ChristopherNolan")
    ]
    + [("Suburbicon", "genre", "Comedy"), ("AStarIsBorn", "genre", "Drama")]
)

TINY_RELATIONS = ["\t".join(t) for t in TINY_RELATION_TRIPLES]
TINY_ATTRIBUTES = ["\t".join(t) for t in TINY_ATTRIBUTE_TRIPLES]

S1 = (("DaveChappelle", "LadyGaga"), ("MattDamon", "JuliaRoberts"))
S2 = (("DaveChappelle", "BradleyCooper"), ("MattDamon", "GeorgeClooney"))


@pytest.fixture(scope="session")
def tiny_kg():
    return load_kg(TINY_RELATIONS, TINY_ATTRIBUTES)


@pytest.fixture(scope="session")
def tiny_index(tiny_kg):
    return build_index(tiny_kg)


def random_graph_triples(
    rng: random.Random,
    n_entities: int,
    n_relations: int,
    n_edges: int,
) -> list[tuple[str, str, str]]:
    """Random multigraph without self-loops or duplicate triples."""
    labels = [f"n{i:04d}" for i in range(n_entities)]
    relations = [f"r{j}" for j in range(n_relations)]
    triples: set[tuple[str, str, str]] = set()
    attempts = 0
    while len(triples) < n_edges and attempts < 100 * n_edges:
        attempts += 1
        u = rng.randrange(n_entities)
        v = rng.randrange(n_entities)
        if u == v:
            continue
        triples.add((labels[u], rng.choice(relations), labels[v]))
    return sorted(triples)


def random_type_attributes(
    rng: random.Random, triples: list[tuple[str, str, str]], n_types: int = 3
) -> list[tuple[str, str, str]]:
    entities = sorted({s for s, _r, _o in triples} | {o for _s, _r, o in triples})
    return [(e, "type", f"t{rng.randrange(n_types)}") for e in entities]


def to_lines(triples: list[tuple[str, str, str]]) -> list[str]:
    return ["\t".join(t) for t in triples]
