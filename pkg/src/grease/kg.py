"""Knowledge graph loading and representation.

Entities carry string labels and dense integer ids. Edges are typed and
directed; both orientations are kept so a path may traverse an edge either
way. Each entity additionally has a set of attribute pairs; its *properties*
are those attributes plus one pair per outgoing edge (relation name, target
label).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .errors import LoadError, UnknownEntityError


class Property(NamedTuple):
    """An (attribute-or-relation, value) pair constraining an entity."""

    attribute: str
    value: str

    @property
    def text(self) -> str:
        return f"{self.attribute}={self.value}"


@dataclass(frozen=True)
class RelationStep:
    """One traversal step: a relation type plus a direction flag."""

    relation: str
    inverted: bool = False

    def invert(self) -> "RelationStep":
        return RelationStep(self.relation, not self.inverted)

    @property
    def text(self) -> str:
        return f"{self.relation}^-1" if self.inverted else self.relation


class KnowledgeGraph:
    """Immutable entity/edge/attribute store with forward and inverse adjacency.

    Construct via :func:`load_kg`. After construction the graph is never
    mutated and may be shared freely across threads.
    """

    def __init__(
        self,
        labels: list[str],
        out_adj: list[dict[str, list[int]]],
        in_adj: list[dict[str, list[int]]],
        attributes: list[frozenset[Property]],
        type_attribute: str,
        edge_count: int,
        skipped_self_loops: int,
    ):
        self._labels = labels
        self._ids = {label: i for i, label in enumerate(labels)}
        self._out = out_adj
        self._in = in_adj
        self._attributes = attributes
        self.type_attribute = type_attribute
        self.edge_count = edge_count
        self.skipped_self_loops = skipped_self_loops

    @property
    def entity_count(self) -> int:
        return len(self._labels)

    def label_of(self, v: int) -> str:
        return self._labels[v]

    def id_of(self, label: str) -> int:
        try:
            return self._ids[label]
        except KeyError:
            raise UnknownEntityError(f"unknown entity '{label}'", label=label) from None

    def has_label(self, label: str) -> bool:
        return label in self._ids

    def labels(self) -> list[str]:
        return list(self._labels)

    def attributes_of(self, v: int) -> frozenset[Property]:
        """The entity's attribute pairs only (no relation pairs)."""
        self._check(v)
        return self._attributes[v]

    def properties_of(self, v: int) -> set[Property]:
        """Attribute pairs plus (relation, target-label) pairs for outgoing edges."""
        self._check(v)
        props = set(self._attributes[v])
        for rel, targets in self._out[v].items():
            for o in targets:
                props.add(Property(rel, self._labels[o]))
        return props

    def step_neighbors(self, v: int, step: RelationStep) -> list[int]:
        """Entities reachable from v by one traversal of the given step, ascending id."""
        self._check(v)
        adj = self._in if step.inverted else self._out
        return adj[v].get(step.relation, [])

    def out_edges(self, v: int) -> list[tuple[str, int]]:
        self._check(v)
        return [(rel, o) for rel in sorted(self._out[v]) for o in self._out[v][rel]]

    def in_edges(self, v: int) -> list[tuple[str, int]]:
        self._check(v)
        return [(rel, s) for rel in sorted(self._in[v]) for s in self._in[v][rel]]

    def neighbor_steps(self, v: int) -> list[RelationStep]:
        """All steps with at least one neighbor at v, deterministic order."""
        steps = [RelationStep(r, False) for r in sorted(self._out[v])]
        steps += [RelationStep(r, True) for r in sorted(self._in[v])]
        return steps

    def iter_edges(self) -> Iterator[tuple[int, str, int]]:
        for s in range(len(self._labels)):
            for rel in sorted(self._out[s]):
                for o in self._out[s][rel]:
                    yield (s, rel, o)

    def type_values_of(self, v: int) -> list[str]:
        """Values of the configured type attribute, sorted."""
        return sorted(val for (a, val) in self._attributes[v] if a == self.type_attribute)

    def _check(self, v: int) -> None:
        if not (0 <= v < len(self._labels)):
            raise UnknownEntityError(f"unknown entity id {v}")


def _parse_triple_lines(
    lines: Iterable[str], what: str
) -> Iterator[tuple[int, str, str, str]]:
    for n, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise LoadError(
                f"{what} line {n}: expected 3 tab-separated fields, got {len(fields)}",
                line_number=n,
            )
        yield n, fields[0], fields[1], fields[2]


def load_kg(
    relations_source: Iterable[str],
    attributes_source: Iterable[str] = (),
    type_attribute: str = "type",
) -> KnowledgeGraph:
    """Load a graph from relation and attribute line streams.

    Each relation line is ``subject<TAB>relation<TAB>object``; each attribute
    line is ``subject<TAB>attribute<TAB>value``. Lines starting with ``#`` and
    blank lines are ignored. Duplicate edges are dropped; self-loop edges are
    skipped with a warning count (paths are acyclic so they can never be
    traversed). Entity ids follow first appearance, relations source first.
    """
    labels: list[str] = []
    ids: dict[str, int] = {}

    def intern(label: str) -> int:
        i = ids.get(label)
        if i is None:
            i = len(labels)
            ids[label] = i
            labels.append(label)
        return i

    edges: set[tuple[int, str, int]] = set()
    skipped_self_loops = 0
    saw_relation_line = False
    for _n, subj, rel, obj in _parse_triple_lines(relations_source, "relations"):
        saw_relation_line = True
        s = intern(subj)
        o = intern(obj)
        if s == o:
            skipped_self_loops += 1
            continue
        edges.add((s, rel, o))
    if not saw_relation_line:
        raise LoadError("empty graph")

    attr_sets: dict[int, set[Property]] = {}
    for _n, subj, attr, value in _parse_triple_lines(attributes_source, "attributes"):
        s = intern(subj)
        attr_sets.setdefault(s, set()).add(Property(attr, value))

    n = len(labels)
    out_adj: list[dict[str, list[int]]] = [{} for _ in range(n)]
    in_adj: list[dict[str, list[int]]] = [{} for _ in range(n)]
    for s, rel, o in sorted(edges):
        out_adj[s].setdefault(rel, []).append(o)
        in_adj[o].setdefault(rel, []).append(s)
    for adj in (out_adj, in_adj):
        for d in adj:
            for lst in d.values():
                lst.sort()

    attributes = [frozenset(attr_sets.get(v, ())) for v in range(n)]
    return KnowledgeGraph(
        labels=labels,
        out_adj=out_adj,
        in_adj=in_adj,
        attributes=attributes,
        type_attribute=type_attribute,
        edge_count=len(edges),
        skipped_self_loops=skipped_self_loops,
    )
