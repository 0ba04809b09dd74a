"""Precomputed frequency counts served in O(1) at query time.

The index holds exact acyclic path counts for every meta-path of length 1
or 2 that occurs in the graph, the number of entities each property
constrains, per-type entity counts, and each entity's most specific type
(smallest extent wins; lexicographic tie-break).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Sequence

from .errors import IndexFormatError
from .kg import KnowledgeGraph, Property, RelationStep

MAGIC = b"GRSIDX1"
VERSION = 1

PairKey = tuple[RelationStep, RelationStep]


@dataclass
class StatsIndex:
    entity_total: int
    relation_edge_counts: dict[str, int]
    pair_counts: dict[PairKey, int]
    property_extent: dict[Property, int]
    type_extent: dict[str, int]
    most_specific_type: list[str | None]


def build_index(kg: KnowledgeGraph) -> StatsIndex:
    """Count edges per relation, acyclic length-2 paths per step pair, and extents."""
    relation_edge_counts: dict[str, int] = {}

    # A length-2 path u -s1-> v -s2-> w is counted at its middle node v:
    # arrivals via s1 times departures via s2, minus pairs where u = w
    # (paths are acyclic). u = v and w = v are impossible: self-loops are
    # rejected at load.
    pair_counts: dict[PairKey, int] = {}
    for v in range(kg.entity_count):
        steps = kg.neighbor_steps(v)
        if not steps:
            continue
        nbrs = {step: kg.step_neighbors(v, step) for step in steps}
        for step, lst in nbrs.items():
            if not step.inverted:
                rel = step.relation
                relation_edge_counts[rel] = relation_edge_counts.get(rel, 0) + len(lst)
        sets = {step: set(lst) for step, lst in nbrs.items()}
        for s1_inv, arrivals in nbrs.items():
            s1 = s1_inv.invert()
            arrival_set = sets[s1_inv]
            for s2, departures in nbrs.items():
                count = len(arrivals) * len(departures) - len(arrival_set & sets[s2])
                if count:
                    key = (s1, s2)
                    pair_counts[key] = pair_counts.get(key, 0) + count

    property_extent: dict[Property, int] = {}
    type_extent: dict[str, int] = {}
    most_specific: list[str | None] = []
    for v in range(kg.entity_count):
        for prop in kg.properties_of(v):
            property_extent[prop] = property_extent.get(prop, 0) + 1
        for value in kg.type_values_of(v):
            type_extent[value] = type_extent.get(value, 0) + 1
    for v in range(kg.entity_count):
        values = kg.type_values_of(v)
        if not values:
            most_specific.append(None)
        else:
            most_specific.append(min(values, key=lambda t: (type_extent[t], t)))

    return StatsIndex(
        entity_total=kg.entity_count,
        relation_edge_counts=relation_edge_counts,
        pair_counts=pair_counts,
        property_extent=property_extent,
        type_extent=type_extent,
        most_specific_type=most_specific,
    )


def pc_short(index: StatsIndex, steps: Sequence[RelationStep]) -> int:
    """Exact path count for a meta-path of length 1 or 2; 0 for unseen keys."""
    if len(steps) == 1:
        # Every edge read backwards is a valid path, so r and r^-1 count equal.
        return index.relation_edge_counts.get(steps[0].relation, 0)
    if len(steps) == 2:
        return index.pair_counts.get((steps[0], steps[1]), 0)
    raise ValueError("use apc for meta-paths longer than 2")


def same_type_extent(index: StatsIndex, v: int) -> int:
    """Number of entities sharing v's most specific type; |V| when untyped."""
    t = index.most_specific_type[v]
    if t is None:
        return index.entity_total
    return index.type_extent[t]


# --- persistence ------------------------------------------------------------
#
# Binary layout, little-endian:
#   magic "GRSIDX1", u32 version, u64 entity_total,
#   string table (u32 n, then per string u32 byte length + utf-8 bytes),
#   relation counts (u32 n, then u32 string id + u64 count),
#   pair counts (u32 n, then u32 id + u8 inverted twice + u64 count),
#   property extents (u32 n, then u32 attr id + u32 value id + u64 count),
#   type extents (u32 n, then u32 value id + u64 count),
#   per-entity most specific type (entity_total u32 ids, 0xFFFFFFFF = none).

_NONE_ID = 0xFFFFFFFF


def _open_for(target, mode: str):
    if hasattr(target, "read") or hasattr(target, "write"):
        return target, False
    return open(Path(target), mode), True


def save_index(index: StatsIndex, sink) -> None:
    f, owned = _open_for(sink, "wb")
    try:
        strings = sorted(
            set(index.relation_edge_counts)
            | {step.relation for pair in index.pair_counts for step in pair}
            | {p.attribute for p in index.property_extent}
            | {p.value for p in index.property_extent}
            | set(index.type_extent)
        )
        sid = {s: i for i, s in enumerate(strings)}

        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(struct.pack("<Q", index.entity_total))
        f.write(struct.pack("<I", len(strings)))
        for s in strings:
            data = s.encode("utf-8")
            f.write(struct.pack("<I", len(data)))
            f.write(data)

        rel_items = sorted(index.relation_edge_counts.items())
        f.write(struct.pack("<I", len(rel_items)))
        for rel, count in rel_items:
            f.write(struct.pack("<IQ", sid[rel], count))

        pair_items = sorted(
            index.pair_counts.items(),
            key=lambda kv: (kv[0][0].relation, kv[0][0].inverted, kv[0][1].relation, kv[0][1].inverted),
        )
        f.write(struct.pack("<I", len(pair_items)))
        for (s1, s2), count in pair_items:
            f.write(struct.pack("<IBIBQ", sid[s1.relation], s1.inverted, sid[s2.relation], s2.inverted, count))

        prop_items = sorted(index.property_extent.items())
        f.write(struct.pack("<I", len(prop_items)))
        for prop, count in prop_items:
            f.write(struct.pack("<IIQ", sid[prop.attribute], sid[prop.value], count))

        type_items = sorted(index.type_extent.items())
        f.write(struct.pack("<I", len(type_items)))
        for value, count in type_items:
            f.write(struct.pack("<IQ", sid[value], count))

        for t in index.most_specific_type:
            f.write(struct.pack("<I", _NONE_ID if t is None else sid[t]))
    finally:
        if owned:
            f.close()


def _read_exact(f: BinaryIO, n: int) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise IndexFormatError("truncated index file")
    return data


def _read_struct(f: BinaryIO, fmt: str) -> tuple:
    return struct.unpack(fmt, _read_exact(f, struct.calcsize(fmt)))


def load_index(source) -> StatsIndex:
    f, owned = _open_for(source, "rb")
    try:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise IndexFormatError("not an index file")
        (version,) = _read_struct(f, "<I")
        if version != VERSION:
            raise IndexFormatError(f"unsupported version: {version}")
        (entity_total,) = _read_struct(f, "<Q")

        (n_strings,) = _read_struct(f, "<I")
        strings = []
        for _ in range(n_strings):
            (length,) = _read_struct(f, "<I")
            strings.append(_read_exact(f, length).decode("utf-8"))

        def s(i: int) -> str:
            try:
                return strings[i]
            except IndexError:
                raise IndexFormatError("truncated index file") from None

        (n_rel,) = _read_struct(f, "<I")
        relation_edge_counts = {}
        for _ in range(n_rel):
            i, count = _read_struct(f, "<IQ")
            relation_edge_counts[s(i)] = count

        (n_pair,) = _read_struct(f, "<I")
        pair_counts = {}
        for _ in range(n_pair):
            i1, inv1, i2, inv2, count = _read_struct(f, "<IBIBQ")
            pair_counts[(RelationStep(s(i1), bool(inv1)), RelationStep(s(i2), bool(inv2)))] = count

        (n_prop,) = _read_struct(f, "<I")
        property_extent = {}
        for _ in range(n_prop):
            ia, iv, count = _read_struct(f, "<IIQ")
            property_extent[Property(s(ia), s(iv))] = count

        (n_type,) = _read_struct(f, "<I")
        type_extent = {}
        for _ in range(n_type):
            iv, count = _read_struct(f, "<IQ")
            type_extent[s(iv)] = count

        most_specific: list[str | None] = []
        for _ in range(entity_total):
            (i,) = _read_struct(f, "<I")
            most_specific.append(None if i == _NONE_ID else s(i))

        return StatsIndex(
            entity_total=entity_total,
            relation_edge_counts=relation_edge_counts,
            pair_counts=pair_counts,
            property_extent=property_extent,
            type_extent=type_extent,
            most_specific_type=most_specific,
        )
    finally:
        if owned:
            f.close()
