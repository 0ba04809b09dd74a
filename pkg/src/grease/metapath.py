"""Meta-path machinery: discovery, instance counting, and approximation.

A meta-path is a sequence of directed relation steps. Concrete paths are
always acyclic: enumeration tracks the nodes of the partial path and prunes
revisits, otherwise counts diverge on cycles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import UnknownEntityError
from .kg import KnowledgeGraph, RelationStep
from .stats import StatsIndex, pc_short


@dataclass(frozen=True)
class MetaPath:
    steps: tuple[RelationStep, ...]

    def __post_init__(self):
        if not self.steps:
            raise ValueError("meta-path must have at least one step")

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def text(self) -> str:
        return "/".join(step.text for step in self.steps)

    def reversed_inverted(self) -> "MetaPath":
        """The meta-path that the same paths follow when read backwards."""
        return MetaPath(tuple(step.invert() for step in reversed(self.steps)))

    def __str__(self) -> str:
        return self.text


def metapath(*steps: RelationStep) -> MetaPath:
    return MetaPath(tuple(steps))


def parse_metapath(text: str) -> MetaPath:
    """Parse the text form: steps joined by ``/``, inverted steps suffixed ``^-1``."""
    if not text:
        raise ValueError("empty meta-path text")
    steps = []
    for token in text.split("/"):
        if token.endswith("^-1"):
            name = token[: -len("^-1")]
            inverted = True
        else:
            name = token
            inverted = False
        if not name:
            raise ValueError(f"bad meta-path step: {token!r}")
        steps.append(RelationStep(name, inverted))
    return MetaPath(tuple(steps))


@dataclass
class MPSearchStats:
    """Optional out-parameter for mp_search; set when hub truncation triggered."""

    truncated: bool = False


def _partial_paths(
    kg: KnowledgeGraph,
    start: int,
    max_depth: int,
    max_degree_expansion: int | None,
    stats: MPSearchStats | None,
) -> dict[int, list[tuple[tuple[int, ...], tuple[RelationStep, ...]]]]:
    """All acyclic partial paths from start up to max_depth, grouped by end node.

    Includes the zero-length partial at start itself.
    """
    by_end: dict[int, list[tuple[tuple[int, ...], tuple[RelationStep, ...]]]] = {}
    stack = [((start,), ())]
    while stack:
        nodes, steps = stack.pop()
        by_end.setdefault(nodes[-1], []).append((nodes, steps))
        if len(steps) == max_depth:
            continue
        v = nodes[-1]
        expansions = 0
        for step in kg.neighbor_steps(v):
            for u in kg.step_neighbors(v, step):
                if u in nodes:
                    continue
                if max_degree_expansion is not None and expansions >= max_degree_expansion:
                    if stats is not None:
                        stats.truncated = True
                    break
                expansions += 1
                stack.append((nodes + (u,), steps + (step,)))
            else:
                continue
            break
    return by_end


def mp_search(
    kg: KnowledgeGraph,
    examples: Sequence[tuple[int, int]],
    max_len: int,
    max_degree_expansion: int | None = None,
    stats: MPSearchStats | None = None,
) -> set[MetaPath]:
    """All meta-paths of length <= max_len witnessed by an acyclic path for some example.

    Bidirectional per example: frontiers expand ceil(L/2) steps from the
    source and floor(L/2) from the target, then join on meeting nodes,
    discarding joins that repeat a node.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    found: set[MetaPath] = set()
    fwd_depth = (max_len + 1) // 2
    bwd_depth = max_len // 2
    for idx, (s, t) in enumerate(examples):
        for v in (s, t):
            if not (0 <= v < kg.entity_count):
                raise UnknownEntityError(f"example {idx}: unknown entity id {v}")
        if s == t:
            raise ValueError(f"example {idx}: source equals target")
        fwd = _partial_paths(kg, s, fwd_depth, max_degree_expansion, stats)
        bwd = _partial_paths(kg, t, bwd_depth, max_degree_expansion, stats)
        for meet, fwd_partials in fwd.items():
            bwd_partials = bwd.get(meet)
            if not bwd_partials:
                continue
            for f_nodes, f_steps in fwd_partials:
                for b_nodes, b_steps in bwd_partials:
                    total = len(f_steps) + len(b_steps)
                    if not (1 <= total <= max_len):
                        continue
                    if len(set(f_nodes) | set(b_nodes)) != len(f_nodes) + len(b_nodes) - 1:
                        continue
                    steps = f_steps + tuple(st.invert() for st in reversed(b_steps))
                    found.add(MetaPath(steps))
    return found


def instance_path_count(kg: KnowledgeGraph, q: int, v: int, mp: MetaPath) -> int:
    """Number of acyclic paths from q to v that follow mp, uncapped."""
    if q == v:
        raise ValueError("query equals target")
    steps = mp.steps
    count = 0
    stack = [((q,), 0)]
    while stack:
        nodes, depth = stack.pop()
        if depth == len(steps):
            if nodes[-1] == v:
                count += 1
            continue
        for u in kg.step_neighbors(nodes[-1], steps[depth]):
            if u not in nodes:
                stack.append((nodes + (u,), depth + 1))
    return count


def reachable_set(
    kg: KnowledgeGraph, q: int, mp: MetaPath, cap: int
) -> dict[int, int]:
    """Entities with at least one acyclic mp-instance from q, with counts capped.

    Counts saturate at cap; additional instances of an already-saturated
    endpoint are not accumulated.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    steps = mp.steps
    counts: dict[int, int] = {}
    stack = [((q,), 0)]
    while stack:
        nodes, depth = stack.pop()
        v = nodes[-1]
        if depth == len(steps):
            current = counts.get(v, 0)
            if current < cap:
                counts[v] = current + 1
            continue
        last = depth == len(steps) - 1
        for u in kg.step_neighbors(v, steps[depth]):
            if u in nodes:
                continue
            if last and counts.get(u, 0) >= cap:
                continue
            stack.append((nodes + (u,), depth + 1))
    return counts


def apc(index: StatsIndex, mp: MetaPath) -> float:
    """Approximate global path count: exact for length <= 2, factorized beyond.

    The two factorizations walk the step sequence forwards and backwards;
    their arithmetic mean is returned. A zero count anywhere in a
    factorization makes that product zero.
    """
    steps = mp.steps
    if len(steps) <= 2:
        return float(pc_short(index, steps))

    def single(i: int) -> int:
        return pc_short(index, steps[i : i + 1])

    def pair(i: int) -> int:
        return pc_short(index, steps[i : i + 2])

    start = float(single(0))
    for i in range(1, len(steps)):
        denom = single(i - 1)
        if denom == 0 or start == 0.0:
            start = 0.0
            break
        start *= pair(i - 1) / denom

    end = float(single(len(steps) - 1))
    for i in range(len(steps) - 1):
        denom = single(i + 1)
        if denom == 0 or end == 0.0:
            end = 0.0
            break
        end *= pair(i) / denom

    return 0.5 * (start + end)
