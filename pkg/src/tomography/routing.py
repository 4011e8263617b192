"""Measurement paths, path/node incidence and separation queries.

Three routing schemes are supported. ``CSP`` uses simple paths with at least
one edge between an input and a different output. ``CAP_MINUS`` uses walks
with at least one edge, so nodes may repeat. ``CAP`` also accepts the
one-node path at a node that is both an input and an output.

Walk sets are infinite, so they are never enumerated. A walk is reduced to
the set of nodes it touches, and that set is decided by reachability.
"""

from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, NamedTuple

from .errors import BudgetExceeded, DomainError
from .graph import Graph, iter_bits, reach_mask, to_mask
from .monitors import MonitorPlacement

DEFAULT_PATH_BUDGET = 5_000_000


class RoutingScheme(enum.Enum):
    CSP = "csp"
    CAP_MINUS = "cap-"
    CAP = "cap"

    @classmethod
    def parse(cls, text: "str | RoutingScheme") -> "RoutingScheme":
        if isinstance(text, RoutingScheme):
            return text
        aliases = {"csp": cls.CSP, "cap-": cls.CAP_MINUS, "cap_minus": cls.CAP_MINUS, "cap": cls.CAP}
        try:
            return aliases[text.lower()]
        except KeyError:
            raise DomainError(f"unknown routing scheme {text!r}") from None


class Separation(NamedTuple):
    separated: bool
    witness: Any


# ---- explicit CSP paths ----

@dataclass(frozen=True)
class PathIndex:
    """Enumerated paths; ``incidence[v]`` is a bitset over path ids."""

    node_count: int
    paths: tuple[tuple[int, ...], ...]

    @cached_property
    def incidence(self) -> tuple[int, ...]:
        inc = [0] * self.node_count
        for i, p in enumerate(self.paths):
            bit = 1 << i
            for v in p:
                inc[v] |= bit
        return tuple(inc)

    @property
    def path_count(self) -> int:
        return len(self.paths)

    def union_mask(self, nodes: Iterable[int]) -> int:
        out = 0
        inc = self.incidence
        for v in nodes:
            out |= inc[v]
        return out

    def covered_mask(self) -> int:
        return to_mask(v for v in range(self.node_count) if self.incidence[v])

    def to_lines(self) -> str:
        return "".join(" ".join(map(str, p)) + "\n" for p in self.paths)


def enumerate_csp_paths(
    g: Graph,
    chi: MonitorPlacement,
    path_budget: int = DEFAULT_PATH_BUDGET,
    exclude_starts: Iterable[int] = (),
) -> PathIndex:
    """Depth-first listing of every simple input-to-output path with at least
    one edge. Inputs and neighbours are visited in ascending id order."""
    chi.validate(g)
    outs = chi.output_mask
    skip = set(exclude_starts)
    adj = g.out_lists
    paths: list[tuple[int, ...]] = []

    def emit(path: list[int]) -> None:
        paths.append(tuple(path))
        if len(paths) > path_budget:
            raise BudgetExceeded(f"more than {path_budget} paths", len(paths))

    for a in sorted(chi.inputs):
        if a in skip:
            continue
        path = [a]
        visited = 1 << a
        # explicit stack of neighbour iterators keeps deep graphs off the call stack
        stack = [iter(adj[a])]
        while stack:
            w = next(stack[-1], None)
            if w is None:
                stack.pop()
                visited &= ~(1 << path.pop())
                continue
            if visited >> w & 1:
                continue
            path.append(w)
            visited |= 1 << w
            if outs >> w & 1:
                emit(path)
            stack.append(iter(adj[w]))
    return PathIndex(g.node_count, tuple(paths))


def path_union(idx: PathIndex, nodes: Iterable[int]) -> set[int]:
    return set(iter_bits(idx.union_mask(nodes)))


def csp_separates(idx: PathIndex, first: Iterable[int], second: Iterable[int]) -> Separation:
    """Whether some path meets exactly one of the two node sets. The witness
    is the smallest such path id."""
    a, b = frozenset(first), frozenset(second)
    if a == b:
        raise DomainError("separation needs two different node sets")
    diff = idx.union_mask(a) ^ idx.union_mask(b)
    if not diff:
        return Separation(False, None)
    return Separation(True, (diff & -diff).bit_length() - 1)


# ---- path families via subset dynamic programming ----

@dataclass(frozen=True)
class PathFamily:
    """Distinct node sets of the CSP paths plus the number of paths.

    Separation only depends on which node sets occur, so this is all the
    identifiability search needs. It is built by a dynamic program over
    (visited set, current node) states, which counts paths without listing
    them.
    """

    node_count: int
    node_sets: tuple[int, ...]
    path_count: int

    @classmethod
    def from_index(cls, idx: PathIndex) -> "PathFamily":
        sets = {to_mask(p) for p in idx.paths}
        return cls(idx.node_count, tuple(sorted(sets)), idx.path_count)

    @cached_property
    def incidence(self) -> tuple[int, ...]:
        inc = [0] * self.node_count
        for i, s in enumerate(self.node_sets):
            bit = 1 << i
            for v in iter_bits(s):
                inc[v] |= bit
        return tuple(inc)


def csp_path_family(
    g: Graph,
    chi: MonitorPlacement,
    path_budget: int = DEFAULT_PATH_BUDGET,
    exclude_starts: Iterable[int] = (),
) -> PathFamily:
    chi.validate(g)
    outs = chi.output_mask
    skip = set(exclude_starts)
    adj = g.out_lists
    layer: dict[tuple[int, int], int] = {(1 << a, a): 1 for a in sorted(chi.inputs) if a not in skip}
    sets: set[int] = set()
    total = 0
    while layer:
        nxt: dict[tuple[int, int], int] = defaultdict(int)
        for (mask, v), ways in layer.items():
            if outs >> v & 1 and mask != 1 << v:
                sets.add(mask)
                total += ways
            for w in adj[v]:
                if not mask >> w & 1:
                    nxt[(mask | 1 << w, w)] += ways
        if total > path_budget:
            raise BudgetExceeded(f"more than {path_budget} paths", total)
        layer = nxt
    return PathFamily(g.node_count, tuple(sorted(sets)), total)


# ---- walks ----

def live_walk_nodes(g: Graph, chi: MonitorPlacement, avoid: int, allow_single: bool = False) -> int:
    """Bitset of nodes lying on some input-to-output walk in ``g - avoid``.

    Walks need at least one edge unless ``allow_single`` is set, in which
    case a lone node that is both input and output also counts.
    """
    allowed = g.all_mask & ~avoid
    ins = chi.input_mask & allowed
    outs = chi.output_mask & allowed
    live = reach_mask(g, ins, allowed, True) & reach_mask(g, outs, allowed, False)
    if allow_single:
        return live
    for v in iter_bits(live & ins & outs):
        bit = 1 << v
        if reach_mask(g, ins & ~bit, allowed, True) & bit:
            continue
        if reach_mask(g, outs & ~bit, allowed, False) & bit:
            continue
        if reach_mask(g, g.out_masks[v] & allowed, allowed, True) & bit:
            continue
        live &= ~bit
    return live


def _bfs_path(g: Graph, sources: int, target: int, allowed: int) -> list[int] | None:
    """Shortest forward path from any node of ``sources`` to ``target``."""
    sources &= allowed
    if not sources:
        return None
    parent: dict[int, int | None] = {s: None for s in iter_bits(sources)}
    queue = deque(sorted(parent))
    while queue:
        u = queue.popleft()
        if u == target:
            out = [u]
            while parent[out[-1]] is not None:
                out.append(parent[out[-1]])  # type: ignore[arg-type]
            return out[::-1]
        for w in g.out_lists[u]:
            if allowed >> w & 1 and w not in parent:
                parent[w] = u
                queue.append(w)
    return None


def _bfs_to_set(g: Graph, source: int, targets: int, allowed: int) -> list[int] | None:
    """Shortest forward path from ``source`` to the nearest node of ``targets``."""
    parent: dict[int, int | None] = {source: None}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if targets >> u & 1:
            out = [u]
            while parent[out[-1]] is not None:
                out.append(parent[out[-1]])  # type: ignore[arg-type]
            return out[::-1]
        for w in g.out_lists[u]:
            if allowed >> w & 1 and w not in parent:
                parent[w] = u
                queue.append(w)
    return None


def _walk_through(g: Graph, chi: MonitorPlacement, u: int, allowed: int, allow_single: bool) -> list[int] | None:
    ins = chi.input_mask & allowed
    outs = chi.output_mask & allowed
    bit = 1 << u
    head = _bfs_path(g, ins, u, allowed)
    tail = _bfs_to_set(g, u, outs, allowed)
    if head is None or tail is None:
        return None
    walk = head + tail[1:]
    if len(walk) >= 2 or allow_single:
        return walk
    # u is both input and output and the shortest walk is the lone node
    head = _bfs_path(g, ins & ~bit, u, allowed)
    if head is not None:
        return head
    tail = _bfs_to_set(g, u, outs & ~bit, allowed)
    if tail is not None:
        return tail
    for w in g.out_lists[u]:
        if allowed >> w & 1:
            back = _bfs_path(g, 1 << w, u, allowed)
            if back is not None:
                return [u] + back
    return None


def cap_minus_separating_path_exists(
    g: Graph,
    chi: MonitorPlacement,
    touch: Iterable[int],
    avoid: Iterable[int],
    allow_single: bool = False,
) -> Separation:
    """Whether a walk with at least one edge runs from an input to an output,
    avoids ``avoid`` and meets ``touch``. The witness is one such walk."""
    touch_mask, avoid_mask = to_mask(touch), to_mask(avoid)
    if touch_mask & avoid_mask:
        raise DomainError("touch and avoid sets overlap")
    chi.validate(g)
    allowed = g.all_mask & ~avoid_mask
    candidates = touch_mask & live_walk_nodes(g, chi, avoid_mask, allow_single)
    for u in iter_bits(candidates):
        walk = _walk_through(g, chi, u, allowed, allow_single)
        if walk is not None:
            return Separation(True, walk)
    return Separation(False, None)


def walk_separates(g: Graph, chi: MonitorPlacement, first: Iterable[int], second: Iterable[int], allow_single: bool = False) -> Separation:
    """Separation of two node sets by walks, tested in both directions."""
    a, b = frozenset(first), frozenset(second)
    if a == b:
        raise DomainError("separation needs two different node sets")
    res = cap_minus_separating_path_exists(g, chi, a - b, b, allow_single)
    if res.separated:
        return res
    return cap_minus_separating_path_exists(g, chi, b - a, a, allow_single)


# ---- signature oracles used by the identifiability search ----

@dataclass(frozen=True)
class FamilyOracle:
    """Signature of a node set = bitset of path node-sets it meets."""

    family: PathFamily

    @property
    def node_count(self) -> int:
        return self.family.node_count

    def signature(self, mask: int) -> int:
        inc = self.family.incidence
        out = 0
        for v in iter_bits(mask):
            out |= inc[v]
        return out

    def covered_mask(self) -> int:
        return to_mask(v for v, s in enumerate(self.family.incidence) if s)


@dataclass(frozen=True)
class WalkOracle:
    """Signature of a node set X = nodes v such that every walk through v
    meets X. Two sets have equal walk sets iff their signatures agree."""

    graph: Graph
    chi: MonitorPlacement
    allow_single: bool = False

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def signature(self, mask: int) -> int:
        return self.graph.all_mask & ~live_walk_nodes(self.graph, self.chi, mask, self.allow_single)

    def covered_mask(self) -> int:
        return live_walk_nodes(self.graph, self.chi, 0, self.allow_single)


def build_oracle(
    g: Graph,
    chi: MonitorPlacement,
    scheme: RoutingScheme,
    path_budget: int = DEFAULT_PATH_BUDGET,
    exclude_starts: Iterable[int] = (),
) -> FamilyOracle | WalkOracle:
    scheme = RoutingScheme.parse(scheme)
    chi.validate(g)
    if scheme is RoutingScheme.CSP:
        return FamilyOracle(csp_path_family(g, chi, path_budget, exclude_starts))
    return WalkOracle(g, chi, scheme is RoutingScheme.CAP)
