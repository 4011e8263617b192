"""Immutable graphs over dense integer node ids.

Node sets are frequently handled as Python ints used as bitsets (bit ``v``
set means node ``v`` is present). The helpers at the bottom of this module
convert between the two representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """A simple graph, directed or undirected, on nodes ``0..node_count-1``.

    Undirected edges are stored as ``(min, max)``. Self-loops and duplicate
    edges are rejected; use :meth:`build` to normalise raw edge lists.
    """

    node_count: int
    directed: bool
    edges: frozenset[Edge]
    labels: tuple[str, ...] | None = field(default=None, compare=True)

    def __post_init__(self) -> None:
        if self.node_count < 0:
            raise DomainError("node_count must be non-negative")
        for u, v in self.edges:
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise DomainError(f"edge ({u},{v}) has an endpoint out of range")
            if u == v:
                raise DomainError(f"self-loop at node {u}")
            if not self.directed and u > v:
                raise DomainError(f"undirected edge ({u},{v}) is not normalised")
        if self.labels is not None and len(self.labels) != self.node_count:
            raise DomainError("labels must have one entry per node")

    @classmethod
    def build(
        cls,
        node_count: int,
        edges: Iterable[Sequence[int]],
        directed: bool = False,
        labels: Sequence[str] | None = None,
    ) -> "Graph":
        """Normalise ``edges`` (dropping duplicates) and construct a graph."""
        norm: set[Edge] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not directed and u > v:
                u, v = v, u
            norm.add((u, v))
        return cls(node_count, directed, frozenset(norm), tuple(labels) if labels is not None else None)

    # ---- adjacency ----

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        masks = [0] * self.node_count
        for u, v in self.edges:
            masks[u] |= 1 << v
            if not self.directed:
                masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        if not self.directed:
            return self.out_masks
        masks = [0] * self.node_count
        for u, v in self.edges:
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def out_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(iter_bits(m)) for m in self.out_masks)

    @cached_property
    def in_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(iter_bits(m)) for m in self.in_masks)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def all_mask(self) -> int:
        return (1 << self.node_count) - 1

    def degree(self, u: int) -> int:
        """Undirected degree, or in-degree plus out-degree for directed graphs."""
        if self.directed:
            return self.out_masks[u].bit_count() + self.in_masks[u].bit_count()
        return self.out_masks[u].bit_count()

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def with_edges(self, extra: Iterable[Sequence[int]]) -> "Graph":
        """Return a new graph with ``extra`` edges added."""
        return Graph.build(self.node_count, list(self.edges) + [tuple(e) for e in extra], self.directed, self.labels)

    def label(self, u: int) -> str:
        return self.labels[u] if self.labels is not None else str(u)


@dataclass(frozen=True)
class DegreeStats:
    delta_min: int
    delta_max: int
    average_degree: Fraction
    delta_in_min: int | None = None
    delta_in_max: int | None = None
    delta_out_min: int | None = None
    delta_out_max: int | None = None


def _check_node(g: Graph, u: int) -> None:
    if not (isinstance(u, int) and 0 <= u < g.node_count):
        raise DomainError(f"invalid node id {u!r}")


def neighbors(g: Graph, u: int, direction: str = "undirected") -> set[int]:
    """N(u), or the in/out neighbourhood for directed graphs."""
    _check_node(g, u)
    if direction == "undirected":
        if g.directed:
            return set(iter_bits(g.out_masks[u] | g.in_masks[u]))
        return set(iter_bits(g.out_masks[u]))
    if direction not in ("in", "out"):
        raise DomainError(f"unknown direction {direction!r}")
    if not g.directed:
        raise DomainError("in/out neighbourhoods need a directed graph")
    return set(iter_bits(g.out_masks[u] if direction == "out" else g.in_masks[u]))


def degree_stats(g: Graph) -> DegreeStats:
    if g.node_count == 0:
        raise DomainError("degree statistics of an empty graph")
    degs = [g.degree(u) for u in range(g.node_count)]
    avg = Fraction(sum(degs), g.node_count)
    if not g.directed:
        return DegreeStats(min(degs), max(degs), avg)
    ins = [m.bit_count() for m in g.in_masks]
    outs = [m.bit_count() for m in g.out_masks]
    return DegreeStats(min(degs), max(degs), avg, min(ins), max(ins), min(outs), max(outs))


def reach_mask(g: Graph, start: int, allowed: int, forward: bool = True) -> int:
    """Bitset of nodes reachable from the bitset ``start`` inside ``allowed``."""
    adj = g.out_masks if forward else g.in_masks
    seen = start & allowed
    frontier = seen
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= adj[low.bit_length() - 1]
            frontier ^= low
        frontier = nxt & allowed & ~seen
        seen |= frontier
    return seen


def reachable_set(g: Graph, u: int, forbidden: Iterable[int] = (), direction: str = "forward") -> set[int]:
    """Nodes reachable from ``u`` (or reaching ``u``) once ``forbidden`` is deleted."""
    _check_node(g, u)
    forb = to_mask(forbidden)
    if forb >> u & 1:
        raise DomainError("start node is forbidden")
    if direction not in ("forward", "backward"):
        raise DomainError(f"unknown direction {direction!r}")
    return set(iter_bits(reach_mask(g, 1 << u, g.all_mask & ~forb, direction == "forward")))


def is_line_free(g: Graph) -> bool:
    """True iff every node has at least two distinct neighbours."""
    return all((g.out_masks[u] | g.in_masks[u]).bit_count() >= 2 for u in range(g.node_count))


def is_connected(g: Graph) -> bool:
    """Connectivity, weak connectivity for directed graphs."""
    if g.node_count <= 1:
        return True
    und = [g.out_masks[u] | g.in_masks[u] for u in range(g.node_count)]
    seen = frontier = 1
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= und[v]
        frontier = nxt & ~seen
        seen |= frontier
    return seen == g.all_mask


def is_acyclic(g: Graph) -> bool:
    return topological_order(g) is not None


def topological_order(g: Graph) -> list[int] | None:
    """Kahn's order (smallest id first), or None when ``g`` has a directed cycle."""
    if not g.directed:
        raise DomainError("topological order needs a directed graph")
    import heapq

    indeg = [m.bit_count() for m in g.in_masks]
    heap = [u for u in range(g.node_count) if indeg[u] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in g.out_lists[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    return order if len(order) == g.node_count else None


# ---- bitset helpers ----

def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(nodes: Iterable[int]) -> int:
    mask = 0
    for v in nodes:
        mask |= 1 << v
    return mask


def from_mask(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))
