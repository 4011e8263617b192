"""Topology generators: hypergrids, trees and Erdős–Rényi graphs.

Hypergrid coordinates are 1-based tuples. A coordinate ``x`` maps to the id
``sum((x[i] - 1) * n**i)``, so the first coordinate varies fastest.

Randomised generators use :class:`random.Random` (MT19937) seeded with the
caller's integer seed and consume draws in a fixed documented order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Mapping

from .errors import CapacityError, DomainError
from .graph import Graph

MAX_NODES = 1 << 20

ORIENTATIONS = ("downward", "upward", "undirected")


@dataclass(frozen=True)
class Hypergrid:
    n: int
    d: int

    @property
    def size(self) -> int:
        return self.n**self.d

    def node(self, coords: tuple[int, ...]) -> int:
        if len(coords) != self.d or any(not 1 <= c <= self.n for c in coords):
            raise DomainError(f"coordinate {coords} outside [{self.n}]^{self.d}")
        return sum((c - 1) * self.n**i for i, c in enumerate(coords))

    def coords(self, node: int) -> tuple[int, ...]:
        if not 0 <= node < self.size:
            raise DomainError(f"node {node} outside the grid")
        out = []
        for _ in range(self.d):
            node, r = divmod(node, self.n)
            out.append(r + 1)
        return tuple(out)

    def nodes(self, coords_list) -> list[int]:
        return [self.node(tuple(c)) for c in coords_list]


def gen_hypergrid(n: int, d: int, directed: bool) -> tuple[Graph, Hypergrid]:
    if n < 3 or d < 1:
        raise DomainError("hypergrids need n >= 3 and d >= 1")
    if n**d > MAX_NODES:
        raise CapacityError(f"H_{{{n},{d}}} has too many nodes")
    grid = Hypergrid(n, d)
    edges = []
    for u in range(grid.size):
        x = grid.coords(u)
        for i in range(d):
            if x[i] < n:
                edges.append((u, u + n**i))
    labels = [",".join(map(str, grid.coords(u))) for u in range(grid.size)]
    return Graph.build(grid.size, edges, directed, labels), grid


def border_nodes(n: int, d: int, i: int) -> set[int]:
    """Nodes whose ``i``-th coordinate (1-based) equals 1."""
    if not 1 <= i <= d:
        raise DomainError(f"dimension index {i} not in 1..{d}")
    grid = Hypergrid(n, d)
    return {u for u in range(grid.size) if grid.coords(u)[i - 1] == 1}


# ---- trees ----

@dataclass(frozen=True)
class TreeSpec:
    """Rooted tree as a parent list (``None`` marks the root) plus orientation."""

    parent: tuple[int | None, ...]
    orientation: str = "downward"

    def __post_init__(self) -> None:
        if self.orientation not in ORIENTATIONS:
            raise DomainError(f"unknown orientation {self.orientation!r}")

    @classmethod
    def from_mapping(cls, parent: Mapping[int, int | None], orientation: str = "downward") -> "TreeSpec":
        n = len(parent)
        return cls(tuple(parent[v] for v in range(n)), orientation)


def complete_binary_tree(depth: int, orientation: str = "downward") -> TreeSpec:
    """Heap-numbered complete binary tree with ``2**(depth+1) - 1`` nodes."""
    if depth < 0:
        raise DomainError("depth must be non-negative")
    size = 2 ** (depth + 1) - 1
    return TreeSpec(tuple(None if v == 0 else (v - 1) // 2 for v in range(size)), orientation)


def random_tree(n: int, seed: int, orientation: str = "undirected") -> TreeSpec:
    """Random recursive tree: node ``v`` attaches to a uniform earlier node."""
    if n < 1:
        raise DomainError("a tree needs at least one node")
    rng = random.Random(seed)
    return TreeSpec(tuple(None if v == 0 else rng.randrange(v) for v in range(n)), orientation)


def gen_tree(spec: TreeSpec) -> Graph:
    n = len(spec.parent)
    roots = [v for v, p in enumerate(spec.parent) if p is None]
    if len(roots) != 1:
        raise DomainError("parent map must have exactly one root")
    for v, p in enumerate(spec.parent):
        if p is not None and not 0 <= p < n:
            raise DomainError(f"parent of {v} out of range")
    # every node must reach the root without revisiting
    for v in range(n):
        seen = set()
        u: int | None = v
        while u is not None:
            if u in seen:
                raise DomainError("parent map contains a cycle")
            seen.add(u)
            u = spec.parent[u]
    edges = []
    for v, p in enumerate(spec.parent):
        if p is None:
            continue
        edges.append((v, p) if spec.orientation == "upward" else (p, v))
    return Graph.build(n, edges, spec.orientation != "undirected")


# ---- random graphs ----

def gen_erdos_renyi(n: int, p: float, seed: int, directed: bool = False, acyclic: bool = False) -> Graph:
    """G(n, p). Candidate pairs are drawn in lexicographic order, one
    ``random()`` per pair. ``acyclic`` keeps only pairs ``u < v`` (a DAG)."""
    if not 0.0 <= p <= 1.0:
        raise DomainError("p must lie in [0, 1]")
    if n < 0:
        raise DomainError("n must be non-negative")
    rng = random.Random(seed)
    if directed and not acyclic:
        pairs = [(u, v) for u, v in product(range(n), repeat=2) if u != v]
    else:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = [e for e in pairs if rng.random() < p]
    return Graph.build(n, edges, directed or acyclic)
