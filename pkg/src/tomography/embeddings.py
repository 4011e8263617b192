"""DAGs viewed as posets: closure, order embeddings, distance classes,
routing consistency and graph powers."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .errors import CapacityError, DomainError
from .graph import Graph, is_acyclic, iter_bits, reach_mask
from .monitors import MonitorPlacement
from .routing import PathIndex
from .topology import gen_hypergrid

EMBEDDING_CEILING = 10

REQUIREMENTS = ("any", "distance_increasing", "distance_preserving", "bijective")


@dataclass(frozen=True)
class NodeMap:
    """Injective node map from one graph into another."""

    mapping: tuple[tuple[int, int], ...]
    codomain_size: int

    def __post_init__(self) -> None:
        images = [b for _, b in self.mapping]
        if len(set(images)) != len(images):
            raise DomainError("node map is not injective")
        if len({a for a, _ in self.mapping}) != len(self.mapping):
            raise DomainError("node map assigns a node twice")

    @classmethod
    def of(cls, mapping: Mapping[int, int], codomain_size: int) -> "NodeMap":
        return cls(tuple(sorted(mapping.items())), codomain_size)

    @property
    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)

    @property
    def bijective(self) -> bool:
        return len(self.mapping) == self.codomain_size

    def __call__(self, u: int) -> int:
        return self.as_dict[u]

    def inverse(self) -> dict[int, int]:
        return {b: a for a, b in self.mapping}

    def to_json(self) -> list[list[int]]:
        return [[a, b] for a, b in self.mapping]


def _require_dag(g: Graph) -> None:
    if not g.directed or not is_acyclic(g):
        raise DomainError("expected a directed acyclic graph")


def reachability(g: Graph) -> tuple[int, ...]:
    """Per node, the bitset of nodes reachable from it (itself included)."""
    return tuple(reach_mask(g, 1 << u, g.all_mask) for u in range(g.node_count))


def transitive_closure(g: Graph) -> Graph:
    _require_dag(g)
    reach = reachability(g)
    edges = [(u, v) for u in range(g.node_count) for v in iter_bits(reach[u]) if v != u]
    return Graph.build(g.node_count, edges, True, g.labels)


def distances(g: Graph) -> list[list[int | None]]:
    """All-pairs hop distances by BFS; ``None`` when unreachable."""
    n = g.node_count
    out: list[list[int | None]] = []
    for s in range(n):
        dist: list[int | None] = [None] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.out_lists[u]:
                if dist[w] is None:
                    dist[w] = dist[u] + 1  # type: ignore[operator]
                    queue.append(w)
        out.append(dist)
    return out


def _check_total(f: NodeMap, g: Graph, h: Graph) -> dict[int, int]:
    m = f.as_dict
    if set(m) != set(range(g.node_count)):
        raise DomainError("node map must be defined on every node")
    if any(not 0 <= b < h.node_count for b in m.values()):
        raise DomainError("node map leaves the target graph")
    return m


def is_order_embedding(f: NodeMap, g: Graph, h: Graph) -> bool:
    """u reaches v in g exactly when f(u) reaches f(v) in h."""
    _require_dag(g)
    _require_dag(h)
    m = _check_total(f, g, h)
    rg, rh = reachability(g), reachability(h)
    return all(
        bool(rg[u] >> v & 1) == bool(rh[m[u]] >> m[v] & 1) for u in range(g.node_count) for v in range(g.node_count)
    )


class EmbeddingClass(NamedTuple):
    distance_increasing: bool
    distance_preserving: bool


def classify_embedding(f: NodeMap, g: Graph, h: Graph) -> EmbeddingClass:
    """Compare hop distances over comparable pairs. Incomparable pairs are
    skipped since their distance is infinite on both sides."""
    m = _check_total(f, g, h)
    dg, dh = distances(g), distances(h)
    inc = pres = True
    for u in range(g.node_count):
        for v in range(g.node_count):
            a = dg[u][v]
            if u == v or a is None:
                continue
            b = dh[m[u]][m[v]]
            if b is None or a > b:
                inc = pres = False
            elif a != b:
                pres = False
    return EmbeddingClass(inc, pres)


def find_embedding(g: Graph, h: Graph, require: str = "any", ceiling: int = EMBEDDING_CEILING) -> NodeMap | None:
    """First embedding in lexicographic order of the image tuple, by
    backtracking over injective maps with order-consistency pruning."""
    if require not in REQUIREMENTS:
        raise DomainError(f"unknown requirement {require!r}")
    _require_dag(g)
    _require_dag(h)
    n, k = g.node_count, h.node_count
    if k > ceiling:
        raise CapacityError(f"target has {k} nodes, above the ceiling of {ceiling}")
    if n > k or (require == "bijective" and n != k):
        return None
    rg, rh = reachability(g), reachability(h)
    need_dist = require in ("distance_increasing", "distance_preserving")
    dg = distances(g) if need_dist else None
    dh = distances(h) if need_dist else None
    image: list[int] = []
    used = [False] * k

    def fits(u: int, x: int) -> bool:
        for v, y in enumerate(image):
            if bool(rg[u] >> v & 1) != bool(rh[x] >> y & 1) or bool(rg[v] >> u & 1) != bool(rh[y] >> x & 1):
                return False
            if need_dist:
                for a, b in ((dg[u][v], dh[x][y]), (dg[v][u], dh[y][x])):  # type: ignore[index]
                    if a is None:
                        continue
                    if b is None or a > b or (require == "distance_preserving" and a != b):
                        return False
        return True

    def extend(u: int) -> bool:
        if u == n:
            return True
        for x in range(k):
            if not used[x] and fits(u, x):
                image.append(x)
                used[x] = True
                if extend(u + 1):
                    return True
                image.pop()
                used[x] = False
        return False

    if not extend(0):
        return None
    return NodeMap(tuple(enumerate(image)), k)


def hypergrid_dimension_lower_bound(g: Graph, n: int, d_max: int, ceiling: int = EMBEDDING_CEILING) -> int | None:
    """Smallest d <= d_max such that g embeds into the directed H_{n,d}."""
    for d in range(1, d_max + 1):
        grid, _ = gen_hypergrid(n, d, True)
        if g.node_count > grid.node_count:
            continue
        if find_embedding(g, grid, "any", ceiling) is not None:
            return d
    return None


def _segment(path: tuple[int, ...], pos: dict[int, int], u: int, w: int) -> tuple[int, ...]:
    i, j = pos[u], pos[w]
    return path[i : j + 1] if i <= j else path[j : i + 1][::-1]


def is_routing_consistent(idx: PathIndex) -> bool:
    """Whenever two paths both visit u and w they agree on the stretch
    between them."""
    positions = [{v: i for i, v in enumerate(p)} for p in idx.paths]
    for a in range(idx.path_count):
        pa, posa = idx.paths[a], positions[a]
        for b in range(a + 1, idx.path_count):
            pb, posb = idx.paths[b], positions[b]
            shared = sorted(set(posa) & set(posb))
            for i, u in enumerate(shared):
                for w in shared[i + 1 :]:
                    if _segment(pa, posa, u, w) != _segment(pb, posb, u, w):
                        return False
    return True


def graph_power(g: Graph, k: int) -> Graph:
    """Edge (u, v) whenever v is 1..k hops from u."""
    if k < 1:
        raise DomainError("power must be at least 1")
    dist = distances(g)
    edges = [(u, v) for u in range(g.node_count) for v, d in enumerate(dist[u]) if d is not None and 1 <= d <= k]
    return Graph.build(g.node_count, edges, g.directed, g.labels)


def push_forward_placement(f: NodeMap, chi: MonitorPlacement) -> MonitorPlacement:
    m = f.as_dict
    try:
        return MonitorPlacement.of((m[v] for v in chi.inputs), (m[v] for v in chi.outputs))
    except KeyError as exc:
        raise DomainError(f"node map undefined on monitor {exc.args[0]}") from None


def relabel(g: Graph, perm: Iterable[int]) -> Graph:
    """Image of ``g`` under the bijection ``u -> perm[u]``."""
    p = list(perm)
    if sorted(p) != list(range(g.node_count)):
        raise DomainError("not a permutation")
    return Graph.build(g.node_count, ((p[u], p[v]) for u, v in g.edges), g.directed)
