"""Maximal identifiability, its truncated variant and structural upper bounds.

The search rests on one observation. Two node sets are indistinguishable
exactly when an oracle assigns them the same signature: the set of path
node-sets they meet (CSP), or the set of nodes whose every walk they block
(walk schemes). At level ``k`` every node set of size ``k`` is hashed by
signature. A collision with any set of size at most ``k`` is a failing pair.
Levels below ``k`` were already collision-free, so the first level with a
collision is ``mu + 1``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, islice
from typing import Iterable, NamedTuple

from .errors import DomainError
from .graph import Graph, degree_stats, from_mask, is_connected, is_line_free, iter_bits, to_mask
from .monitors import MonitorPlacement
from .routing import (
    DEFAULT_PATH_BUDGET,
    FamilyOracle,
    PathIndex,
    RoutingScheme,
    WalkOracle,
    build_oracle,
)

Oracle = FamilyOracle | WalkOracle

# below this many sets per level the pool costs more than it saves
_PARALLEL_THRESHOLD = 4096


@dataclass(frozen=True)
class IdentReport:
    mu: int
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    scheme: RoutingScheme
    pairs_examined: int
    alpha: int | None = None
    lower_bound_only: bool = False
    path_count: int | None = None

    def to_json(self) -> dict:
        return {
            "mu": self.mu,
            "witness": None if self.witness is None else {"U": list(self.witness[0]), "W": list(self.witness[1])},
            "scheme": self.scheme.value,
            "alpha": self.alpha,
            "pairs_examined": self.pairs_examined,
        }


@dataclass(frozen=True)
class BoundsReport:
    monitor_bound: int
    degree_bound: int | None
    edge_bound: int | None
    line_free: bool
    connected: bool
    complex_sources: tuple[int, ...] = ()
    simple_sources: tuple[int, ...] = ()
    rest: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "monitor_bound": self.monitor_bound,
            "degree_bound": self.degree_bound,
            "edge_bound": self.edge_bound,
            "line_free": self.line_free,
            "connected": self.connected,
            "complex_sources": list(self.complex_sources),
            "simple_sources": list(self.simple_sources),
        }


def bounds_report(g: Graph, chi: MonitorPlacement) -> BoundsReport:
    """Upper bounds on mu.

    ``monitor_bound`` (CSP only): mu <= max(#inputs, #outputs) - 1.
    ``degree_bound``: minimum degree when undirected. When directed, the
    minimum of in-degree over non-input nodes and of in+out degree over
    inputs that have an in-neighbour. Inputs without in-neighbours are
    skipped. ``edge_bound`` (undirected): min(n, ceil(2m/n)).
    """
    chi.validate(g)
    n = g.node_count
    monitor_bound = max(len(chi.inputs), len(chi.outputs)) - 1
    line_free = is_line_free(g)
    connected = is_connected(g)
    if not g.directed:
        degree_bound = degree_stats(g).delta_min
        edge_bound = min(n, -(-2 * g.edge_count // n))
        return BoundsReport(monitor_bound, degree_bound, edge_bound, line_free, connected)
    ins = set(chi.inputs)
    indeg = [m.bit_count() for m in g.in_masks]
    outdeg = [m.bit_count() for m in g.out_masks]
    complex_ = tuple(v for v in range(n) if v in ins and indeg[v] > 0)
    simple = tuple(v for v in range(n) if v in ins and indeg[v] == 0)
    rest = tuple(v for v in range(n) if v not in ins)
    candidates = [indeg[v] for v in rest] + [indeg[v] + outdeg[v] for v in complex_]
    degree_bound = min(candidates) if candidates else None
    return BoundsReport(monitor_bound, degree_bound, None, line_free, connected, complex_, simple, rest)


# ---- search ----

_WORKER_ORACLE: Oracle | None = None


def _init_worker(oracle: Oracle) -> None:
    global _WORKER_ORACLE
    _WORKER_ORACLE = oracle


def _chunk_signatures(n: int, k: int, start: int, stop: int) -> list[int]:
    oracle = _WORKER_ORACLE
    assert oracle is not None
    return [oracle.signature(to_mask(c)) for c in islice(combinations(range(n), k), start, stop)]


def _level_signatures(oracle: Oracle, n: int, k: int, pool: ProcessPoolExecutor | None, workers: int) -> list[int]:
    total = math.comb(n, k)
    if pool is None or total < _PARALLEL_THRESHOLD:
        return [oracle.signature(to_mask(c)) for c in combinations(range(n), k)]
    chunks = workers * 4
    bounds = [total * i // chunks for i in range(chunks + 1)]
    futures = [pool.submit(_chunk_signatures, n, k, bounds[i], bounds[i + 1]) for i in range(chunks)]
    out: list[int] = []
    for fut in futures:
        out.extend(fut.result())
    return out


class _SearchResult(NamedTuple):
    level: int
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None


def _search(oracle: Oracle, limit: int, workers: int) -> _SearchResult:
    """Ascend levels 1..limit. Return the first level holding a collision,
    with its lexicographically smallest pair (U < W as sorted tuples), or
    the last level searched and no witness."""
    n = oracle.node_count
    seen: dict[int, tuple[int, ...]] = {oracle.signature(0): ()}
    pool = None
    if workers > 1 and limit >= 1:
        pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(oracle,))
    try:
        for k in range(1, limit + 1):
            sigs = _level_signatures(oracle, n, k, pool, workers)
            # first two sets of this level per signature; combinations arrive in order
            groups: dict[int, list[tuple[int, ...]]] = {}
            for combo, sig in zip(combinations(range(n), k), sigs):
                grp = groups.setdefault(sig, [])
                if len(grp) < 2:
                    grp.append(combo)
            best = None
            for sig, grp in groups.items():
                earlier = seen.get(sig)
                cands = sorted(grp + [earlier]) if earlier is not None else grp
                if len(cands) >= 2:
                    pair = (cands[0], cands[1])
                    if best is None or pair < best:
                        best = pair
            if best is not None:
                return _SearchResult(k, best)
            for sig, grp in groups.items():
                seen[sig] = grp[0]
        return _SearchResult(limit, None)
    finally:
        if pool is not None:
            pool.shutdown()


def _pairs_up_to(n: int, k: int) -> int:
    sets = sum(math.comb(n, i) for i in range(k + 1))
    return sets * (sets - 1) // 2


def _resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return workers


def compute_mu_with_oracle(
    oracle: Oracle,
    scheme: RoutingScheme,
    k_cap: int | None = None,
    alpha: int | None = None,
    workers: int = 1,
    path_count: int | None = None,
) -> IdentReport:
    n = oracle.node_count
    if n == 0:
        raise DomainError("identifiability of an empty graph")
    if alpha is not None and alpha < 1:
        raise DomainError("alpha must be at least 1")
    if k_cap is not None and k_cap < 0:
        raise DomainError("k_cap must be non-negative")
    limit = min(n, alpha if alpha is not None else n, k_cap if k_cap is not None else n)
    level, witness = _search(oracle, limit, _resolve_workers(workers))
    if witness is not None:
        mu, lower = level - 1, False
    elif limit == n or (alpha is not None and alpha <= limit):
        # every pair the definition looks at is separated
        mu = n if k_cap is None else min(n, k_cap)
        lower = mu < n
    else:
        mu, lower = limit, True
    return IdentReport(mu, witness, scheme, _pairs_up_to(n, level), alpha, lower, path_count)


def compute_mu(
    g: Graph,
    chi: MonitorPlacement,
    scheme: RoutingScheme | str = RoutingScheme.CSP,
    k_cap: int | None = None,
    *,
    workers: int = 1,
    path_budget: int = DEFAULT_PATH_BUDGET,
    exclude_starts: Iterable[int] = (),
) -> IdentReport:
    """Largest k such that any two distinct node sets of size at most k
    (the empty set included) are met by different measurement paths."""
    scheme = RoutingScheme.parse(scheme)
    exclude_starts = tuple(exclude_starts)
    oracle = build_oracle(g, chi, scheme, path_budget, exclude_starts)
    count = oracle.family.path_count if isinstance(oracle, FamilyOracle) else None
    report = compute_mu_with_oracle(oracle, scheme, k_cap, None, workers, count)
    if scheme is not RoutingScheme.CAP and not report.lower_bound_only:
        bound = bounds_report(g, chi).degree_bound
        if bound is not None and report.mu > bound and not exclude_starts:
            raise RuntimeError(f"mu={report.mu} exceeds the degree bound {bound}")
    return report


def compute_mu_truncated(
    g: Graph,
    chi: MonitorPlacement,
    scheme: RoutingScheme | str,
    alpha: int,
    *,
    workers: int = 1,
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> IdentReport:
    """Same search, but only pairs whose sets both have size at most alpha."""
    scheme = RoutingScheme.parse(scheme)
    oracle = build_oracle(g, chi, scheme, path_budget)
    count = oracle.family.path_count if isinstance(oracle, FamilyOracle) else None
    return compute_mu_with_oracle(oracle, scheme, None, alpha, workers, count)


def verify_witness(oracle: Oracle, witness: tuple[Iterable[int], Iterable[int]]) -> bool:
    u, w = (to_mask(s) for s in witness)
    return u != w and oracle.signature(u) == oracle.signature(w)


# ---- truncation error bound ----

def _zeta(n: int, i: int, j: int) -> int:
    return math.comb(n, i) * (math.comb(n, j) - 1)


def error_fraction_bound(n: int, delta: int, lam: int) -> Fraction:
    """Share of size-pairs a truncated search at alpha=lam can miss, given
    minimum degree delta, weighted by zeta(i,j) = C(n,i)(C(n,j)-1)."""
    if not 1 <= delta <= lam <= n:
        raise DomainError("need 1 <= delta <= lambda <= n")
    missed = sum(_zeta(n, i, j) for i in range(1, delta + 1) for j in range(lam + 1, n + 1))
    tri = sum(_zeta(n, i, j) for i in range(1, delta + 1) for j in range(i, delta + 1))
    strip = sum(_zeta(n, i, j) for i in range(1, delta + 1) for j in range(delta, n + 1))
    if tri + strip == 0:
        raise DomainError(f"no pairs to weigh for n={n}")
    return Fraction(missed, tri + strip)


# ---- measurements ----

def simulate_measurement(idx: PathIndex, failures: Iterable[int]) -> tuple[int, ...]:
    """Bit p is 1 iff path p contains a failed node."""
    hit = idx.union_mask(set(failures))
    return tuple(hit >> p & 1 for p in range(idx.path_count))


def walk_measurement(oracle: Oracle, failures: Iterable[int]) -> int:
    """Outcome of a failure set under an oracle, as a comparable signature."""
    return oracle.signature(to_mask(failures))


class FailureSets(NamedTuple):
    sets: list[tuple[int, ...]]
    unconstrained: tuple[int, ...]


def consistent_failure_sets(
    source: PathIndex | Oracle,
    b: tuple[int, ...] | int,
    size_cap: int,
) -> FailureSets:
    """Every failure set of at most ``size_cap`` path-covered nodes that
    reproduces ``b``. Nodes on no path are reported separately."""
    if isinstance(source, PathIndex):
        if not isinstance(b, tuple) or len(b) != source.path_count:
            raise DomainError("measurement length must equal the path count")
        target = sum(bit << p for p, bit in enumerate(b))
        covered = source.covered_mask()

        def sig(mask: int) -> int:
            return source.union_mask(iter_bits(mask))
    else:
        target = int(b)
        covered = source.covered_mask()
        sig = source.signature
    nodes = from_mask(covered)
    free = tuple(v for v in range(source.node_count) if not covered >> v & 1)
    found = []
    for size in range(0, min(size_cap, len(nodes)) + 1):
        for combo in combinations(nodes, size):
            if sig(to_mask(combo)) == target:
                found.append(combo)
    return FailureSets(sorted(found), free)
