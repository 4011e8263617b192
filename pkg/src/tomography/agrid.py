"""Degree boosting by random edge addition, monitor selection, and the
cost/benefit arithmetic used to judge whether the added links pay off."""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Sequence

from .errors import BudgetExceeded, DomainError
from .graph import Edge, Graph, degree_stats
from .identifiability import compute_mu
from .monitors import MonitorPlacement, mdmp
from .routing import DEFAULT_PATH_BUDGET, RoutingScheme


@dataclass(frozen=True)
class AgridResult:
    augmented: Graph
    added_edges: tuple[Edge, ...]
    placement: MonitorPlacement
    seed: int
    d: int


def agrid(g: Graph, d: int, seed: int) -> AgridResult:
    """Visit nodes by ascending id. A node whose current degree is below
    ``d`` gets ``d - deg`` new neighbours drawn uniformly (``random.sample``)
    from the nodes it is not yet adjacent to. Then ``d`` rounds of
    minimal-degree placement pick the monitors."""
    if g.directed:
        raise DomainError("degree boosting expects an undirected graph")
    n = g.node_count
    if not 1 <= d < n:
        raise DomainError(f"need 1 <= d < node_count, got d={d}, n={n}")
    rng = random.Random(seed)
    adj = list(g.out_masks)
    added: list[Edge] = []
    for v in range(n):
        missing = d - adj[v].bit_count()
        if missing <= 0:
            continue
        candidates = [w for w in range(n) if w != v and not adj[v] >> w & 1]
        for w in rng.sample(candidates, missing):
            adj[v] |= 1 << w
            adj[w] |= 1 << v
            added.append((min(v, w), max(v, w)))
    aug = g.with_edges(added)
    return AgridResult(aug, tuple(added), mdmp(aug, d), seed, d)


# ---- cost / benefit ----

@dataclass(frozen=True)
class CostBenefitInput:
    edge_cost: Mapping[Edge, Fraction | int]
    test_cost_base: Mapping[Hashable, Fraction | int]
    test_cost_aug: Mapping[Hashable, Fraction | int]
    horizon: Sequence[Hashable] = field(default_factory=tuple)


def _edge_cost_sum(cbi: CostBenefitInput, added: Sequence[Sequence[int]]) -> Fraction:
    total = Fraction(0)
    for u, v in added:
        key = (min(u, v), max(u, v))
        cost = cbi.edge_cost.get(key, cbi.edge_cost.get((u, v)))
        if cost is None:
            raise DomainError(f"no cost given for edge {key}")
        if cost < 0:
            raise DomainError("costs must be non-negative")
        total += Fraction(cost)
    return total


def _lookup(series: Mapping[Hashable, Fraction | int], t: Hashable, name: str) -> Fraction:
    if t not in series:
        raise DomainError(f"{name} has no entry for time {t!r}")
    return Fraction(series[t])


def kappa_tradeoff(cbi: CostBenefitInput, added: Sequence[Sequence[int]]) -> Fraction:
    """Baseline test cost over the horizon divided by (edge cost plus the
    boosted network's test cost). Values below 1 favour boosting."""
    if not cbi.horizon:
        raise DomainError("empty horizon")
    base = sum((_lookup(cbi.test_cost_base, t, "test_cost_base") for t in cbi.horizon), Fraction(0))
    aug = sum((_lookup(cbi.test_cost_aug, t, "test_cost_aug") for t in cbi.horizon), Fraction(0))
    denom = _edge_cost_sum(cbi, added) + aug
    if denom == 0:
        raise DomainError("zero denominator")
    return base / denom


def beta_step(cbi: CostBenefitInput, t: Hashable, added: Sequence[Sequence[int]]) -> Fraction:
    """Boosted test value at time ``t`` minus the cost of the added edges."""
    return _lookup(cbi.test_cost_aug, t, "test_cost_aug") - _edge_cost_sum(cbi, added)


# ---- dimension rules and campaigns ----

@dataclass(frozen=True)
class DRule:
    """How ``d`` follows from the node count: ``log`` is ceil(log2 n),
    ``sqrtlog`` is ceil(sqrt(log2 n)), ``fixed`` is a constant. With ``bump``
    set, d grows by one whenever it does not exceed the minimum degree."""

    kind: str
    value: int = 0
    bump: bool = False

    @classmethod
    def parse(cls, text: str, bump: bool = False) -> "DRule":
        if text in ("log", "log_n"):
            return cls("log", 0, bump)
        if text in ("sqrtlog", "sqrt_log_n"):
            return cls("sqrtlog", 0, bump)
        if text.startswith("fixed:"):
            try:
                k = int(text.split(":", 1)[1])
            except ValueError:
                raise DomainError(f"bad d rule {text!r}") from None
            if k < 1:
                raise DomainError("fixed d must be positive")
            return cls("fixed", k, bump)
        raise DomainError(f"unknown d rule {text!r}")

    def __call__(self, g: Graph) -> int:
        n = g.node_count
        if self.kind == "log":
            d = math.ceil(math.log2(n))
        elif self.kind == "sqrtlog":
            d = math.ceil(math.sqrt(math.log2(n)))
        else:
            d = self.value
        d = max(d, 1)
        if self.bump and d <= degree_stats(g).delta_min:
            d += 1
        return d


def derive_seed(base: int, *labels: object) -> int:
    """Stable 63-bit seed from a base seed and labels (SHA-256 based)."""
    text = ":".join([str(base)] + [str(x) for x in labels])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


GraphSource = Graph | Callable[[int], Graph]

CAMPAIGN_HEADER = ("run", "n", "d", "mu_g", "mu_ga", "delta_g", "delta_ga", "edges_added", "paths_g", "paths_ga", "seed")


@dataclass(frozen=True)
class CampaignRow:
    run: int
    n: int
    d: int
    mu_g: int
    mu_ga: int
    delta_g: int
    delta_ga: int
    edges_added: int
    paths_g: int | None
    paths_ga: int | None
    seed: int

    def values(self) -> tuple:
        return tuple(getattr(self, name) for name in CAMPAIGN_HEADER)


@dataclass(frozen=True)
class CampaignTable:
    rows: tuple[CampaignRow, ...]
    failures: tuple[tuple[int, int, str], ...]

    def summary(self) -> dict:
        total = len(self.rows)
        if total == 0:
            return {"runs": 0, "greater": None, "equal": None, "less": None, "max_increment": None, "failed": len(self.failures)}
        greater = sum(1 for r in self.rows if r.mu_ga > r.mu_g)
        equal = sum(1 for r in self.rows if r.mu_ga == r.mu_g)
        return {
            "runs": total,
            "greater": Fraction(greater, total),
            "equal": Fraction(equal, total),
            "less": Fraction(total - greater - equal, total),
            "max_increment": max(r.mu_ga - r.mu_g for r in self.rows),
            "failed": len(self.failures),
        }


def agrid_run(
    g: Graph,
    rule: DRule,
    run: int,
    seed: int,
    scheme: RoutingScheme = RoutingScheme.CSP,
    workers: int = 1,
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> tuple[CampaignRow, AgridResult, MonitorPlacement]:
    d = rule(g)
    res = agrid(g, d, seed)
    # same 2d budget and tie-break on the original graph
    base_chi = mdmp(g, d)
    mu_g = compute_mu(g, base_chi, scheme, workers=workers, path_budget=path_budget)
    mu_ga = compute_mu(res.augmented, res.placement, scheme, workers=workers, path_budget=path_budget)
    row = CampaignRow(
        run,
        g.node_count,
        d,
        mu_g.mu,
        mu_ga.mu,
        degree_stats(g).delta_min,
        degree_stats(res.augmented).delta_min,
        len(res.added_edges),
        mu_g.path_count,
        mu_ga.path_count,
        seed,
    )
    return row, res, base_chi


def agrid_campaign(
    source: GraphSource,
    rule: DRule,
    runs: int,
    seed: int,
    scheme: RoutingScheme | str = RoutingScheme.CSP,
    workers: int = 1,
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> CampaignTable:
    """Per run: derive a seed, draw or reuse the graph, boost it and compare
    mu before and after. Runs that fail are recorded and skipped."""
    if runs < 1:
        raise DomainError("runs must be positive")
    scheme = RoutingScheme.parse(scheme)
    rows, failures = [], []
    for run in range(runs):
        run_seed = derive_seed(seed, run)
        try:
            g = source(run_seed) if callable(source) else source
            row, _, _ = agrid_run(g, rule, run, run_seed, scheme, workers, path_budget)
        except (DomainError, BudgetExceeded) as exc:
            failures.append((run, run_seed, str(exc)))
            continue
        rows.append(row)
    return CampaignTable(tuple(rows), tuple(failures))
