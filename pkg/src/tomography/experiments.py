"""Campaign drivers for random monitor placements and truncated searches.
Boosting campaigns live in :mod:`tomography.agrid`."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .agrid import DRule, GraphSource, agrid, derive_seed
from .errors import BudgetExceeded, DomainError
from .graph import Graph, degree_stats
from .identifiability import compute_mu, compute_mu_truncated
from .monitors import mdmp, random_placement
from .routing import DEFAULT_PATH_BUDGET, RoutingScheme

RANDOM_HEADER = ("run", "graph", "n", "k_in", "k_out", "mu", "paths", "seed")
TRUNCATED_HEADER = ("run", "graph", "n", "d", "alpha", "mu_alpha", "seed")


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    rows: tuple[tuple, ...]
    failures: tuple[tuple[int, int, str], ...] = ()

    def to_csv(self) -> str:
        return write_csv(self.header, self.rows)


def write_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def rounded_average_degree(g: Graph) -> int:
    """Average degree rounded half up, at least 1."""
    return max(1, math.floor(degree_stats(g).average_degree + Fraction(1, 2)))


def random_monitor_campaign(
    source: GraphSource,
    rule: DRule,
    runs: int,
    seed: int,
    scheme: RoutingScheme | str = RoutingScheme.CSP,
    boost: bool = False,
    workers: int = 1,
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> Table:
    """``runs`` random placements of d inputs and d outputs on G and, with
    ``boost``, on the boosted graph of the same run."""
    if runs < 1:
        raise DomainError("runs must be positive")
    scheme = RoutingScheme.parse(scheme)
    rows, failures = [], []
    for run in range(runs):
        run_seed = derive_seed(seed, run)
        try:
            g = source(run_seed) if callable(source) else source
            d = rule(g)
            graphs = [("G", g)]
            if boost:
                graphs.append(("GA", agrid(g, d, run_seed).augmented))
            for name, h in graphs:
                chi = random_placement(h, d, d, derive_seed(run_seed, name))
                rep = compute_mu(h, chi, scheme, workers=workers, path_budget=path_budget)
                rows.append((run, name, h.node_count, d, d, rep.mu, rep.path_count, run_seed))
        except (DomainError, BudgetExceeded) as exc:
            failures.append((run, run_seed, str(exc)))
    return Table(RANDOM_HEADER, tuple(rows), tuple(failures))


def truncated_campaign(
    source: GraphSource,
    rule: DRule,
    runs: int,
    seed: int,
    scheme: RoutingScheme | str = RoutingScheme.CSP,
    alpha: int | None = None,
    workers: int = 1,
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> Table:
    """Truncated mu on G and on a fresh boosted graph per run, both with
    minimal-degree placements. ``alpha`` defaults to each graph's rounded
    average degree."""
    if runs < 1:
        raise DomainError("runs must be positive")
    scheme = RoutingScheme.parse(scheme)
    rows, failures = [], []
    for run in range(runs):
        run_seed = derive_seed(seed, run)
        try:
            g = source(run_seed) if callable(source) else source
            d = rule(g)
            res = agrid(g, d, run_seed)
            for name, h, chi in (("G", g, mdmp(g, d)), ("GA", res.augmented, res.placement)):
                a = alpha if alpha is not None else rounded_average_degree(h)
                rep = compute_mu_truncated(h, chi, scheme, a, workers=workers, path_budget=path_budget)
                rows.append((run, name, h.node_count, d, a, rep.mu, run_seed))
        except (DomainError, BudgetExceeded) as exc:
            failures.append((run, run_seed, str(exc)))
    return Table(TRUNCATED_HEADER, tuple(rows), tuple(failures))


def truncated_histogram(table: Table) -> Table:
    """Share of runs per (graph, alpha, mu_alpha), as exact percentages."""
    counts: Counter = Counter()
    totals: Counter = Counter()
    for run, name, n, d, a, mu, s in table.rows:
        counts[(name, a, mu)] += 1
        totals[(name, a)] += 1
    rows = tuple(
        (name, a, mu, str(Fraction(100 * c, totals[(name, a)])))
        for (name, a, mu), c in sorted(counts.items())
    )
    return Table(("graph", "alpha", "mu_alpha", "percent"), rows)
