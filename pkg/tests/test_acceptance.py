"""Acceptance suite. Each test checks one numbered criterion and records a
PASS/FAIL line that pytest prints in its terminal summary.

Tolerances are pinned as module constants. Instances are built by cached
functions so that the cross-cutting criteria (10, 12, 13) revisit exactly
the graphs and placements of the earlier ones.
"""

from __future__ import annotations

import json
import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from functools import lru_cache

import networkx as nx
from acceptance_log import dump, graph_json, verdict
from oracles import brute_error_fraction, to_nx
from tomography.agrid import DRule, agrid, agrid_campaign, agrid_run, derive_seed
from tomography.embeddings import (
    classify_embedding,
    find_embedding,
    graph_power,
    is_routing_consistent,
    push_forward_placement,
    relabel,
    transitive_closure,
)
from tomography.graph import Graph, degree_stats, is_connected
from tomography.graphml import load_fixture
from tomography.identifiability import (
    compute_mu,
    compute_mu_truncated,
    consistent_failure_sets,
    error_fraction_bound,
    simulate_measurement,
    walk_measurement,
)
from tomography.monitors import MonitorPlacement, chi_grid, chi_tree, is_monitor_balanced, mdmp, random_placement
from tomography.routing import RoutingScheme, WalkOracle, csp_separates, enumerate_csp_paths
from tomography.topology import Hypergrid, complete_binary_tree, gen_erdos_renyi, gen_hypergrid, gen_tree, random_tree

CSP, CAP_MINUS = RoutingScheme.CSP, RoutingScheme.CAP_MINUS

GRID_SECONDS = 10.0
HYPERGRID_SECONDS = 60.0
UNDIRECTED_GRID_SECONDS = 300.0
BALANCED_TREES = 20
MAX_TREE_NODES = 12
RANDOM_PLACEMENTS = 20
ER_GRAPHS = 100
ER_MAX_NODES = 10
AGRID_RUNS = 50
ER8_DENSITY = 0.3
EUNET_SEEDS = 20
EUNET_D = 3
EUNET_BOOSTED_SHARE = Fraction(9, 10)
EMBEDDING_PAIRS = 200
EMBEDDING_MAX_NODES = 7
FAILURE_SETS = 50
ERROR_FRACTION_MAX_N = 8
SEED = 20240611


class Instance:
    """A graph, a placement, a scheme and its exact mu."""

    def __init__(self, label: str, g: Graph, chi: MonitorPlacement, scheme: RoutingScheme, mu: int):
        self.label, self.g, self.chi, self.scheme, self.mu = label, g, chi, scheme, mu

    def case(self) -> dict:
        return {"label": self.label, "graph": graph_json(self.g), "placement": self.chi.to_json(),
                "scheme": self.scheme.value, "mu": self.mu}


def instance(label, g, chi, scheme) -> Instance:
    return Instance(label, g, chi, scheme, compute_mu(g, chi, scheme).mu)


# ---- instance builders ----

@lru_cache(maxsize=None)
def grid_instances() -> tuple[tuple[Instance, float], ...]:
    out = []
    for n in (3, 4):
        g, _ = gen_hypergrid(n, 2, True)
        start = time.perf_counter()
        inst = instance(f"directed H_{n},2 grid placement", g, chi_grid(n, 2), CSP)
        out.append((inst, time.perf_counter() - start))
    return tuple(out)


@lru_cache(maxsize=None)
def hypergrid_instance() -> tuple[Instance, float]:
    g, _ = gen_hypergrid(3, 3, True)
    start = time.perf_counter()
    inst = instance("directed H_3,3 grid placement", g, chi_grid(3, 3), CAP_MINUS)
    return inst, time.perf_counter() - start


def trimmed_grid_placement() -> tuple[Graph, MonitorPlacement, Hypergrid]:
    g, grid = gen_hypergrid(4, 2, True)
    chi = chi_grid(4, 2)
    dropped = set(grid.nodes([(1, 2), (2, 1)]))
    return g, MonitorPlacement.of([v for v in chi.inputs if v not in dropped], chi.outputs), grid


@lru_cache(maxsize=None)
def trimmed_grid_instance() -> Instance:
    g, chi, _ = trimmed_grid_placement()
    return instance("directed H_4,2 without inputs at (1,2),(2,1)", g, chi, CSP)


@lru_cache(maxsize=None)
def directed_tree_instances() -> tuple[tuple[Instance, Instance | None], ...]:
    out = []
    for depth in (2, 3, 4):
        for orientation in ("downward", "upward"):
            t = gen_tree(complete_binary_tree(depth, orientation))
            chi = chi_tree(t)
            full = instance(f"{orientation} binary tree depth {depth}", t, chi, CSP)
            trimmed = None
            if orientation == "downward":
                # drop the output at the last leaf
                less = MonitorPlacement.of(chi.inputs, chi.outputs[:-1])
                trimmed = instance(f"downward binary tree depth {depth} missing one leaf monitor", t, less, CSP)
            out.append((full, trimmed))
    return tuple(out)


def balanced_tree_sample(rng: random.Random) -> tuple[Graph, MonitorPlacement] | None:
    """Random tree without degree-2 nodes; every leaf monitored, internal
    nodes monitored at random, inputs and outputs may overlap."""
    n = rng.randint(4, MAX_TREE_NODES)
    t = gen_tree(random_tree(n, rng.getrandbits(32)))
    degrees = [t.degree(v) for v in range(n)]
    if 2 in degrees:
        return None
    ins, outs = [], []
    for v in range(n):
        role = rng.choice(("in", "out", "both") if degrees[v] == 1 else ("none", "in", "out", "both"))
        if role in ("in", "both"):
            ins.append(v)
        if role in ("out", "both"):
            outs.append(v)
    if not ins or not outs:
        return None
    chi = MonitorPlacement.of(ins, outs)
    return (t, chi) if is_monitor_balanced(t, chi).balanced else None


@lru_cache(maxsize=None)
def balanced_tree_instances() -> tuple[Instance, ...]:
    rng = random.Random(SEED)
    out = []
    while len(out) < BALANCED_TREES:
        sample = balanced_tree_sample(rng)
        if sample is not None:
            out.append(instance(f"balanced tree #{len(out)}", *sample, CSP))
    return tuple(out)


def unbalanced_cases() -> list[tuple[str, Graph, MonitorPlacement, int, int]]:
    """The three shapes at an unbalanced node u with neighbour w: a line
    from an input side to an output side; one input side above several
    output sides; one output side above several input sides. Returns
    (name, tree, placement, u, w)."""
    line = Graph.build(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    fan = Graph.build(10, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 6), (2, 7), (3, 8), (3, 9)])
    return [
        ("line", line, MonitorPlacement((3, 4), (5, 6)), 0, 1),
        ("input above outputs", fan, MonitorPlacement((4, 5), (6, 7, 8, 9)), 0, 1),
        ("output above inputs", fan, MonitorPlacement((6, 7, 8, 9), (4, 5)), 0, 1),
    ]


@lru_cache(maxsize=None)
def unbalanced_instances() -> tuple[Instance, ...]:
    return tuple(instance(f"unbalanced tree, {name}", t, chi, CSP) for name, t, chi, _, _ in unbalanced_cases())


@lru_cache(maxsize=None)
def undirected_grid_instances() -> tuple[tuple[tuple[Instance, ...], float], ...]:
    out = []
    for n, d, scheme in ((3, 2, CSP), (4, 2, CSP), (3, 3, CAP_MINUS)):
        g, _ = gen_hypergrid(n, d, False)
        start = time.perf_counter()
        batch = tuple(
            instance(f"undirected H_{n},{d} random placement {i}", g, random_placement(g, d, d, derive_seed(SEED, n, d, i)), scheme)
            for i in range(RANDOM_PLACEMENTS)
        )
        out.append((batch, time.perf_counter() - start))
    return tuple(out)


def connected_er(rng: random.Random, directed: bool) -> Graph:
    while True:
        n = rng.randint(4, ER_MAX_NODES)
        p = rng.choice((0.3, 0.45, 0.6))
        g = gen_erdos_renyi(n, p, rng.getrandbits(32), acyclic=directed)
        if is_connected(g):
            return g


@lru_cache(maxsize=None)
def er_instances() -> tuple[tuple[Instance, ...], tuple[Instance, ...]]:
    rng = random.Random(SEED + 7)
    undirected, directed = [], []
    for i in range(ER_GRAPHS):
        for bucket, is_directed in ((undirected, False), (directed, True)):
            g = connected_er(rng, is_directed)
            d = rng.randint(1, g.node_count // 2)
            chi = mdmp(g, d)
            bucket.append(instance(f"{'DAG' if is_directed else 'ER'} #{i} mdmp d={d}", g, chi, CSP))
    return tuple(undirected), tuple(directed)


@lru_cache(maxsize=None)
def agrid_instances() -> tuple[tuple[dict, Instance, Instance], ...]:
    """Criterion 8 runs: (row facts, G instance, boosted instance)."""
    out = []
    rule = DRule.parse("log")
    eunet = load_fixture("eunetworks")
    sources = [("ER(8)", lambda s: gen_erdos_renyi(8, ER8_DENSITY, s)), ("EuNetworks", lambda _s: eunet)]
    for name, make in sources:
        for run in range(AGRID_RUNS):
            seed = derive_seed(SEED, name, run)
            g = make(seed)
            row, res, base_chi = agrid_run(g, rule, run, seed, CSP)
            facts = {"source": name, "run": run, "seed": seed, "d": row.d, "graph": graph_json(g),
                     "added": [list(e) for e in res.added_edges], "mu_g": row.mu_g, "mu_ga": row.mu_ga,
                     "delta_ga": row.delta_ga, "subgraph": g.edges <= res.augmented.edges}
            out.append((
                facts,
                Instance(f"{name} run {run} G", g, base_chi, CSP, row.mu_g),
                Instance(f"{name} run {run} boosted", res.augmented, res.placement, CSP, row.mu_ga),
            ))
    return tuple(out)


@lru_cache(maxsize=None)
def eunet_instances() -> tuple[Instance, tuple[Instance, ...]]:
    g = load_fixture("eunetworks")
    base = instance("EuNetworks mdmp d=3", g, mdmp(g, EUNET_D), CSP)
    boosted = []
    for i in range(EUNET_SEEDS):
        res = agrid(g, EUNET_D, derive_seed(SEED, "eunet", i))
        boosted.append(instance(f"EuNetworks boosted seed #{i}", res.augmented, res.placement, CSP))
    return base, tuple(boosted)


def instances_1_to_6() -> list[Instance]:
    out = [inst for inst, _ in grid_instances()]
    out.append(hypergrid_instance()[0])
    out.append(trimmed_grid_instance())
    for full, trimmed in directed_tree_instances():
        out.append(full)
        if trimmed is not None:
            out.append(trimmed)
    out.extend(balanced_tree_instances())
    out.extend(unbalanced_instances())
    for batch, _ in undirected_grid_instances():
        out.extend(batch)
    return out


def instances_1_to_9() -> list[Instance]:
    out = instances_1_to_6()
    und, dag = er_instances()
    out.extend(und + dag)
    for _, g_inst, ga_inst in agrid_instances():
        out.extend((g_inst, ga_inst))
    base, boosted = eunet_instances()
    out.append(base)
    out.extend(boosted)
    return out


# ---- criteria ----

def test_criterion_01_directed_grids():
    results = grid_instances()
    bad = [(i.label, i.mu, round(t, 2)) for i, t in results if i.mu != 2 or t >= GRID_SECONDS]
    detail = ", ".join(f"{i.label}: mu={i.mu} in {t:.2f}s" for i, t in results)
    verdict(1, not bad, detail + (f"; violations {bad}" if bad else ""))


def test_criterion_02_directed_hypergrid():
    inst, seconds = hypergrid_instance()
    ok = inst.mu == 3 and seconds < HYPERGRID_SECONDS
    verdict(2, ok, f"{inst.label} under CAP-: mu={inst.mu} in {seconds:.2f}s (limit {HYPERGRID_SECONDS:.0f}s)")


def test_criterion_03_grid_placement_optimality():
    g, chi, grid = trimmed_grid_placement()
    idx = enumerate_csp_paths(g, chi)
    u, w = grid.nodes([(1, 2), (2, 1)]), grid.nodes([(1, 1)])
    sep = csp_separates(idx, u, w)
    mu = trimmed_grid_instance().mu
    verdict(3, not sep.separated and mu <= 1, f"csp_separates(U,W)={sep.separated}, mu={mu}")


def test_criterion_04_directed_trees():
    rows = directed_tree_instances()
    bad = []
    for full, trimmed in rows:
        if full.mu != 1:
            bad.append(full.case())
        if trimmed is not None and trimmed.mu != 0:
            bad.append(trimmed.case())
    where = f"; cases in {dump(4, bad)}" if bad else ""
    verdict(4, not bad, f"{len(rows)} trees with mu=1, 3 trimmed placements with mu=0{where}")


def test_criterion_05_undirected_trees():
    balanced = balanced_tree_instances()
    bad = [i.case() for i in balanced if i.mu != 1]
    for (name, t, chi, u, w), inst in zip(unbalanced_cases(), unbalanced_instances()):
        verdict_b = is_monitor_balanced(t, chi)
        same_paths = not csp_separates(enumerate_csp_paths(t, chi), [u], [w]).separated
        if inst.mu != 0 or verdict_b.balanced or verdict_b.witness != u or not same_paths:
            bad.append({**inst.case(), "balanced": verdict_b.balanced, "witness": verdict_b.witness})
    where = f"; cases in {dump(5, bad)}" if bad else ""
    sizes = sorted({i.g.node_count for i in balanced})
    verdict(5, not bad, f"{len(balanced)} balanced trees (sizes {sizes}) with mu=1, 3 unbalanced shapes with mu=0{where}")


def test_criterion_06_undirected_hypergrids():
    results = undirected_grid_instances()
    allowed = {(3, 2): {1, 2}, (4, 2): {1, 2}, (3, 3): {2, 3}}
    bad, total, parts = [], 0.0, []
    for (batch, seconds), key in zip(results, allowed):
        total += seconds
        mus = sorted({i.mu for i in batch})
        parts.append(f"H_{key[0]},{key[1]} mu in {mus}")
        bad.extend(i.case() for i in batch if i.mu not in allowed[key])
    ok = not bad and total < UNDIRECTED_GRID_SECONDS
    where = f"; cases in {dump(6, bad)}" if bad else ""
    verdict(6, ok, f"{', '.join(parts)}; {total:.1f}s total (limit {UNDIRECTED_GRID_SECONDS:.0f}s){where}")


def independent_bounds(inst: Instance) -> dict:
    """Bounds recomputed from networkx degrees."""
    h = to_nx(inst.g)
    n, m = inst.g.node_count, inst.g.edge_count
    if not inst.g.directed:
        delta = min(d for _, d in h.degree())
        return {"degree": delta, "edge": min(n, math.ceil(2 * m / n))}
    ins = set(inst.chi.inputs)
    rest = [h.in_degree(v) for v in h if v not in ins]
    complex_ = [h.in_degree(v) + h.out_degree(v) for v in h if v in ins and h.in_degree(v) > 0]
    cands = rest + complex_
    return {"degree": min(cands) if cands else None, "edge": None}


def test_criterion_07_structural_bounds():
    undirected, dags = er_instances()
    bad = []
    for inst in undirected + dags:
        b = independent_bounds(inst)
        monitors = max(len(inst.chi.inputs), len(inst.chi.outputs))
        broken = []
        if b["degree"] is not None and inst.mu > b["degree"]:
            broken.append("degree")
        if inst.mu >= monitors:
            broken.append("monitor")
        if b["edge"] is not None and inst.mu > b["edge"]:
            broken.append("edge")
        if broken:
            bad.append({**inst.case(), "broken": broken, "bounds": b})
        for scheme in (CAP_MINUS,):
            mu = compute_mu(inst.g, inst.chi, scheme).mu
            if b["degree"] is not None and mu > b["degree"]:
                bad.append({**inst.case(), "scheme": scheme.value, "mu": mu, "broken": ["degree"]})
    where = f"; cases in {dump(7, bad)}" if bad else ""
    verdict(7, not bad, f"{len(undirected)} connected ER graphs and {len(dags)} DAGs, {len(bad)} violations{where}")


def test_criterion_08_agrid_postconditions():
    rows = agrid_instances()
    bad = [facts for facts, _, _ in rows
           if facts["delta_ga"] < facts["d"] or not facts["subgraph"] or facts["mu_ga"] < facts["mu_g"]]
    where = f"; seeds dumped to {dump(8, bad)}" if bad else ""
    verdict(8, not bad, f"{len(rows)} runs (ER(8) p={ER8_DENSITY}, EuNetworks; d=ceil(log2 n)), {len(bad)} violations{where}")


def test_criterion_09_eunetworks_table():
    base, boosted = eunet_instances()
    mus = [i.mu for i in boosted]
    share = Fraction(sum(1 for m in mus if m >= 1), len(mus))
    ok = base.mu == 0 and share >= EUNET_BOOSTED_SHARE and 2 in mus
    verdict(9, ok, f"mu(G|MDMP)={base.mu}; boosted mu values {sorted(mus)}; share>=1 is {share}")


def test_criterion_10_truncation():
    bad = []
    checked = 0
    for inst in instances_1_to_9():
        lam = max(1, math.floor(degree_stats(inst.g).average_degree + Fraction(1, 2)))
        for alpha in sorted({1, 2, lam}):
            rep = compute_mu_truncated(inst.g, inst.chi, inst.scheme, alpha)
            checked += 1
            if rep.mu < inst.mu:
                bad.append({**inst.case(), "alpha": alpha, "mu_alpha": rep.mu})
    mismatches = []
    for n in range(2, ERROR_FRACTION_MAX_N + 1):
        for delta in range(1, n + 1):
            for lam in range(delta, n + 1):
                if error_fraction_bound(n, delta, lam) != brute_error_fraction(n, delta, lam):
                    mismatches.append([n, delta, lam])
    where = f"; cases in {dump(10, {'truncation': bad, 'error_fraction': mismatches})}" if bad or mismatches else ""
    verdict(10, not bad and not mismatches,
            f"{checked} truncated searches with mu_alpha >= mu; error fraction exact for 2<=n<={ERROR_FRACTION_MAX_N}{where}")


def transitive_reduction_edges(g: Graph) -> set:
    return set(nx.transitive_reduction(to_nx(g)).edges)


def embedding_pair(rng: random.Random) -> tuple[Graph, Graph]:
    """G is a random DAG. H keeps G's order under a random relabelling and
    varies the edges: G's reduction plus some of G's edges (distances grow)
    or plus some closure edges (distances may shrink)."""
    n = rng.randint(2, EMBEDDING_MAX_NODES)
    g = gen_erdos_renyi(n, rng.choice((0.3, 0.5, 0.7)), rng.getrandbits(32), acyclic=True)
    perm = list(range(n))
    rng.shuffle(perm)
    g = relabel(g, perm)
    reduction = transitive_reduction_edges(g)
    pool = sorted(set(g.edges if rng.random() < 0.5 else transitive_closure(g).edges) - reduction)
    extra = [e for e in pool if rng.random() < 0.5]
    h = Graph.build(n, sorted(reduction) + extra, True)
    perm = list(range(n))
    rng.shuffle(perm)
    return g, relabel(h, perm)


def random_dag_placement(g: Graph, rng: random.Random) -> MonitorPlacement:
    nodes = list(range(g.node_count))
    ins = rng.sample(nodes, rng.randint(1, len(nodes)))
    outs = rng.sample(nodes, rng.randint(1, len(nodes)))
    return MonitorPlacement.of(sorted(ins), sorted(outs))


def random_directed_tree(rng: random.Random) -> Graph:
    n = rng.randint(2, EMBEDDING_MAX_NODES)
    return gen_tree(random_tree(n, rng.getrandbits(32), rng.choice(("downward", "upward"))))


def test_criterion_11_embedding_statements():
    rng = random.Random(SEED + 11)
    bad = []
    counts = {"pairs": 0, "d.i.": 0, "d.p.": 0, "trees": 0}

    def mu(g, chi):
        return compute_mu(g, chi, CSP).mu

    def fail(name, **case):
        bad.append({"statement": name, **case})

    while counts["pairs"] < EMBEDDING_PAIRS:
        g, h = embedding_pair(rng)
        f = find_embedding(g, h, "bijective")
        if f is None:
            continue
        counts["pairs"] += 1
        chi = random_dag_placement(g, rng)
        chi_f = push_forward_placement(f, chi)
        mu_g, mu_h = mu(g, chi), mu(h, chi_f)
        case = {"g": graph_json(g), "h": graph_json(h), "map": f.to_json(), "placement": chi.to_json(),
                "mu_g": mu_g, "mu_h": mu_h}
        cls = classify_embedding(f, g, h)
        if cls.distance_increasing:
            counts["d.i."] += 1
            if mu_g < mu_h:
                fail("distance-increasing embedding: mu(G) >= mu(H)", **case)
            inverse = f.inverse()
            for a, b in h.edges:
                if (inverse[a], inverse[b]) not in g.edges:
                    fail("distance-increasing embedding pulls edges back", edge=[a, b], **case)
        if cls.distance_preserving:
            counts["d.p."] += 1
            if mu_g != mu_h:
                fail("distance-preserving embedding: mu(G) = mu(H)", **case)
        closure = transitive_closure(g)
        if mu(closure, chi) < mu_g:
            fail("closure: mu(G*) >= mu(G)", **case)
        for k in (2, 3):
            if mu(graph_power(g, k), chi) < mu_g:
                fail(f"power: mu(G^{k}) >= mu(G)", k=k, **case)

    while counts["trees"] < EMBEDDING_PAIRS:
        t = random_directed_tree(rng)
        if not is_routing_consistent(enumerate_csp_paths(t, chi_tree(t))):
            fail("directed trees are routing consistent", g=graph_json(t))
        reduction = sorted(t.edges)
        pool = sorted(set(transitive_closure(t).edges) - set(reduction))
        h = Graph.build(t.node_count, reduction + [e for e in pool if rng.random() < 0.5], True)
        perm = list(range(t.node_count))
        rng.shuffle(perm)
        h = relabel(h, perm)
        f = find_embedding(t, h, "bijective")
        if f is None:
            fail("tree embeds into its relabelled augmentation", g=graph_json(t), h=graph_json(h))
            continue
        counts["trees"] += 1
        for chi in (chi_tree(t), random_dag_placement(t, rng)):
            mu_t, mu_h = mu(t, chi), mu(h, push_forward_placement(f, chi))
            if mu_t > mu_h:
                fail("routing-consistent G: mu(G) <= mu(H)", g=graph_json(t), h=graph_json(h), map=f.to_json(),
                     placement=chi.to_json(), mu_g=mu_t, mu_h=mu_h)
    where = f"; counterexamples in {dump(11, bad)}" if bad else ""
    verdict(11, not bad, f"{counts['pairs']} DAG pairs ({counts['d.i.']} d.i., {counts['d.p.']} d.p.), "
                         f"{counts['trees']} tree pairs, {len(bad)} counterexamples{where}")


def test_criterion_12_unique_decoding():
    rng = random.Random(SEED + 12)
    bad, graphs, draws = [], 0, 0
    for inst in instances_1_to_6():
        graphs += 1
        if inst.scheme is CSP:
            idx = enumerate_csp_paths(inst.g, inst.chi)
            covered = [v for v in range(inst.g.node_count) if idx.covered_mask() >> v & 1]
            measure = lambda f: simulate_measurement(idx, f)  # noqa: E731
            source = idx
        else:
            oracle = WalkOracle(inst.g, inst.chi)
            covered = [v for v in range(inst.g.node_count) if oracle.covered_mask() >> v & 1]
            measure = lambda f: walk_measurement(oracle, f)  # noqa: E731
            source = oracle
        for _ in range(FAILURE_SETS):
            size = rng.randint(0, min(inst.mu, len(covered)))
            failed = tuple(sorted(rng.sample(covered, size)))
            found = consistent_failure_sets(source, measure(failed), inst.mu).sets
            draws += 1
            if found != [failed]:
                bad.append({**inst.case(), "failed": list(failed), "decoded": [list(s) for s in found]})
    where = f"; cases in {dump(12, bad[:50])}" if bad else ""
    verdict(12, not bad, f"{draws} failure sets over {graphs} instances decoded uniquely{where}")


def campaign_snapshot(workers: int) -> str:
    """JSON reports and campaign CSVs of the earlier criteria at a worker count."""
    parts = []
    for n in (3, 4):
        g, _ = gen_hypergrid(n, 2, True)
        parts.append(json.dumps(compute_mu(g, chi_grid(n, 2), CSP, workers=workers).to_json()))
    g, _ = gen_hypergrid(3, 3, True)
    parts.append(json.dumps(compute_mu(g, chi_grid(3, 3), CAP_MINUS, workers=workers).to_json()))
    eunet = load_fixture("eunetworks")
    table = agrid_campaign(eunet, DRule.parse(f"fixed:{EUNET_D}"), EUNET_SEEDS, SEED, CSP, workers=workers)
    parts.append(repr([r.values() for r in table.rows]))
    return "\n".join(parts)


CLI_RUNS = [
    ["mu", "--gen", "hypergrid:n=4,d=2", "--chi", "grid"],
    ["mu", "--gen", "hypergrid:n=3,d=3", "--chi", "grid", "--scheme", "cap-"],
    ["mu", "--fixture", "eunetworks", "--chi", "mdmp:d=3", "--alpha", "3"],
    ["experiment", "random-monitors", "--gen", "hypergrid:n=4,d=2,undirected", "--d-rule", "fixed:2", "--runs", "20", "--seed", "1"],
    ["experiment", "agrid", "--fixture", "eunetworks", "--d-rule", "fixed:3", "--runs", "20", "--seed", "1"],
    ["experiment", "agrid", "--gen", "er:n=8,p=0.3", "--d-rule", "log", "--runs", "10", "--seed", "2"],
    ["experiment", "truncated", "--fixture", "claranet", "--d-rule", "fixed:2", "--runs", "5", "--seed", "3"],
]


def cli(args: list[str], workers: int) -> bytes:
    proc = subprocess.run([sys.executable, "-m", "tomography.cli", *args, "--workers", str(workers)],
                          capture_output=True, check=False)
    return bytes([proc.returncode]) + proc.stdout


def test_criterion_13_determinism():
    differ = []
    first, second, parallel = campaign_snapshot(1), campaign_snapshot(1), campaign_snapshot(8)
    if not first == second == parallel:
        differ.append("in-process snapshot")
    for args in CLI_RUNS:
        a, b, c = cli(args, 1), cli(args, 1), cli(args, 8)
        if not a == b == c:
            differ.append(" ".join(args))
    where = f"; cases in {dump(13, differ)}" if differ else ""
    verdict(13, not differ, f"{len(CLI_RUNS)} CLI commands and the in-process snapshot identical across "
                            f"repeat runs and --workers 1 vs 8{where}")
