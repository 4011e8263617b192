"""Command line entry point.

Exit codes: 0 success, 2 domain error, 3 path budget exceeded, 4 input
that could not be parsed. Data goes to stdout or ``--out``; logs go to
stderr.

Randomness: every randomised step uses Python's ``random.Random`` (MT19937)
seeded from ``--seed``. Campaign run ``i`` uses the seed
``derive_seed(seed, i)``, which is the first 63 bits of
SHA-256("<seed>:<i>"). Every CSV row records its seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from . import agrid as agrid_mod
from .agrid import CAMPAIGN_HEADER, DRule, agrid_campaign
from .embeddings import classify_embedding, find_embedding
from .errors import BudgetExceeded, CapacityError, DomainError, InputError, TomographyError
from .experiments import (
    random_monitor_campaign,
    truncated_campaign,
    truncated_histogram,
    write_csv,
)
from .graph import Graph
from .graphml import FIXTURES, ingest_graphml, load_fixture, to_graphml
from .identifiability import bounds_report, compute_mu, compute_mu_truncated
from .monitors import MonitorPlacement, chi_grid, chi_tree, is_monitor_balanced, mdmp, random_placement
from .routing import DEFAULT_PATH_BUDGET, RoutingScheme
from .topology import TreeSpec, complete_binary_tree, gen_erdos_renyi, gen_hypergrid, gen_tree, random_tree

log = logging.getLogger("tomography")

EXIT_OK, EXIT_DOMAIN, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4


# ---- argument parsing ----

def _kv(text: str) -> tuple[dict[str, str], list[str]]:
    """Split ``a=1,b=2,flag`` into keyed values and bare flags."""
    pairs, flags = {}, []
    for part in filter(None, text.split(",")):
        if "=" in part:
            k, v = part.split("=", 1)
            pairs[k.strip()] = v.strip()
        else:
            flags.append(part.strip())
    return pairs, flags


def _int(pairs: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in pairs:
        if default is None:
            raise DomainError(f"missing parameter {key!r}")
        return default
    try:
        return int(pairs[key])
    except ValueError:
        raise DomainError(f"parameter {key!r} must be an integer") from None


@dataclass(frozen=True)
class Topology:
    """A graph, or a seed-indexed family of graphs, plus what it came from."""

    make: Callable[[int], Graph]
    randomised: bool
    grid: tuple[int, int] | None = None
    tree: bool = False

    def build(self, seed: int) -> Graph:
        return self.make(seed)


def parse_gen(text: str) -> Topology:
    kind, _, rest = text.partition(":")
    pairs, flags = _kv(rest)
    if kind == "hypergrid":
        n, d = _int(pairs, "n"), _int(pairs, "d")
        directed = "undirected" not in flags
        return Topology(lambda _s: gen_hypergrid(n, d, directed)[0], False, grid=(n, d))
    if kind == "tree":
        orientation = next((f for f in flags if f in ("downward", "upward", "undirected")), "downward")
        if "complete-binary" in flags:
            spec = complete_binary_tree(_int(pairs, "depth"), orientation)
            return Topology(lambda _s: gen_tree(spec), False, tree=True)
        if "random" in flags:
            n = _int(pairs, "n")
            fixed = pairs.get("seed")
            if fixed is not None:
                fixed_seed = _int(pairs, "seed")
                return Topology(lambda _s: gen_tree(random_tree(n, fixed_seed, orientation)), False, tree=True)
            return Topology(lambda s: gen_tree(random_tree(n, s, orientation)), True, tree=True)
        if "parent" in pairs:
            parent = tuple(None if x in ("-", "") else int(x) for x in pairs["parent"].split(";"))
            spec = TreeSpec(parent, orientation)
            return Topology(lambda _s: gen_tree(spec), False, tree=True)
        raise DomainError("tree generator needs complete-binary, random or parent=")
    if kind == "er":
        n = _int(pairs, "n")
        try:
            p = float(pairs["p"])
        except (KeyError, ValueError):
            raise DomainError("er generator needs p=<probability>") from None
        directed, dag = "directed" in flags, "dag" in flags
        if "seed" in pairs:
            fixed_seed = _int(pairs, "seed")
            return Topology(lambda _s: gen_erdos_renyi(n, p, fixed_seed, directed, dag), False)
        return Topology(lambda s: gen_erdos_renyi(n, p, s, directed, dag), True)
    raise DomainError(f"unknown generator {kind!r}")


def load_topology(args: argparse.Namespace) -> Topology:
    given = [x for x in (args.gen, args.input, args.fixture) if x]
    if len(given) != 1:
        raise DomainError("give exactly one of --gen, --in, --fixture")
    if args.gen:
        return parse_gen(args.gen)
    g = ingest_graphml(args.input) if args.input else load_fixture(args.fixture)
    return Topology(lambda _s: g, False)


def parse_chi(text: str, g: Graph, topo: Topology, seed: int | None) -> MonitorPlacement:
    if text.endswith(".json"):
        chi = MonitorPlacement.load(text)
        chi.validate(g)
        return chi
    kind, _, rest = text.partition(":")
    pairs, _flags = _kv(rest)
    if kind == "grid":
        if topo.grid is None:
            raise DomainError("--chi grid needs a hypergrid topology")
        return chi_grid(*topo.grid)
    if kind == "tree":
        return chi_tree(g)
    if kind == "mdmp":
        return mdmp(g, _int(pairs, "d"))
    if kind == "random":
        if seed is None:
            raise DomainError("random placement needs --seed")
        return random_placement(g, _int(pairs, "in"), _int(pairs, "out"), seed)
    raise DomainError(f"unknown placement {text!r}")


# ---- output ----

def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _graph_seed(topo: Topology, args: argparse.Namespace) -> int:
    if topo.randomised and args.seed is None:
        raise DomainError("this topology is random; give --seed")
    return args.seed if args.seed is not None else 0


# ---- commands ----

def cmd_gen(args: argparse.Namespace) -> int:
    topo = load_topology(args)
    _emit(args, to_graphml(topo.build(_graph_seed(topo, args))))
    return EXIT_OK


def cmd_mu(args: argparse.Namespace) -> int:
    topo = load_topology(args)
    g = topo.build(_graph_seed(topo, args))
    chi = parse_chi(args.chi, g, topo, args.seed)
    scheme = RoutingScheme.parse(args.scheme)
    if args.alpha is not None:
        rep = compute_mu_truncated(g, chi, scheme, args.alpha, workers=args.workers, path_budget=args.path_budget)
    else:
        rep = compute_mu(g, chi, scheme, args.k_cap, workers=args.workers, path_budget=args.path_budget)
    out = {
        "report": rep.to_json(),
        "lower_bound_only": rep.lower_bound_only,
        "paths": rep.path_count,
        "nodes": g.node_count,
        "edges": g.edge_count,
        "placement": chi.to_json(),
        "bounds": bounds_report(g, chi).to_json(),
    }
    _emit(args, _json(out))
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    topo = load_topology(args)
    g = topo.build(_graph_seed(topo, args))
    chi = parse_chi(args.chi, g, topo, args.seed)
    out = bounds_report(g, chi).to_json()
    if not g.directed and g.edge_count == g.node_count - 1 and g.node_count > 0:
        try:
            verdict = is_monitor_balanced(g, chi)
            out["monitor_balanced"] = verdict.balanced
            out["balance_witness"] = verdict.witness
        except DomainError:
            pass
    _emit(args, _json(out))
    return EXIT_OK


def cmd_agrid(args: argparse.Namespace) -> int:
    topo = load_topology(args)
    if args.seed is None:
        raise DomainError("boosting is randomised; give --seed")
    g = topo.build(args.seed)
    rule = DRule.parse(args.d_rule, args.bump_d)
    res = agrid_mod.agrid(g, rule(g), args.seed)
    if args.graph_out:
        with open(args.graph_out, "w", encoding="utf-8") as fh:
            fh.write(to_graphml(res.augmented))
    out = {
        "d": res.d,
        "seed": res.seed,
        "added_edges": [list(e) for e in res.added_edges],
        "placement": res.placement.to_json(),
    }
    _emit(args, _json(out))
    return EXIT_OK


def cmd_embed(args: argparse.Namespace) -> int:
    g = ingest_graphml_directed(args.source)
    h = ingest_graphml_directed(args.target)
    f = find_embedding(g, h, args.require)
    out = {"map": None if f is None else f.to_json()}
    if f is not None:
        cls = classify_embedding(f, g, h)
        out.update(bijective=f.bijective, distance_increasing=cls.distance_increasing, distance_preserving=cls.distance_preserving)
    _emit(args, _json(out))
    return EXIT_OK


def ingest_graphml_directed(path: str) -> Graph:
    g = ingest_graphml(path)
    if not g.directed:
        raise DomainError(f"{path}: embeddings need edgedefault=\"directed\"")
    return g


def cmd_experiment(args: argparse.Namespace) -> int:
    topo = load_topology(args)
    if args.seed is None:
        raise DomainError("experiments are randomised; give --seed")
    source = topo.make if topo.randomised else topo.make(0)
    rule = DRule.parse(args.d_rule, args.bump_d)
    common = dict(scheme=args.scheme, workers=args.workers, path_budget=args.path_budget)
    if args.family == "agrid":
        table = agrid_campaign(source, rule, args.runs, args.seed, **common)
        text = write_csv(CAMPAIGN_HEADER, (r.values() for r in table.rows))
        summary = table.summary()
        summary_text = write_csv(
            ("runs", "greater", "equal", "less", "max_increment", "failed"),
            [tuple(str(summary[k]) if summary[k] is not None else "" for k in ("runs", "greater", "equal", "less", "max_increment", "failed"))],
        )
        failures = table.failures
    elif args.family == "random-monitors":
        t = random_monitor_campaign(source, rule, args.runs, args.seed, boost=args.boost, **common)
        text, summary_text, failures = t.to_csv(), None, t.failures
    else:
        t = truncated_campaign(source, rule, args.runs, args.seed, alpha=args.alpha, **common)
        text, summary_text, failures = t.to_csv(), truncated_histogram(t).to_csv(), t.failures
    _emit(args, text)
    if args.summary and summary_text is not None:
        with open(args.summary, "w", encoding="utf-8", newline="") as fh:
            fh.write(summary_text)
    for run, seed, msg in failures:
        log.error("run %d (seed %d) failed: %s", run, seed, msg)
    if failures:
        return EXIT_BUDGET if any("paths" in m for _, _, m in failures) else EXIT_DOMAIN
    return EXIT_OK


# ---- parser ----

def _add_topology(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gen", help="hypergrid:n=4,d=2[,undirected] | tree:complete-binary,depth=3,downward | "
                   "tree:random,n=10[,seed=1] | er:n=8,p=0.3[,directed][,dag][,seed=1]")
    p.add_argument("--in", dest="input", help="GraphML file")
    p.add_argument("--fixture", choices=FIXTURES, help="bundled topology")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write data here instead of stdout")


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", default="csp", choices=["csp", "cap-", "cap"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--path-budget", type=int, default=DEFAULT_PATH_BUDGET)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tomography", description="Node identifiability for Boolean network tomography.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated topology as GraphML")
    _add_topology(p)
    p.set_defaults(func=cmd_gen)

    for name, func in (("mu", cmd_mu), ("bounds", cmd_bounds)):
        p = sub.add_parser(name)
        _add_topology(p)
        _add_search(p)
        p.add_argument("--chi", required=True, help="grid | tree | mdmp:d=3 | random:in=2,out=2 | FILE.json")
        if name == "mu":
            p.add_argument("--alpha", type=int)
            p.add_argument("--k-cap", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("agrid", help="boost the minimum degree and place monitors")
    _add_topology(p)
    p.add_argument("--d-rule", default="log")
    p.add_argument("--bump-d", action="store_true")
    p.add_argument("--graph-out", help="write the boosted graph as GraphML")
    p.set_defaults(func=cmd_agrid)

    p = sub.add_parser("embed", help="search an order embedding between two DAGs")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--require", default="any", choices=["any", "distance_increasing", "distance_preserving", "bijective"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("experiment", help="run a campaign and write CSV")
    p.add_argument("family", choices=["agrid", "random-monitors", "truncated"])
    _add_topology(p)
    _add_search(p)
    p.add_argument("--d-rule", default="log")
    p.add_argument("--bump-d", action="store_true")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--alpha", type=int)
    p.add_argument("--boost", action="store_true", help="random-monitors: also place on the boosted graph")
    p.add_argument("--summary", help="write the summary table here")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        log.error("%s (partial count %d)", exc, exc.partial_count)
        return EXIT_BUDGET
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except (DomainError, CapacityError) as exc:
        log.error("%s", exc)
        return EXIT_DOMAIN
    except TomographyError as exc:  # pragma: no cover - every subclass is handled above
        log.error("%s", exc)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
