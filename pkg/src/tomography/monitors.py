"""Monitor placements and the constructions that produce them."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Any, Callable, Iterable, NamedTuple

from .errors import DomainError, InputError
from .graph import Graph, is_connected, reach_mask, to_mask
from .topology import Hypergrid


@dataclass(frozen=True)
class MonitorPlacement:
    """Input monitors (paths start here) and output monitors (paths end here).

    The two tuples may share nodes; each one is free of repeats.
    """

    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.inputs or not self.outputs:
            raise DomainError("a placement needs at least one input and one output")
        if len(set(self.inputs)) != len(self.inputs) or len(set(self.outputs)) != len(self.outputs):
            raise DomainError("monitor lists must not repeat nodes")

    @classmethod
    def of(cls, inputs: Iterable[int], outputs: Iterable[int]) -> "MonitorPlacement":
        return cls(tuple(int(v) for v in inputs), tuple(int(v) for v in outputs))

    @property
    def input_mask(self) -> int:
        return to_mask(self.inputs)

    @property
    def output_mask(self) -> int:
        return to_mask(self.outputs)

    def validate(self, g: Graph) -> None:
        for v in self.inputs + self.outputs:
            if not 0 <= v < g.node_count:
                raise DomainError(f"monitor node {v} not in graph")

    def to_json(self) -> dict[str, list[int]]:
        return {"inputs": list(self.inputs), "outputs": list(self.outputs)}

    @classmethod
    def from_json(cls, data: Any) -> "MonitorPlacement":
        try:
            return cls.of(data["inputs"], data["outputs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad placement object: {exc}") from exc

    @classmethod
    def load(cls, path: str) -> "MonitorPlacement":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        return cls.from_json(data)


def chi_grid(n: int, d: int) -> MonitorPlacement:
    """Inputs on every low face (some coordinate is 1), outputs on every high
    face (some coordinate is n)."""
    if n < 3:
        raise DomainError("grid placement needs n >= 3")
    grid = Hypergrid(n, d)
    ins, outs = [], []
    for u in range(grid.size):
        x = grid.coords(u)
        if 1 in x:
            ins.append(u)
        if n in x:
            outs.append(u)
    return MonitorPlacement.of(ins, outs)


def chi_tree(t: Graph) -> MonitorPlacement:
    """Root and leaves of a directed tree: downward trees start at the root,
    upward trees start at the leaves."""
    if not t.directed:
        raise DomainError("tree placement needs a directed tree")
    indeg = [m.bit_count() for m in t.in_masks]
    outdeg = [m.bit_count() for m in t.out_masks]
    n = t.node_count
    if n < 2 or t.edge_count != n - 1 or not is_connected(t):
        raise DomainError("not a directed tree")
    sources = [v for v in range(n) if indeg[v] == 0]
    sinks = [v for v in range(n) if outdeg[v] == 0]
    if max(indeg) <= 1 and len(sources) == 1:
        return MonitorPlacement.of(sources, sinks)
    if max(outdeg) <= 1 and len(sinks) == 1:
        return MonitorPlacement.of(sources, sinks)
    raise DomainError("tree is neither downward nor upward oriented")


def mdmp(g: Graph, d: int, tie_break: Callable[[int], Any] | None = None) -> MonitorPlacement:
    """Minimal-degree placement: ``d`` rounds, each taking the two unchosen
    nodes of least degree; the one earlier in ``tie_break`` order (node id by
    default) becomes an input, the other an output."""
    if d < 1:
        raise DomainError("d must be positive")
    if g.node_count < 2 * d:
        raise DomainError(f"need at least {2 * d} nodes, graph has {g.node_count}")
    key = tie_break or (lambda v: v)
    order = sorted(range(g.node_count), key=lambda v: (g.degree(v), key(v)))
    ins, outs = [], []
    for i in range(d):
        a, b = sorted(order[2 * i : 2 * i + 2], key=key)
        ins.append(a)
        outs.append(b)
    return MonitorPlacement.of(ins, outs)


def random_placement(g: Graph, k_in: int, k_out: int, seed: int) -> MonitorPlacement:
    """Disjoint uniform draw: ``k_in`` inputs then ``k_out`` outputs."""
    if k_in < 1 or k_out < 1:
        raise DomainError("need at least one input and one output")
    if k_in + k_out > g.node_count:
        raise DomainError("not enough nodes for a disjoint placement")
    picked = random.Random(seed).sample(range(g.node_count), k_in + k_out)
    return MonitorPlacement.of(picked[:k_in], picked[k_in:])


# ---- monitor-balanced trees ----

class Balance(NamedTuple):
    balanced: bool
    witness: int | None


def _check_undirected_tree(t: Graph) -> None:
    if t.directed:
        raise DomainError("expected an undirected tree")
    if t.node_count == 0 or t.edge_count != t.node_count - 1 or not is_connected(t):
        raise DomainError("graph is not a tree")


def subtree_masks(t: Graph, u: int) -> list[int]:
    """Components of ``t - u``, one per neighbour of ``u``, in neighbour order."""
    allowed = t.all_mask & ~(1 << u)
    return [reach_mask(t, 1 << w, allowed) for w in t.out_lists[u]]


def is_monitor_balanced(t: Graph, chi: MonitorPlacement) -> Balance:
    """Every non-leaf needs two neighbour subtrees holding an input and two
    holding an output. On failure the smallest offending node is returned."""
    _check_undirected_tree(t)
    chi.validate(t)
    ins, outs = chi.input_mask, chi.output_mask
    for u in range(t.node_count):
        if t.out_masks[u].bit_count() < 2:
            continue
        parts = subtree_masks(t, u)
        if sum(1 for p in parts if p & ins) < 2 or sum(1 for p in parts if p & outs) < 2:
            return Balance(False, u)
    return Balance(True, None)
