"""A small GraphML reader/writer: nodes, edges and an optional node label."""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from importlib import resources
from typing import NamedTuple
from xml.sax.saxutils import escape, quoteattr

from .errors import DomainError, InputError
from .graph import Graph

log = logging.getLogger(__name__)

FIXTURES = ("claranet", "dataxchange", "eunetworks", "getnet")


class Ingested(NamedTuple):
    graph: Graph
    self_loops_dropped: int
    duplicates_collapsed: int


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_graphml(source: str, *, name: str = "<string>", directed: bool | None = None) -> Ingested:
    """Parse GraphML text. Edge direction follows ``edgedefault`` unless
    ``directed`` is given; Topology Zoo files are undirected."""
    try:
        root = ET.fromstring(source)
    except ET.ParseError as exc:
        line, col = exc.position
        raise InputError(f"{name}: line {line}, column {col}: malformed XML") from exc
    graph_el = next((el for el in root.iter() if _local(el.tag) == "graph"), None)
    if graph_el is None:
        raise InputError(f"{name}: no <graph> element")
    if directed is None:
        directed = graph_el.get("edgedefault", "undirected") == "directed"
    label_keys = {
        k.get("id")
        for k in root.iter()
        if _local(k.tag) == "key" and k.get("attr.name") == "label" and k.get("for") in (None, "node", "all")
    }
    index: dict[str, int] = {}
    labels: list[str] = []
    for el in graph_el:
        if _local(el.tag) != "node":
            continue
        node_id = el.get("id")
        if node_id is None:
            raise InputError(f"{name}: node without id")
        if node_id in index:
            raise InputError(f"{name}: duplicate node id {node_id!r}")
        index[node_id] = len(index)
        label = next((d.text or "" for d in el if _local(d.tag) == "data" and d.get("key") in label_keys), node_id)
        labels.append(label)
    if not index:
        raise DomainError(f"{name}: graph has no nodes")
    loops = dups = 0
    seen: set[tuple[int, int]] = set()
    for el in graph_el:
        if _local(el.tag) != "edge":
            continue
        try:
            u, v = index[el.get("source", "")], index[el.get("target", "")]
        except KeyError:
            raise InputError(f"{name}: edge refers to an unknown node") from None
        if u == v:
            loops += 1
            continue
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            dups += 1
            continue
        seen.add(key)
    if loops:
        log.warning("%s: dropped %d self-loop(s)", name, loops)
    return Ingested(Graph.build(len(index), seen, directed, labels), loops, dups)


def ingest_graphml(path: str) -> Graph:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    return parse_graphml(text, name=path).graph


def to_graphml(g: Graph) -> str:
    lines = [
        '<?xml version="1.0" encoding="utf-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
        f'  <graph edgedefault="{"directed" if g.directed else "undirected"}">',
    ]
    for u in range(g.node_count):
        lines.append(f'    <node id="n{u}"><data key="label">{escape(g.label(u))}</data></node>')
    for u, v in g.sorted_edges():
        lines.append(f"    <edge source={quoteattr(f'n{u}')} target={quoteattr(f'n{v}')}/>")
    lines += ["  </graph>", "</graphml>", ""]
    return "\n".join(lines)


def load_fixture(name: str) -> Graph:
    """One of the bundled topologies (see ``data/README.md``)."""
    if name not in FIXTURES:
        raise DomainError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files(__package__).joinpath("data", f"{name}.graphml").read_text(encoding="utf-8")
    return parse_graphml(text, name=name).graph
