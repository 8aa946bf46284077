"""Isomorphism of categories up to renaming of objects, points and components."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import networkx as nx

from .core import Circle, FlowCategory


@dataclass
class Isomorphism:
    objects: dict[str, str]
    points: dict[tuple[str, str, str], tuple[str, str, str]]
    components: dict[tuple[str, str, str], tuple[str, str, str]]


def incidence_graph(cat: FlowCategory) -> nx.DiGraph:
    """Colored digraph whose isomorphisms are exactly the category isomorphisms."""
    g = nx.DiGraph()
    for o, h in cat.objects.items():
        g.add_node(("o", o), color=("obj", h))
    for (a, b), pts in cat.points.items():
        for pid, s in pts.items():
            n = ("p", a, b, pid)
            g.add_node(n, color=("pt", s))
            g.add_edge(("o", a), n, role="src")
            g.add_edge(n, ("o", b), role="tgt")
    for (a, b), comps in cat.ones.items():
        for cid, c in comps.items():
            n = ("c", a, b, cid)
            if isinstance(c, Circle):
                g.add_node(n, color=("circle", c.label))
            else:
                g.add_node(n, color=("interval", c.fr))
                for k, end in enumerate(c.ends):
                    e = ("e", a, b, cid, k)
                    g.add_node(e, color=("end",))
                    g.add_edge(n, e, role="end")
                    g.add_edge(e, ("o", end.via), role="via")
                    g.add_edge(e, ("p", end.via, b, end.lower), role="lower")
                    g.add_edge(e, ("p", a, end.via, end.upper), role="upper")
            g.add_edge(("o", a), n, role="src")
            g.add_edge(n, ("o", b), role="tgt")
    return g


def _signature(cat: FlowCategory) -> tuple:
    """Cheap invariant; unequal signatures rule out an isomorphism."""
    gr = cat.objects
    pts = Counter((gr[a], s) for (a, _), p in cat.points.items() for s in p.values())
    comps = Counter((gr[a], type(c).__name__, getattr(c, "fr", getattr(c, "label", None)))
                    for (a, _), cs in cat.ones.items() for c in cs.values())
    nonempty = Counter(gr[a] - gr[b] for store in (cat.points, cat.ones)
                       for (a, b), v in store.items() if v)
    return Counter(gr.values()), pts, comps, nonempty


class _Adjacency:
    def __init__(self, g: nx.DiGraph):
        self.nodes = list(g)
        self.out = {n: [(d["role"], v) for _, v, d in g.out_edges(n, data=True)] for n in g}
        self.inc = {n: [(d["role"], u) for u, _, d in g.in_edges(n, data=True)] for n in g}
        self.edges = {(u, v, d["role"]) for u, v, d in g.edges(data=True)}


def _refine(adjs: list[_Adjacency], colors: list[dict]) -> list[dict]:
    """Colour refinement on several graphs with a shared palette, run to a fixed point.

    Isomorphic nodes always end with equal colours.
    """
    classes = -1
    while True:
        palette: dict = {}
        new = []
        for adj, col in zip(adjs, colors):
            sig = {n: (col[n],
                       tuple(sorted((r, col[v]) for r, v in adj.out[n])),
                       tuple(sorted((r, col[u]) for r, u in adj.inc[n])))
                   for n in adj.nodes}
            new.append({n: palette.setdefault(sig[n], len(palette)) for n in adj.nodes})
        colors = new
        if len(palette) == classes:
            return colors
        classes = len(palette)


def refine_colors(graphs: list[nx.DiGraph]) -> list[dict]:
    adjs = [_Adjacency(g) for g in graphs]
    return _refine(adjs, [{n: g.nodes[n]["color"] for n in g} for g in graphs])


def _search(ga: _Adjacency, gb: _Adjacency, ca: dict, cb: dict) -> dict | None:
    """Individualize-and-refine backtracking; returns a node bijection or None."""
    ca, cb = _refine([ga, gb], [ca, cb])
    if Counter(ca.values()) != Counter(cb.values()):
        return None
    classes: dict = {}
    for n, c in ca.items():
        classes.setdefault(c, []).append(n)
    open_ = [ns for ns in classes.values() if len(ns) > 1]
    if not open_:
        inv = {c: n for n, c in cb.items()}
        m = {n: inv[c] for n, c in ca.items()}
        if all((m[u], m[v], r) in gb.edges for u, v, r in ga.edges):
            return m
        return None
    cell = min(open_, key=len)
    v, c = cell[0], ca[cell[0]]
    mark = max(ca.values()) + 1
    for w in [n for n, k in cb.items() if k == c]:
        m = _search(ga, gb, {**ca, v: mark}, {**cb, w: mark})
        if m is not None:
            return m
    return None


def iso_check(a: FlowCategory, b: FlowCategory) -> Isomorphism | None:
    """Return an isomorphism a -> b, or None if there is none."""
    a, b = a.copy().prune(), b.copy().prune()
    if _signature(a) != _signature(b):
        return None
    ga, gb = incidence_graph(a), incidence_graph(b)
    if ga.number_of_edges() != gb.number_of_edges():
        return None
    m = _search(_Adjacency(ga), _Adjacency(gb),
                {n: ga.nodes[n]["color"] for n in ga}, {n: gb.nodes[n]["color"] for n in gb})
    if m is None:
        return None
    return Isomorphism(
        objects={n[1]: v[1] for n, v in m.items() if n[0] == "o"},
        points={n[1:]: v[1:] for n, v in m.items() if n[0] == "p"},
        components={n[1:]: v[1:] for n, v in m.items() if n[0] == "c"},
    )


def isomorphic(a: FlowCategory, b: FlowCategory) -> bool:
    return iso_check(a, b) is not None
