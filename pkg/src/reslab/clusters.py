"""Triad-sharing graph, connection typing, and N-star detection.

Two triads are connected when they share at least one wavevector.  The
shared vector's role in each triad is A (active) when it sits in the
high-frequency k3 slot and P (passive) otherwise, giving the three
connection types PP, AP, AA.  An N-star is the cluster of all triads
containing one common passive vector.

For cluster analysis triads are deduplicated up to the k1 <-> k2 swap:
the two pair orders describe the same triangle.  The ordered pairs stay
in force only inside the dynamics coupling lists.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .lattice import Triad, WaveVector

__all__ = [
    "Edge",
    "TriadGraph",
    "NStar",
    "ComponentSummary",
    "dedupe_swap",
    "build_graph",
    "find_nstars",
    "component_stats",
]


def dedupe_swap(triads: list[Triad]) -> list[Triad]:
    """Collapse (k1, k2) <-> (k2, k1) duplicates to one representative.

    The representative has k1 <= k2 lexicographically; output is in
    canonical triad order.
    """
    seen = set()
    out = []
    for t in triads:
        rep = t if t.k1 <= t.k2 else t.swapped()
        if rep not in seen:
            seen.add(rep)
            out.append(rep)
    out.sort(key=Triad.sort_key)
    return out


@dataclass(frozen=True)
class Edge:
    """One shared wavevector between two triads (multi-edge per share)."""

    i: int
    j: int
    shared: WaveVector
    role_i: str  # "P" or "A"
    role_j: str

    @property
    def label(self) -> str:
        """Connection type, normalized: AA, AP or PP."""
        return "".join(sorted((self.role_i, self.role_j)))


@dataclass(frozen=True)
class TriadGraph:
    nodes: tuple[Triad, ...]
    edges: tuple[Edge, ...]
    components: tuple[tuple[int, ...], ...]

    @property
    def n_components(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class NStar:
    """N >= 2 triads sharing one common passive (non-k3) wavevector."""

    center: WaveVector
    members: tuple[Triad, ...]

    @property
    def N(self) -> int:
        return len(self.members)


def _role(t: Triad, k: WaveVector) -> str:
    return "A" if k == t.k3 else "P"


def build_graph(triads: list[Triad]) -> TriadGraph:
    """Build the sharing graph over canonical, swap-deduplicated triads.

    One edge is recorded per shared vector per triad pair; connected
    components cover every node, singletons included.
    """
    nodes = tuple(triads)
    occurrences: dict[WaveVector, list[int]] = defaultdict(list)
    for idx, t in enumerate(nodes):
        for k in t.members:
            occurrences[k].append(idx)

    edges = []
    for k in sorted(occurrences, key=WaveVector.as_tuple):
        holders = occurrences[k]
        for a in range(len(holders)):
            for b in range(a + 1, len(holders)):
                i, j = holders[a], holders[b]
                edges.append(Edge(i, j, k, _role(nodes[i], k), _role(nodes[j], k)))
    edges.sort(key=lambda e: (e.i, e.j, e.shared.x, e.shared.y))

    # union-find over triad nodes
    parent = list(range(len(nodes)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in edges:
        ra, rb = find(e.i), find(e.j)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, list[int]] = defaultdict(list)
    for idx in range(len(nodes)):
        groups[find(idx)].append(idx)
    components = tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))

    return TriadGraph(nodes=nodes, edges=tuple(edges), components=components)


def find_nstars(triads: list[Triad]) -> list[NStar]:
    """All N-stars of a canonical triad list, sorted by N descending."""
    passive: dict[WaveVector, list[Triad]] = defaultdict(list)
    for t in triads:
        passive[t.k1].append(t)
        if t.k2 != t.k1:
            passive[t.k2].append(t)
    stars = [
        NStar(center=k, members=tuple(sorted(ms, key=Triad.sort_key)))
        for k, ms in passive.items()
        if len(ms) >= 2
    ]
    stars.sort(key=lambda s: (-s.N, s.center.x, s.center.y))
    return stars


@dataclass(frozen=True)
class ComponentSummary:
    """Per-component sizes, edge-type histograms, and global totals."""

    sizes: tuple[int, ...]
    edge_histograms: tuple[dict[str, int], ...]
    vector_counts: tuple[int, ...]
    total_edge_histogram: dict[str, int]
    total_vectors: int

    @property
    def n_components(self) -> int:
        return len(self.sizes)

    def rows(self) -> list[tuple[int, int, int, int, int, int]]:
        """(component, size, pp, ap, aa, vectors) rows."""
        out = []
        for c in range(self.n_components):
            h = self.edge_histograms[c]
            out.append(
                (c, self.sizes[c], h.get("PP", 0), h.get("AP", 0), h.get("AA", 0),
                 self.vector_counts[c])
            )
        return out


def component_stats(graph: TriadGraph) -> ComponentSummary:
    comp_of = {}
    for c, comp in enumerate(graph.components):
        for idx in comp:
            comp_of[idx] = c

    n = len(graph.components)
    hists: list[dict[str, int]] = [{} for _ in range(n)]
    total: dict[str, int] = {}
    for e in graph.edges:
        c = comp_of[e.i]
        hists[c][e.label] = hists[c].get(e.label, 0) + 1
        total[e.label] = total.get(e.label, 0) + 1

    vec_counts = []
    all_vectors = set()
    for comp in graph.components:
        vecs = set()
        for idx in comp:
            vecs.update(graph.nodes[idx].members)
        vec_counts.append(len(vecs))
        all_vectors.update(vecs)

    return ComponentSummary(
        sizes=tuple(len(c) for c in graph.components),
        edge_histograms=tuple(hists),
        vector_counts=tuple(vec_counts),
        total_edge_histogram=total,
        total_vectors=len(all_vectors),
    )
