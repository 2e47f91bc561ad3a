"""Typed multigraphs built from character networks, and their projections."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import SelfLoop
from .taxonomy import (
    Affinity,
    CharacterNetwork,
    CoarseCategory,
    FineCategory,
    coarse_of,
    normalize_name,
)


@dataclass(frozen=True)
class TypedEdge:
    a: str
    b: str
    affinity: Affinity
    fine: FineCategory

    @property
    def coarse(self) -> CoarseCategory:
        return coarse_of(self.fine)


@dataclass(frozen=True)
class TypedMultigraph:
    nodes: tuple[str, ...] = ()
    edges: tuple[TypedEdge, ...] = ()
    labels: Mapping[str, str] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected, unweighted graph; ``nodes`` is sorted and ``adj`` symmetric."""

    nodes: tuple[str, ...] = ()
    adj: Mapping[str, frozenset[str]] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]], nodes: Iterable[str] = ()) -> "SimpleGraph":
        adj: dict[str, set[str]] = {n: set() for n in nodes}
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        return cls(tuple(sorted(adj)), {n: frozenset(v) for n, v in adj.items()})

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return sum(len(v) for v in self.adj.values()) // 2

    def degree(self, node: str) -> int:
        return len(self.adj[node])

    def edges(self) -> list[tuple[str, str]]:
        return [(a, b) for a in self.nodes for b in sorted(self.adj[a]) if a < b]

    def relabel(self, mapping: Mapping[str, str]) -> "SimpleGraph":
        return SimpleGraph.from_edges(
            ((mapping[a], mapping[b]) for a, b in self.edges()), (mapping[n] for n in self.nodes)
        )


def build_graph(net: CharacterNetwork) -> TypedMultigraph:
    """One node per canonical character key, one typed edge per record."""
    labels: dict[str, str] = {}
    edges = []
    for rec in net.records:
        a, b = rec.pair_key
        if a == b:
            raise SelfLoop(net.volume_id, (rec.character_1, rec.character_2))
        for key, name in zip(rec.pair_key, sorted((rec.character_1, rec.character_2), key=normalize_name)):
            labels.setdefault(key, name)
        edges.append(TypedEdge(a, b, rec.affinity, rec.fine_category))
    return TypedMultigraph(tuple(sorted(labels)), tuple(edges), labels)


def simple_projection(g: TypedMultigraph | SimpleGraph) -> SimpleGraph:
    if isinstance(g, SimpleGraph):
        return g
    return SimpleGraph.from_edges(((e.a, e.b) for e in g.edges), g.nodes)


def subgraph_by_coarse(g: TypedMultigraph, category: CoarseCategory | str) -> TypedMultigraph:
    """Edges of one coarse category; nodes without such edges are excluded."""
    category = CoarseCategory(category)
    edges = tuple(e for e in g.edges if e.coarse is category)
    nodes = sorted({n for e in edges for n in (e.a, e.b)})
    return TypedMultigraph(tuple(nodes), edges, {n: g.labels.get(n, n) for n in nodes})


def edge_list_lines(g: TypedMultigraph) -> list[str]:
    """Tab-separated ``node_a node_b affinity fine_category`` lines."""
    return [
        f"{g.labels.get(e.a, e.a)}\t{g.labels.get(e.b, e.b)}\t{e.affinity.value}\t{e.fine.value}"
        for e in g.edges
    ]
