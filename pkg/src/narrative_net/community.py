"""Deterministic Louvain modularity optimization and community counts."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

from .errors import NoEdges, UnassignedNode
from .graph import SimpleGraph, build_graph, simple_projection, subgraph_by_coarse
from .taxonomy import CharacterNetwork, CoarseCategory

# guards against accepting moves whose gain is floating-point noise
_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class Partition:
    assignment: Mapping[str, int]
    modularity: float | None

    @property
    def count(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> list[list[str]]:
        groups: dict[int, list[str]] = defaultdict(list)
        for node in sorted(self.assignment):
            groups[self.assignment[node]].append(node)
        return [groups[c] for c in sorted(groups)]


def modularity(g: SimpleGraph, assignment: Mapping[str, int], resolution: float = 1.0) -> float:
    """Q = sum over communities of L_c/m - resolution * (d_c / 2m)^2."""
    m = g.m
    if m == 0:
        raise NoEdges()
    for v in g.nodes:
        if v not in assignment:
            raise UnassignedNode(v)
    inside: dict[int, int] = defaultdict(int)
    degree: dict[int, int] = defaultdict(int)
    for v in g.nodes:
        c = assignment[v]
        degree[c] += len(g.adj[v])
        inside[c] += sum(1 for w in g.adj[v] if assignment[w] == c)
    # inside counts each internal edge twice
    return sum(inside[c] / (2 * m) - resolution * (degree[c] / (2 * m)) ** 2 for c in degree)


def _dense(labels: list[int]) -> list[int]:
    remap: dict[int, int] = {}
    return [remap.setdefault(c, len(remap)) for c in labels]


class _Level:
    """Weighted graph on integer nodes; ``loops[i]`` is the self-loop weight."""

    def __init__(self, n: int, nbrs: list[dict[int, float]], loops: list[float]):
        self.n = n
        self.nbrs = nbrs
        self.loops = loops
        self.k = [sum(nbrs[i].values()) + 2 * loops[i] for i in range(n)]


def _move_nodes(level: _Level, m: float, resolution: float, on_move=None) -> tuple[list[int], bool]:
    comm = list(range(level.n))
    tot = list(level.k)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in range(level.n):
            ki = level.k[i]
            links: dict[int, float] = defaultdict(float)
            for j, w in level.nbrs[i].items():
                links[comm[j]] += w
            own = comm[i]
            tot[own] -= ki

            def gain(c):
                return links.get(c, 0.0) - resolution * tot[c] * ki / (2 * m)

            best, best_gain = own, gain(own)
            for c in sorted(links):
                g = gain(c)
                if g > best_gain + _MIN_GAIN:
                    best, best_gain = c, g
            tot[best] += ki
            if best != own:
                comm[i] = best
                improved = moved_any = True
                if on_move is not None:
                    on_move(i, comm)
    return _dense(comm), moved_any


def _aggregate(level: _Level, comm: list[int]) -> _Level:
    n = max(comm) + 1
    nbrs: list[dict[int, float]] = [defaultdict(float) for _ in range(n)]
    loops = [0.0] * n
    for i in range(level.n):
        ci = comm[i]
        loops[ci] += level.loops[i]
        for j, w in level.nbrs[i].items():
            cj = comm[j]
            if ci == cj:
                # internal edge seen from both endpoints
                loops[ci] += w / 2
            else:
                nbrs[ci][cj] += w
    return _Level(n, [dict(d) for d in nbrs], loops)


def louvain(g: SimpleGraph, resolution: float = 1.0, trace: list[float] | None = None) -> Partition:
    """Two-phase Louvain with nodes visited in ascending key order.

    If ``trace`` is given, the modularity of the induced partition of ``g``
    is appended after every accepted move.
    """
    nodes = list(g.nodes)
    if not nodes:
        return Partition({}, None)
    if g.m == 0:
        return Partition({v: i for i, v in enumerate(nodes)}, None)
    index = {v: i for i, v in enumerate(nodes)}
    level = _Level(
        len(nodes),
        [{index[w]: 1.0 for w in g.adj[v]} for v in nodes],
        [0.0] * len(nodes),
    )
    m = float(g.m)
    # membership of each original node in the current level's nodes
    member = list(range(len(nodes)))

    on_move = None
    if trace is not None:
        def on_move(_i, comm):
            trace.append(modularity(g, {v: comm[member[index[v]]] for v in nodes}, resolution))

    while True:
        comm, moved = _move_nodes(level, m, resolution, on_move)
        if not moved:
            break
        member = [comm[c] for c in member]
        level = _aggregate(level, comm)
    assignment = dict(zip(nodes, _dense(member)))
    return Partition(assignment, modularity(g, assignment, resolution))


def community_counts(net: CharacterNetwork) -> tuple[int, dict[str, int]]:
    """Louvain community count on the full graph and on each coarse subgraph."""
    full = build_graph(net)
    overall = louvain(simple_projection(full)).count
    by_type = {
        c.value: louvain(simple_projection(subgraph_by_coarse(full, c))).count for c in CoarseCategory
    }
    return overall, by_type


def partition_rows(net: CharacterNetwork) -> list[tuple[str, str, int, str]]:
    """(volume_id, node, community_id, scope) rows for full and per-type graphs."""
    full = build_graph(net)
    rows = []
    scopes = [("full", full)] + [(c.value, subgraph_by_coarse(full, c)) for c in CoarseCategory]
    for scope, graph in scopes:
        part = louvain(simple_projection(graph))
        for node in sorted(part.assignment):
            rows.append((net.volume_id, graph.labels.get(node, node), part.assignment[node], scope))
    return rows
