"""Per-network topology metrics and label proportions."""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import asdict, dataclass, field

from .community import community_counts
from .errors import EmptyGraph, NoConvergence, NoEdges, NoRecords
from .graph import SimpleGraph, build_graph, simple_projection
from .taxonomy import Affinity, CharacterNetwork, CoarseCategory, coarse_of


def connected_components(g: SimpleGraph) -> tuple[int, dict[str, int]]:
    """Component count and component id per node (ids follow sorted node order)."""
    comp: dict[str, int] = {}
    count = 0
    for start in g.nodes:
        if start in comp:
            continue
        comp[start] = count
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in g.adj[v]:
                if w not in comp:
                    comp[w] = count
                    queue.append(w)
        count += 1
    return count, comp


def transitivity(g: SimpleGraph) -> float:
    """3 * triangles / connected triples; 0.0 when there are no triples."""
    closed = 0
    triples = 0
    for v in g.nodes:
        nbrs = g.adj[v]
        d = len(nbrs)
        triples += d * (d - 1) // 2
        # each neighbor link counted twice here
        closed += sum(len(g.adj[u] & nbrs) for u in nbrs)
    if triples == 0:
        return 0.0
    return (closed / 2) / triples


def average_degree(g: SimpleGraph) -> float:
    if g.n == 0:
        raise EmptyGraph()
    return 2 * g.m / g.n


def max_degree(g: SimpleGraph) -> int:
    return max((len(v) for v in g.adj.values()), default=0)


def betweenness_centrality(g: SimpleGraph) -> dict[str, float]:
    """Normalized shortest-path betweenness (Brandes accumulation, undirected)."""
    cb = dict.fromkeys(g.nodes, 0.0)
    for s in g.nodes:
        stack = []
        preds: dict[str, list[str]] = {v: [] for v in g.nodes}
        sigma = dict.fromkeys(g.nodes, 0)
        sigma[s] = 1
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in sorted(g.adj[v]):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(g.nodes, 0.0)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    n = g.n
    if n < 3:
        return dict.fromkeys(g.nodes, 0.0)
    # each unordered pair was accumulated from both endpoints
    scale = 1.0 / ((n - 1) * (n - 2))
    return {v: c * scale for v, c in cb.items()}


def _power_iterate(nodes: list[str], g: SimpleGraph, tol: float, max_iter: int):
    # iterate with A + I: same dominant eigenvector, no oscillation on bipartite components
    x = dict.fromkeys(nodes, 1.0 / math.sqrt(len(nodes)))
    for _ in range(max_iter):
        y = {v: x[v] + sum(x[w] for w in g.adj[v]) for v in nodes}
        norm = math.sqrt(sum(val * val for val in y.values()))
        y = {v: val / norm for v, val in y.items()}
        if max(abs(y[v] - x[v]) for v in nodes) < tol:
            return y, True
        x = y
    return x, False


def eigenvector_centrality(g: SimpleGraph, tol: float = 1e-8, max_iter: int = 1000) -> dict[str, float]:
    """Per-component power iteration, concatenated and scaled to unit Euclidean norm.

    Raises NoConvergence carrying the last (normalized) iterate in ``last``.
    """
    if g.n == 0:
        raise EmptyGraph()
    count, comp = connected_components(g)
    members: list[list[str]] = [[] for _ in range(count)]
    for v in g.nodes:
        members[comp[v]].append(v)
    result: dict[str, float] = {}
    converged = True
    for nodes in members:
        vec, ok = _power_iterate(nodes, g, tol, max_iter)
        converged = converged and ok
        result.update(vec)
    norm = math.sqrt(sum(v * v for v in result.values()))
    result = {v: result[v] / norm for v in g.nodes}
    if not converged:
        raise NoConvergence(max_iter, result)
    return result


def star_edit_distance(g: SimpleGraph) -> tuple[int, float]:
    """Edits to reach a star centered on a max-degree node: |V| + |E| - 2*max_degree - 1."""
    if g.n == 0:
        raise EmptyGraph()
    raw = g.n + g.m - 2 * max_degree(g) - 1
    return raw, raw / g.n


def protagonism(g: SimpleGraph) -> float:
    """Share of all edge endpoints held by the best-connected character."""
    if g.m == 0:
        raise NoEdges()
    return max_degree(g) / (2 * g.m)


def mediatedness(g: SimpleGraph) -> float:
    """Largest normalized betweenness over characters."""
    if g.n == 0:
        raise EmptyGraph()
    return max(betweenness_centrality(g).values())


def affinity_proportions(net: CharacterNetwork) -> dict[str, float]:
    if not net.records:
        raise NoRecords()
    counts = Counter(r.affinity for r in net.records)
    return {a.value: counts[a] / len(net.records) for a in Affinity}


def coarse_proportions(net: CharacterNetwork) -> dict[str, float]:
    """Uses the coarse label implied by each fine label."""
    if not net.records:
        raise NoRecords()
    counts = Counter(coarse_of(r.fine_category) for r in net.records)
    return {c.value: counts[c] / len(net.records) for c in CoarseCategory}


@dataclass
class NetworkMetrics:
    volume_id: str
    node_count: int = 0
    edge_count: int = 0
    component_count: int = 0
    max_degree: int = 0
    transitivity: float | None = None
    average_degree: float | None = None
    mean_betweenness: float | None = None
    mean_eigenvector: float | None = None
    eigenvector_converged: bool | None = None
    star_edit_distance: int | None = None
    star_edit_distance_normalized: float | None = None
    protagonism: float | None = None
    mediatedness: float | None = None
    affinity_proportions: dict[str, float] | None = None
    coarse_proportions: dict[str, float] | None = None
    community_count_overall: int = 0
    community_counts_by_type: dict[str, int] = field(
        default_factory=lambda: {c.value: 0 for c in CoarseCategory}
    )

    def flat(self) -> dict[str, object]:
        """Single-level mapping; nested dicts become underscore-joined columns."""
        row: dict[str, object] = {}
        for name, value in asdict(self).items():
            if name in ("affinity_proportions", "coarse_proportions", "community_counts_by_type"):
                keys = Affinity if name == "affinity_proportions" else CoarseCategory
                for k in keys:
                    row[f"{name}_{k.value}"] = None if value is None else value[k.value]
            else:
                row[name] = value
        return row


def metric_columns() -> list[str]:
    return list(NetworkMetrics("").flat())


def compute_metrics(net: CharacterNetwork) -> NetworkMetrics:
    """Full metric vector; degenerate networks yield absent (None) fields."""
    out = NetworkMetrics(net.volume_id)
    g = simple_projection(build_graph(net))
    out.node_count, out.edge_count = g.n, g.m
    if net.records:
        out.affinity_proportions = affinity_proportions(net)
        out.coarse_proportions = coarse_proportions(net)
    if g.n == 0:
        return out
    out.component_count, _ = connected_components(g)
    out.max_degree = max_degree(g)
    out.transitivity = transitivity(g)
    out.average_degree = average_degree(g)
    bc = betweenness_centrality(g)
    out.mean_betweenness = sum(bc.values()) / g.n
    out.mediatedness = max(bc.values())
    try:
        ev = eigenvector_centrality(g)
        out.eigenvector_converged = True
    except NoConvergence as exc:
        ev = exc.last
        out.eigenvector_converged = False
    out.mean_eigenvector = sum(ev.values()) / g.n
    out.star_edit_distance, out.star_edit_distance_normalized = star_edit_distance(g)
    if g.m:
        out.protagonism = protagonism(g)
    out.community_count_overall, out.community_counts_by_type = community_counts(net)
    return out
