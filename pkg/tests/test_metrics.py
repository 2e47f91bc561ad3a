import itertools
import math
import random

import pytest

from conftest import net, rec
from oracles import (
    betweenness_by_paths,
    eigenvector_dense,
    random_connected_graph,
    random_graph,
    transitivity_by_triples,
)
from narrative_net.errors import EmptyGraph, NoConvergence, NoEdges, NoRecords
from narrative_net.graph import SimpleGraph
from narrative_net.metrics import (
    affinity_proportions,
    average_degree,
    betweenness_centrality,
    coarse_proportions,
    compute_metrics,
    connected_components,
    eigenvector_centrality,
    mediatedness,
    metric_columns,
    protagonism,
    star_edit_distance,
    transitivity,
)


def complete(n):
    return SimpleGraph.from_edges((f"k{a}", f"k{b}") for a, b in itertools.combinations(range(n), 2))


def path(n):
    return SimpleGraph.from_edges([(f"p{i}", f"p{i + 1}") for i in range(n - 1)], [f"p{i}" for i in range(n)])


def cycle(n):
    return SimpleGraph.from_edges([(f"c{i}", f"c{(i + 1) % n}") for i in range(n)])


def star(leaves):
    return SimpleGraph.from_edges([("hub", f"l{i}") for i in range(leaves)])


TRIANGLE = complete(3)
SINGLE = SimpleGraph.from_edges([], ["solo"])
BOWTIE = SimpleGraph.from_edges([("a", "b"), ("b", "c"), ("a", "c"), ("c", "d"), ("d", "e"), ("c", "e")])


def test_components():
    assert connected_components(SimpleGraph())[0] == 0
    assert connected_components(path(3))[0] == 1
    two = SimpleGraph.from_edges([("a", "b"), ("b", "c"), ("a", "c"), ("x", "y"), ("y", "z"), ("x", "z")])
    count, comp = connected_components(two)
    assert count == 2 and comp["a"] == comp["c"] != comp["x"]


def test_transitivity_examples():
    assert transitivity(TRIANGLE) == 1.0
    assert transitivity(path(3)) == 0.0
    assert transitivity(SimpleGraph()) == 0.0


def test_transitivity_oracle():
    rng = random.Random(1)
    for _ in range(100):
        g = random_graph(rng, 8)
        closed, triples = transitivity_by_triples(g)
        assert transitivity(g) == pytest.approx(closed / triples if triples else 0.0, abs=1e-12)


def test_average_degree():
    assert average_degree(TRIANGLE) == 2.0
    assert average_degree(star(4)) == 1.6
    assert average_degree(SINGLE) == 0.0
    with pytest.raises(EmptyGraph):
        average_degree(SimpleGraph())


def test_betweenness_examples():
    bc = betweenness_centrality(path(3))
    assert bc == {"p0": 0.0, "p1": 1.0, "p2": 0.0}
    assert len(set(betweenness_centrality(cycle(4)).values())) == 1
    assert betweenness_centrality(SimpleGraph.from_edges([("a", "b")])) == {"a": 0.0, "b": 0.0}


def test_betweenness_oracle():
    rng = random.Random(2)
    for _ in range(60):
        g = random_graph(rng, 7)
        ours, ref = betweenness_centrality(g), betweenness_by_paths(g)
        for v in g.nodes:
            assert ours[v] == pytest.approx(ref[v], abs=1e-9)


def test_eigenvector_examples():
    assert eigenvector_centrality(SINGLE) == {"solo": 1.0}
    vals = list(eigenvector_centrality(complete(5)).values())
    assert max(vals) - min(vals) < 1e-12
    ev = eigenvector_centrality(star(3))
    assert all(ev["hub"] > ev[f"l{i}"] for i in range(3))
    ref = eigenvector_dense(star(3))
    # exact dominant eigenvector of K_{1,3}: hub 1/sqrt(2), leaves 1/sqrt(6)
    assert ref["hub"] == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    for v in ev:
        assert ev[v] == pytest.approx(ref[v], abs=1e-6)


def test_eigenvector_oracle_random():
    rng = random.Random(3)
    for _ in range(40):
        g = random_graph(rng, 7)
        ours, ref = eigenvector_centrality(g), eigenvector_dense(g, 3000)
        assert sum(v * v for v in ours.values()) == pytest.approx(1.0)
        for v in g.nodes:
            assert ours[v] == pytest.approx(ref[v], abs=1e-6)


def test_eigenvector_no_convergence_reports_last_iterate():
    with pytest.raises(NoConvergence) as exc:
        eigenvector_centrality(path(7), max_iter=2)
    assert set(exc.value.last) == set(path(7).nodes)
    with pytest.raises(EmptyGraph):
        eigenvector_centrality(SimpleGraph())


def test_star_edit_distance_examples():
    assert star_edit_distance(star(5)) == (0, 0.0)
    assert star_edit_distance(TRIANGLE) == (1, 1 / 3)
    assert star_edit_distance(SINGLE) == (0, 0.0)
    with pytest.raises(EmptyGraph):
        star_edit_distance(SimpleGraph())


def test_protagonism():
    assert protagonism(star(6)) == 0.5
    assert protagonism(complete(4)) == 0.25
    assert protagonism(cycle(5)) == 0.2
    with pytest.raises(NoEdges):
        protagonism(SINGLE)


def test_mediatedness():
    assert mediatedness(complete(5)) == 0.0
    assert mediatedness(path(3)) == 1.0
    assert mediatedness(BOWTIE) == pytest.approx(max(betweenness_by_paths(BOWTIE).values()))
    assert mediatedness(BOWTIE) == pytest.approx(2 / 3)


def test_affinity_proportions(don_quixote):
    assert affinity_proportions(net("v", rec("A", "B"), rec("B", "C"))) == {
        "positive": 1.0, "negative": 0.0, "neutral": 0.0}
    mixed = net("v", rec("A", "B"), rec("B", "C"), rec("C", "D", affinity="negative"),
                rec("D", "E", affinity="neutral"))
    assert affinity_proportions(mixed) == {"positive": 0.5, "negative": 0.25, "neutral": 0.25}
    # counted by hand from the example block: 4 positive, 2 negative, 6 neutral
    assert affinity_proportions(don_quixote) == {"positive": 4 / 12, "negative": 2 / 12, "neutral": 6 / 12}
    with pytest.raises(NoRecords):
        affinity_proportions(net("v"))


def test_coarse_proportions(don_quixote):
    assert coarse_proportions(net("v", rec("A", "B"))) == {"social": 1.0, "professional": 0.0, "familial": 0.0}
    # fine labels of the example map to 9 social (friend x4, enemy x3, lovers,
    # unrequited love interest) and 3 professional (employer, colleague, employee)
    assert coarse_proportions(don_quixote) == {"social": 9 / 12, "professional": 3 / 12, "familial": 0.0}
    assert coarse_proportions(net("v", rec("A", "B", fine="aunt", coarse="familial"))) == {
        "social": 0.0, "professional": 0.0, "familial": 1.0}


def test_compute_metrics_empty():
    m = compute_metrics(net("v"))
    assert (m.node_count, m.edge_count, m.component_count, m.community_count_overall) == (0, 0, 0, 0)
    assert m.affinity_proportions is None and m.coarse_proportions is None
    assert m.transitivity is None
    row = m.flat()
    assert list(row) == metric_columns()
    assert row["affinity_proportions_positive"] is None


def test_compute_metrics_triangle():
    m = compute_metrics(net("v", rec("A", "B"), rec("B", "C"), rec("A", "C")))
    assert m.node_count == 3 and m.transitivity == 1.0
    assert m.coarse_proportions == {"social": 1.0, "professional": 0.0, "familial": 0.0}
    assert m.community_count_overall == 1
    assert m.community_counts_by_type == {"social": 1, "professional": 0, "familial": 0}


def test_compute_metrics_fixture_against_oracles():
    n = net("v",
            rec("A", "B", fine="husband"), rec("B", "C", fine="friend"), rec("A", "C", fine="enemy"),
            rec("C", "D", fine="employer"), rec("D", "E", fine="colleague"), rec("F", "G", fine="rivals"),
            rec("E", "H", fine="sister"))
    m = compute_metrics(n)
    g = SimpleGraph.from_edges([("a", "b"), ("b", "c"), ("a", "c"), ("c", "d"), ("d", "e"),
                                ("f", "g"), ("e", "h")])
    closed, triples = transitivity_by_triples(g)
    bc = betweenness_by_paths(g)
    ev = eigenvector_dense(g)
    degrees = [len(g.adj[v]) for v in g.nodes]
    assert (m.node_count, m.edge_count, m.component_count) == (8, 7, 2)
    assert m.transitivity == pytest.approx(closed / triples, abs=1e-12)
    assert m.average_degree == 2 * 7 / 8
    assert m.mean_betweenness == pytest.approx(sum(bc.values()) / 8, abs=1e-12)
    assert m.mediatedness == pytest.approx(max(bc.values()), abs=1e-12)
    assert m.mean_eigenvector == pytest.approx(sum(ev.values()) / 8, abs=1e-6)
    assert m.star_edit_distance == 8 + 7 - 2 * max(degrees) - 1
    assert m.protagonism == max(degrees) / 14


def test_metrics_permutation_invariant():
    rng = random.Random(4)
    letters = "ABCDEFGH"
    for _ in range(20):
        edges = {tuple(sorted(rng.sample(letters, 2))) for _ in range(rng.randint(1, 12))}
        perm = dict(zip(letters, rng.sample(letters, len(letters))))
        a = compute_metrics(net("v", *(rec(x, y) for x, y in sorted(edges)))).flat()
        b = compute_metrics(net("v", *(rec(perm[x], perm[y]) for x, y in sorted(edges)))).flat()
        for k in a:
            if isinstance(a[k], float):
                assert a[k] == pytest.approx(b[k], abs=1e-9), k
            elif k != "community_count_overall" and not k.startswith("community_counts"):
                assert a[k] == b[k], k


def test_fraction_ranges():
    rng = random.Random(5)
    for _ in range(30):
        g = random_connected_graph(rng, 7, 2)
        assert 0 <= transitivity(g) <= 1
        assert 0 <= mediatedness(g) <= 1
        assert 0 <= protagonism(g) <= 1
        assert star_edit_distance(g)[0] >= 0
