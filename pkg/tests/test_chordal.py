from __future__ import annotations

import itertools

import pytest

from kcutlab.chordal import chordal_extend, maximal_cliques, verify_chordal
from kcutlab.errors import InvalidPeo, NotChordal
from kcutlab.graph import Graph, complete_graph, cycle_graph, gen_instance, path_graph


def test_extend_examples():
    assert chordal_extend(complete_graph(3)).fill_edges == ()
    assert len(chordal_extend(cycle_graph(4)).fill_edges) == 1
    # a triangulated hexagon has n - 3 = 3 chords
    assert len(chordal_extend(cycle_graph(6)).fill_edges) == 3


@pytest.mark.parametrize("n", range(4, 10))
def test_cycle_fill_count(n):
    assert len(chordal_extend(cycle_graph(n)).fill_edges) == n - 3


def test_verify_examples():
    verify_chordal(complete_graph(4))
    with pytest.raises(NotChordal) as exc:
        verify_chordal(cycle_graph(4))
    assert sorted(exc.value.witness) == [0, 1, 2, 3]
    verify_chordal(Graph.from_edges(4, list(cycle_graph(4).edges) + [(0, 2, 1.0)]))


def _is_chordless_cycle(g, cyc):
    if len(cyc) < 4 or len(set(cyc)) != len(cyc):
        return False
    L = len(cyc)
    for i, j in itertools.combinations(range(L), 2):
        adjacent_in_cycle = (j - i) in (1, L - 1)
        if g.has_edge(cyc[i], cyc[j]) != adjacent_in_cycle:
            return False
    return True


def test_witness_is_chordless_cycle():
    for seed in range(60):
        g = gen_instance("random", {"n": 8, "p": 0.35}, seed)
        try:
            verify_chordal(g)
        except NotChordal as exc:
            assert _is_chordless_cycle(g, exc.witness), exc.witness


def test_maximal_cliques_examples():
    p4 = path_graph(4)
    assert maximal_cliques(p4, verify_chordal(p4)) == ((0, 1), (1, 2), (2, 3))
    k4 = complete_graph(4)
    assert maximal_cliques(k4, verify_chordal(k4)) == ((0, 1, 2, 3),)
    g = Graph.from_edges(4, list(cycle_graph(4).edges) + [(0, 2, 1.0)])
    assert maximal_cliques(g, verify_chordal(g)) == ((0, 1, 2), (0, 2, 3))
    with pytest.raises(InvalidPeo):
        maximal_cliques(cycle_graph(4), [0, 1, 2, 3])
    with pytest.raises(InvalidPeo):
        maximal_cliques(p4, [0, 1, 2])


def test_random_extensions():
    for seed in range(200):
        n = 2 + seed % 8
        g = gen_instance("random", {"n": n, "p": [0.2, 0.4, 0.6, 0.9][seed % 4]}, seed)
        info = chordal_extend(g)
        h = info.graph
        verify_chordal(h)
        assert len(info.maximal_cliques) <= n
        covered = {p for c in info.maximal_cliques for p in itertools.combinations(c, 2)}
        assert set(info.edge_pairs) <= covered
        for c in info.maximal_cliques:
            assert all(h.has_edge(a, b) for a, b in itertools.combinations(c, 2))
        for a, b in itertools.permutations(info.maximal_cliques, 2):
            assert not set(a) <= set(b)
        for u, v, w in g.edges:
            assert h.has_edge(u, v)
        assert all(w == 0.0 for u, v, w in h.edges if not g.has_edge(u, v))


def test_all_graphs_on_five_vertices():
    pairs = list(itertools.combinations(range(5), 2))
    for mask in range(1 << len(pairs)):
        edges = [(u, v, 1.0) for i, (u, v) in enumerate(pairs) if mask >> i & 1]
        verify_chordal(chordal_extend(Graph.from_edges(5, edges)).graph)
