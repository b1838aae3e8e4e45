import io

import numpy as np
import pytest

from isinglab.errors import BudgetError
from isinglab.graph import (
    Ball,
    ball,
    bfs_spanning_tree,
    cycle_graph,
    generate_erdos_renyi,
    generate_galton_watson,
    graph_from_edges,
    graph_from_text,
    graph_to_text,
    make_rooted_tree,
    path_density,
    path_graph,
    read_graph,
    star_graph,
    tree_as_graph,
    tree_excess,
    tree_path_density,
    write_graph,
)
from isinglab.rng import substream


def test_graph_from_edges_validation():
    with pytest.raises(ValueError):
        graph_from_edges(3, [(0, 0, 1.0)])
    with pytest.raises(ValueError):
        graph_from_edges(3, [(0, 1, 1.0), (1, 0, 1.0)])
    with pytest.raises(ValueError):
        graph_from_edges(3, [(0, 3, 1.0)])
    with pytest.raises(ValueError):
        graph_from_edges(3, [(0, 1, -0.2)])


def test_csr_rows_sorted_and_symmetric():
    g = graph_from_edges(5, [(3, 4, 1.0), (0, 4, 2.0), (1, 3, 0.5), (0, 1, 0.25)])
    for v in range(g.n):
        row = g.indices[g.indptr[v]:g.indptr[v + 1]]
        assert np.all(np.diff(row) > 0)
    # half-edge weights agree in both directions
    w = {}
    for v in range(g.n):
        for j in range(g.indptr[v], g.indptr[v + 1]):
            w[(v, int(g.indices[j]))] = g.weights[j]
    for (u, v), weight in w.items():
        assert w[(v, u)] == weight


def test_file_round_trip(tmp_path):
    rng = substream(5, "graph-test")
    g = generate_erdos_renyi(30, 2.0, seed=4, beta=0.8)
    g = g.with_vertex_data(h=rng.uniform(-2, 2, size=g.n))
    path = tmp_path / "g.graph"
    write_graph(g, str(path), comment="round trip\nsecond line")
    back = read_graph(str(path))
    assert back.n == g.n
    assert np.array_equal(back.indptr, g.indptr)
    assert np.array_equal(back.indices, g.indices)
    assert np.array_equal(back.weights, g.weights)
    assert np.array_equal(back.h, g.h)
    # second serialization is byte-identical
    assert graph_to_text(back) == graph_to_text(g)


def test_text_round_trip_exact_floats():
    g = graph_from_edges(2, [(0, 1, 1 / 3)], h=[np.pi, -np.e])
    back = graph_from_text(graph_to_text(g))
    assert back.weights[0] == g.weights[0]
    assert np.array_equal(back.h, g.h)


def test_read_graph_rejects_garbage():
    with pytest.raises(ValueError):
        graph_from_text("not a header\n")
    with pytest.raises(ValueError):
        graph_from_text("2 1\n0 1 1.0\n0 0.0\n")  # missing a field line


def test_small_topologies():
    s = star_graph(4, 0.5)
    assert s.n == 5 and s.num_edges == 4
    assert s.degree(0) == 4
    p = path_graph(6)
    assert p.num_edges == 5
    c = cycle_graph(6)
    assert c.num_edges == 6
    assert all(c.degree(v) == 2 for v in range(6))


def test_er_graph_reproducible_and_sane():
    a = generate_erdos_renyi(500, 2.0, seed=9)
    b = generate_erdos_renyi(500, 2.0, seed=9)
    assert np.array_equal(a.indices, b.indices)
    assert a.num_edges != generate_erdos_renyi(500, 2.0, seed=10).num_edges
    # mean degree concentrates near d
    mean_deg = 2 * a.num_edges / a.n
    assert 1.6 < mean_deg < 2.4


def test_gw_tree_offspring_mean():
    sizes = []
    for k in range(300):
        t = generate_galton_watson(2.0, 3, seed=k)
        sizes.append(t.size)
    # E[size] = 1 + 2 + 4 + 8 = 15 at d=2, depth 3
    assert abs(np.mean(sizes) - 15.0) < 1.5


def test_ball_contents():
    g = path_graph(7)
    b = ball(g, 3, 2)
    assert sorted(b.vertices.tolist()) == [1, 2, 3, 4, 5]
    assert b.dist[b.local_of(3)] == 0
    assert sorted(b.sphere().tolist()) == [1, 5]
    assert b.subgraph.num_edges == 4  # induced path 1-2-3-4-5


def test_ball_induced_includes_chords():
    # square with a diagonal: radius-1 ball at 0 sees the induced triangle
    g = graph_from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1), (1, 3, 1)])
    b = ball(g, 0, 1)
    assert sorted(b.vertices.tolist()) == [0, 1, 3]
    assert b.subgraph.num_edges == 3
    assert tree_excess(b.subgraph) == 1


def test_excess_equals_nontree_edges():
    # cycle excess from edge counting vs from the spanning-tree extras
    rng = substream(17, "graph-test-excess")
    checked = 0
    for trial in range(100):
        n = int(rng.integers(30, 120))
        g = generate_erdos_renyi(n, 2.2, seed=1000 + trial, beta=0.3)
        v = int(rng.integers(0, n))
        r = int(rng.integers(1, 4))
        b = ball(g, v, r)
        tree, extras = bfs_spanning_tree(b)
        assert tree.size == b.vertices.size
        assert tree_excess(b.subgraph) == len(extras)
        checked += 1
    assert checked == 100


def test_path_density_matches_tree_density_on_trees():
    rng = substream(23, "graph-test-density")
    for k in range(20):
        t = generate_galton_watson(2.0, 4, seed=40 + k)
        if t.size < 2:
            continue
        g = tree_as_graph(t)
        b = ball(g, 0, int(t.depth.max()))
        tree, extras = bfs_spanning_tree(b)
        assert extras == []
        assert path_density(b) == tree_path_density(tree)


def test_path_density_budget():
    g = generate_erdos_renyi(200, 3.0, seed=2)
    b = ball(g, 0, 4)
    with pytest.raises(BudgetError):
        path_density(b, budget=10)


def test_tree_path_density_star_vs_path():
    # hub-heavy tree: the hub degree dominates any path through it
    star = make_rooted_tree([-1, 0, 0, 0, 0])
    assert tree_path_density(star) == 4 + 1
    chain = make_rooted_tree([-1, 0, 1, 2])
    assert tree_path_density(chain) == 1 + 2 + 2 + 1


def test_sphere_growth_bound_on_paths():
    # on a path every sphere has <= 2 vertices and density is small
    g = path_graph(30)
    for r in (1, 3, 5):
        b = ball(g, 15, r)
        assert b.sphere().size <= 2
