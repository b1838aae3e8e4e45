import numpy as np
import pytest

from isinglab.dynamics import (
    MATRIX_VERTEX_CAP,
    TV_THRESHOLD,
    UpdateStream,
    build_block_transition_matrix,
    build_transition_matrix,
    default_checkpoints,
    empirical_distribution,
    exact_mixing_time,
    monotone_coupled_run,
    run_chain,
    spectral_analysis,
)
from isinglab.errors import SizeError
from isinglab.graph import graph_from_edges, path_graph, star_graph
from isinglab.model import all_plus, exact_distribution, make_model, tv_distance
from isinglab.rng import substream
from isinglab.verify import random_connected_model


def test_update_stream_deterministic_and_batch_invariant():
    m = make_model(path_graph(6, 0.5))
    a = UpdateStream(m, 99, chain_id=3)
    b = UpdateStream(m, 99, chain_id=3)
    va, ua = a.next_updates(1000)
    # consume the same thousand pairs in ragged batches
    parts = [1, 7, 92, 400, 500]
    vs, us = [], []
    for k in parts:
        v, u = b.next_updates(k)
        vs.append(v)
        us.append(u)
    assert np.array_equal(va, np.concatenate(vs))
    assert np.array_equal(ua, np.concatenate(us))
    # a different chain id decorrelates
    c, uc = UpdateStream(m, 99, chain_id=4).next_updates(1000)
    assert not np.array_equal(ua, uc)


def test_update_stream_sites_are_free_vertices():
    g = path_graph(6, 0.5).with_vertex_data(clamp=[1, 0, 0, 0, 0, -1])
    m = make_model(g)
    stream = UpdateStream(m, 1)
    v, _ = stream.next_updates(500)
    assert set(np.unique(v)) <= {1, 2, 3, 4}


def test_run_chain_reaches_stationarity():
    m = make_model(path_graph(5, 0.6))
    stream = UpdateStream(m, 7)
    emp = empirical_distribution(m, all_plus(m), steps=400_000, thin=5, stream=stream)
    exact = exact_distribution(m)
    assert tv_distance(emp, exact) <= 0.01


def test_detailed_balance_of_transition_matrix():
    rng = substream(71, "dynamics-test")
    for _ in range(10):
        m = random_connected_model(rng, min_n=2, max_n=7)
        t = build_transition_matrix(m)
        assert t.reversible
        p = t.matrix
        pi = t.stationary
        flux = pi[:, None] * p - (pi[:, None] * p).T
        assert np.abs(flux).max() <= 1e-10
        assert np.allclose(pi @ p, pi, atol=1e-12)


def test_singleton_blocks_equal_single_site_matrix():
    rng = substream(72, "dynamics-blocks")
    for _ in range(5):
        m = random_connected_model(rng, min_n=3, max_n=6)
        free = [int(v) for v in m.graph.free_vertices()]
        t1 = build_transition_matrix(m)
        t2 = build_block_transition_matrix(m, [[v] for v in free])
        assert np.abs(t1.matrix - t2.matrix).max() <= 1e-12


def test_block_matrix_mixes_faster_than_single_site():
    m = make_model(path_graph(6, 0.8))
    t1 = build_transition_matrix(m)
    t2 = build_block_transition_matrix(m, [[0, 1, 2], [3, 4, 5]])
    _, r1 = spectral_analysis(t1)
    _, r2 = spectral_analysis(t2)
    assert r2 < r1


def test_matrix_vertex_cap():
    m = make_model(path_graph(MATRIX_VERTEX_CAP + 1, 0.2))
    with pytest.raises(SizeError):
        build_transition_matrix(m)


def test_exact_mixing_time_definition():
    m = make_model(star_graph(4, 0.7))
    t = build_transition_matrix(m)
    s = exact_mixing_time(t)
    from isinglab.dynamics import chain_tv_from_stationary

    assert chain_tv_from_stationary(t, np.linalg.matrix_power(t.matrix, s)) <= TV_THRESHOLD
    assert (
        chain_tv_from_stationary(t, np.linalg.matrix_power(t.matrix, s - 1))
        > TV_THRESHOLD
    )


def test_monotone_coupling_meets_and_audits():
    rng = substream(73, "dynamics-coupling")
    for trial in range(10):
        m = random_connected_model(rng, min_n=3, max_n=8, beta_hi=0.6)
        stream = UpdateStream(m, 500 + trial)
        res = monotone_coupled_run(m, 200_000, stream)
        assert res.coupled
        assert 1 <= res.steps <= 200_000
        assert res.checkpoints  # audit schedule was exercised


def test_coupling_result_reproducible():
    m = make_model(star_graph(6, 0.9))
    r1 = monotone_coupled_run(m, 100_000, UpdateStream(m, 12, chain_id=1))
    r2 = monotone_coupled_run(m, 100_000, UpdateStream(m, 12, chain_id=1))
    assert (r1.coupled, r1.steps) == (r2.coupled, r2.steps)


def test_coupling_json_shape():
    m = make_model(star_graph(4, 0.5))
    res = monotone_coupled_run(m, 50_000, UpdateStream(m, 2))
    d = res.to_json_dict(seed=3, n=5, d=4.0, beta=0.5)
    assert set(d) == {"seed", "n", "d", "beta", "coupled", "steps", "checkpoints"}
    assert d["coupled"] is True


def test_run_chain_deterministic():
    m = make_model(path_graph(6, 0.4))
    s = run_chain(m, all_plus(m), 1000, UpdateStream(m, 44, chain_id=0))
    t = run_chain(m, all_plus(m), 1000, UpdateStream(m, 44, chain_id=0))
    assert np.array_equal(s, t)


def test_default_checkpoints_geometric():
    pts = default_checkpoints(1000)
    assert pts[0] == 1
    assert pts[-1] == 1000
    assert all(b == 2 * a for a, b in zip(pts[:-2], pts[1:-1]))


def test_ferromagnetic_requirement():
    g = graph_from_edges(2, [(0, 1, 0.5)])
    m = make_model(g)
    stream = UpdateStream(m, 5)
    res = monotone_coupled_run(m, 10_000, stream)
    assert res.coupled
