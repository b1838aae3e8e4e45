import json
import math

import numpy as np
import pytest

from isinglab.dynamics import UpdateStream
from isinglab.errors import SizeError
from isinglab.graph import cycle_graph, path_graph
from isinglab.model import exact_distribution, make_model, tv_distance
from isinglab.sampler import (
    algorithm1_output_law,
    algorithm1_sample,
    radius_for,
    sufficient_radius_factor,
    truncation_tv_bound,
)
from isinglab.verify import random_connected_model
from isinglab.rng import substream


def test_output_law_exact_at_full_radius():
    m = make_model(cycle_graph(7, 0.5))
    law = algorithm1_output_law(m, m.n + 1)
    assert tv_distance(law, exact_distribution(m)) <= 1e-9


def test_output_law_respects_truncation_bound():
    m = make_model(cycle_graph(8, 0.45))
    L = 2
    law = algorithm1_output_law(m, L)
    tv = tv_distance(law, exact_distribution(m))
    assert tv <= truncation_tv_bound(m, L) + 1e-9


def test_output_law_cap():
    m = make_model(path_graph(15, 0.2))
    with pytest.raises(SizeError):
        algorithm1_output_law(m, 3)


def test_sample_deterministic_and_json_stable():
    m = make_model(cycle_graph(6, 0.5))
    r1 = algorithm1_sample(m, 7, UpdateStream(m, 321, chain_id=0))
    r2 = algorithm1_sample(m, 7, UpdateStream(m, 321, chain_id=0))
    assert json.dumps(r1.to_json_dict(), sort_keys=True) == json.dumps(
        r2.to_json_dict(), sort_keys=True
    )
    r3 = algorithm1_sample(m, 7, UpdateStream(m, 321, chain_id=1))
    assert not np.array_equal(r1.spins, r3.spins) or not np.array_equal(r1.p, r3.p)


def test_sample_respects_clamps_and_order():
    g = cycle_graph(6, 0.5).with_vertex_data(clamp=[0, 1, 0, 0, -1, 0])
    m = make_model(g)
    run = algorithm1_sample(m, 7, UpdateStream(m, 8))
    assert run.spins[1] == 1 and run.spins[4] == -1
    assert run.order.tolist() == [0, 2, 3, 5]
    assert np.all(np.abs(run.spins) == 1)
    assert np.all((run.p > 0) & (run.p < 1))


def test_sample_frequencies_match_law():
    # empirical check on a tiny model: frequencies track the output law
    m = make_model(path_graph(3, 0.8))
    law = algorithm1_output_law(m, m.n + 1)
    counts = np.zeros(8)
    draws = 6000
    for k in range(draws):
        run = algorithm1_sample(m, m.n + 1, UpdateStream(m, 606, chain_id=k))
        idx = sum(1 << v for v in range(3) if run.spins[v] > 0)
        counts[idx] += 1
    emp = counts / draws
    assert 0.5 * np.abs(emp - law.probs).sum() <= 0.035


def test_truncation_bound_decreases_with_radius():
    m = make_model(cycle_graph(9, 0.6))
    bounds = [truncation_tv_bound(m, L) for L in (2, 3, 5, 7)]
    assert all(b >= 0 for b in bounds)
    assert all(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:]))
    assert truncation_tv_bound(m, m.n + 1) == 0.0


def test_radius_factor_math():
    f = sufficient_radius_factor(2.0, 0.2, 1.0)
    assert f == pytest.approx(2.0 / -math.log(2.0 * math.tanh(0.2)), rel=1e-12)
    with pytest.raises(ValueError):
        sufficient_radius_factor(2.0, 1.5, 1.0)  # 2 tanh(1.5) > 1
    assert radius_for(1000, f) == max(1, math.ceil(f * math.log(1000)))
    assert radius_for(1, 0.5) == 1


def test_sampler_on_random_models_matches_enumeration():
    rng = substream(81, "sampler-test")
    for trial in range(5):
        m = random_connected_model(rng, min_n=3, max_n=7, beta_hi=0.5)
        law = algorithm1_output_law(m, m.n + 1)
        assert tv_distance(law, exact_distribution(m)) <= 1e-8
