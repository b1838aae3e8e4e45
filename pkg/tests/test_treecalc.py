import math

import numpy as np
import pytest

from isinglab.graph import generate_galton_watson, make_rooted_tree
from isinglab.model import exact_conditional_marginal, make_model
from isinglab.rng import substream
from isinglab.treecalc import (
    boundary_influence,
    make_tree_model,
    root_field,
    root_marginal,
    tree_model_as_graph,
    two_point_influence,
    with_pins,
)


def chain_model(betas, h=None, clamp=None):
    n = len(betas) + 1
    tree = make_rooted_tree([-1] + list(range(n - 1)))
    return make_tree_model(tree, [0.0] + list(betas), h=h, clamp=clamp)


def test_single_edge_field():
    # root field from one free child: atanh(tanh(b) tanh(h_child))
    tm = chain_model([0.8], h=[0.0, 0.5])
    expect = math.atanh(math.tanh(0.8) * math.tanh(0.5))
    assert root_field(tm) == pytest.approx(expect, rel=1e-14)


def test_pinned_child_contributes_exactly_beta():
    tm = chain_model([0.8], h=[0.0, 123.0], clamp=[0, 1])
    assert root_field(tm) == pytest.approx(0.8, abs=0)
    tm = chain_model([0.8], h=[0.0, 123.0], clamp=[0, -1])
    assert root_field(tm) == pytest.approx(-0.8, abs=0)


def test_root_marginal_matches_enumeration():
    rng = substream(51, "treecalc-test")
    for trial in range(25):
        t = generate_galton_watson(2.0, 3, seed=300 + trial)
        if not 2 <= t.size <= 12:
            continue
        nn = t.size
        eb = rng.uniform(0.1, 1.2, size=nn)
        h = rng.uniform(-0.7, 0.7, size=nn)
        clamp = np.where(rng.random(nn) < 0.15, rng.choice([-1, 1], size=nn), 0).astype(np.int8)
        clamp[0] = 0
        tm = make_tree_model(t, eb, h=h, clamp=clamp)
        m = make_model(tree_model_as_graph(tm))
        assert root_marginal(tm) == pytest.approx(
            exact_conditional_marginal(m, 0), abs=1e-11
        )


def test_path_decay_product_identity():
    # field-free chain: end-to-end influence is the product of tanh(beta_i)
    rng = substream(52, "treecalc-decay")
    for length in (1, 2, 5, 9):
        betas = rng.uniform(0.1, 1.3, size=length)
        tm = chain_model(betas)
        infl = two_point_influence(tm, length)
        expect = float(np.prod(np.tanh(betas)))
        assert infl == pytest.approx(expect, abs=1e-13)


def test_screening_pin_blocks_influence():
    # pinning an interior node makes everything below it irrelevant
    tm = chain_model([0.9, 0.9, 0.9], clamp=[0, 0, 1, 0])
    base = root_marginal(tm)
    flipped = root_marginal(with_pins(tm, [3], 1))
    assert flipped == pytest.approx(base, abs=0)


def test_boundary_influence_sign_and_bound():
    rng = substream(53, "treecalc-bound")
    for trial in range(20):
        t = generate_galton_watson(2.0, 4, seed=640 + trial)
        if t.size < 3 or t.depth.max() < 2:
            continue
        depth = int(t.depth.max())
        eb = rng.uniform(0.2, 1.0, size=t.size)
        tm = make_tree_model(t, eb)
        infl = boundary_influence(tm, depth)
        sphere = int(np.count_nonzero(t.depth == depth))
        bound = sphere * math.tanh(float(eb[1:].max())) ** depth
        assert 0.0 <= infl <= bound + 1e-12


def test_two_point_influence_rejects_pinned_node():
    tm = chain_model([0.5], clamp=[0, 1])
    with pytest.raises(ValueError):
        two_point_influence(tm, 1)
