"""Sequential exact-marginal sampling through truncated walk trees.

Free vertices are visited in ascending order; each one is drawn from its
walk-tree marginal conditioned on everything already assigned (clamps
included), with trees truncated at a radius L.  At L >= n the output law
is exactly the Boltzmann law; below that, each step's truncation error is
bracketed by the free-boundary pinning gap, so the output law is within

    sum_i |boundary(v_i, L)| * tanh(beta_max)^L

of the target in total variation.  The radius needed for a prescribed
polynomial accuracy grows like a constant times log n; see
:func:`sufficient_radius_factor`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import UpdateStream
from .errors import SizeError
from .model import ExactDistribution, IsingModel
from .sawtree import DEFAULT_NODE_BUDGET, build_saw_tree, saw_marginal_from_tree

OUTPUT_LAW_VERTEX_CAP = 14


@dataclass(frozen=True)
class SamplerRun:
    """One draw of the sequential sampler, with its per-step audit trail."""

    depth_limit: int
    order: np.ndarray  # visit order (the free vertices, ascending)
    p: np.ndarray  # marginal used at each step
    spins: np.ndarray  # full configuration including clamped vertices
    saw_sizes: np.ndarray  # walk-tree node count at each step

    def to_json_dict(self) -> dict:
        return {
            "L": int(self.depth_limit),
            "order": [int(v) for v in self.order],
            "p": [float(x) for x in self.p],
            "spins": [int(s) for s in self.spins],
            "saw_sizes": [int(s) for s in self.saw_sizes],
        }


def algorithm1_sample(m: IsingModel, depth_limit: int, stream: UpdateStream,
                      max_nodes: int = DEFAULT_NODE_BUDGET) -> SamplerRun:
    """Draw one configuration by sequential walk-tree marginals."""
    free = m.graph.free_vertices()
    spins = m.graph.clamp.copy()
    order = free.copy()
    ps = np.empty(free.size)
    sizes = np.empty(free.size, dtype=np.int64)
    us = stream.next_uniforms(free.size)
    cond: dict[int, int] = {}
    for i, v in enumerate(free):
        st = build_saw_tree(m.graph, int(v), depth_limit, max_nodes=max_nodes)
        p = saw_marginal_from_tree(st, m, cond=cond)
        val = 1 if us[i] <= p else -1
        cond[int(v)] = val
        spins[v] = val
        ps[i] = p
        sizes[i] = st.size
    return SamplerRun(depth_limit, order, ps, spins, sizes)


def algorithm1_output_law(m: IsingModel, depth_limit: int,
                          max_nodes: int = DEFAULT_NODE_BUDGET) -> ExactDistribution:
    """Exact distribution of the sampler's output, by prefix enumeration.

    Walks the binary tree of assignments, multiplying each step's marginal;
    costs one walk-tree evaluation per internal prefix (2^k - 1 in total
    for k free vertices).
    """
    free = m.graph.free_vertices()
    k = free.size
    if m.n > OUTPUT_LAW_VERTEX_CAP:
        raise SizeError(f"output-law enumeration capped at {OUTPUT_LAW_VERTEX_CAP} vertices")
    probs = np.zeros(1 << m.n)
    base = 0
    for v in range(m.n):
        if m.graph.clamp[v] > 0:
            base |= 1 << v
    cond: dict[int, int] = {}

    def descend(i: int, mask: int, weight: float) -> None:
        if i == k:
            probs[mask] += weight
            return
        v = int(free[i])
        p = saw_marginal_from_tree(
            build_saw_tree(m.graph, v, depth_limit, max_nodes=max_nodes),
            m, cond=cond,
        )
        cond[v] = 1
        descend(i + 1, mask | (1 << v), weight * p)
        cond[v] = -1
        descend(i + 1, mask, weight * (1.0 - p))
        del cond[v]

    descend(0, base, 1.0)
    return ExactDistribution(m.n, probs, None)


def truncation_tv_bound(m: IsingModel, depth_limit: int,
                        max_nodes: int = DEFAULT_NODE_BUDGET) -> float:
    """Chained truncation bound: sum of boundary sizes times tanh(beta)^L."""
    decay = math.tanh(m.beta_max) ** depth_limit
    total = 0.0
    for v in m.graph.free_vertices():
        st = build_saw_tree(m.graph, int(v), depth_limit, max_nodes=max_nodes)
        total += st.boundary.size * decay
    return total


def sufficient_radius_factor(b: float, beta: float, gamma: float) -> float:
    """Radius-per-log-n factor giving an n^-gamma truncation error.

    Valid when b * tanh(beta) < 1, where b bounds the per-level growth of
    walk-tree boundaries; the walk-tree boundary term then decays like
    (b tanh beta)^L and L = factor * log n forces it below n^-gamma after
    the union over n chained steps.
    """
    if b < 1.0 or beta <= 0.0 or gamma <= 0.0:
        raise ValueError("need b >= 1, beta > 0, gamma > 0")
    rate = -math.log(b * math.tanh(beta))
    if rate <= 0.0:
        raise ValueError("b * tanh(beta) must be < 1 for radius to be sufficient")
    return (1.0 + gamma) / rate


def radius_for(n: int, factor: float) -> int:
    """Integer truncation radius factor * log n, rounded up (at least 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return max(1, math.ceil(factor * math.log(max(n, 2))))
