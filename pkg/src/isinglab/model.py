"""Ferromagnetic Ising models and their exact desk-scale distributions.

A model is a WeightedGraph plus the Boltzmann weights it induces:
log weight(s) = sum_edges beta_uv s_u s_v + sum_v h_v s_v, with clamped
vertices frozen at their pin.  Exact computations enumerate all 2^n
configurations and are capped at EXACT_ENUM_CAP vertices; everything else
in the package is checked against them at that scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, SizeError
from .graph import WeightedGraph, graph_from_edges

EXACT_ENUM_CAP = 20


@dataclass(frozen=True)
class IsingModel:
    """A weighted graph together with its cached largest coupling."""

    graph: WeightedGraph
    beta_max: float

    @property
    def n(self) -> int:
        return self.graph.n


def make_model(g: WeightedGraph) -> IsingModel:
    return IsingModel(g, g.beta_max())


def spins_array(values) -> np.ndarray:
    s = np.asarray(values, dtype=np.int8)
    if not np.all(np.abs(s) == 1):
        raise ValueError("spins must be +1 or -1")
    return s


def respects_clamps(m: IsingModel, s: np.ndarray) -> bool:
    c = m.graph.clamp
    return bool(np.all((c == 0) | (s == c)))


def all_plus(m: IsingModel) -> np.ndarray:
    """All-up configuration, except where clamps dictate otherwise."""
    s = np.ones(m.n, dtype=np.int8)
    s[m.graph.clamp < 0] = -1
    return s


def all_minus(m: IsingModel) -> np.ndarray:
    s = np.full(m.n, -1, dtype=np.int8)
    s[m.graph.clamp > 0] = 1
    return s


def random_config(m: IsingModel, rng: np.random.Generator) -> np.ndarray:
    s = np.where(rng.random(m.n) < 0.5, 1, -1).astype(np.int8)
    c = m.graph.clamp
    s[c != 0] = c[c != 0]
    return s


def log_weight(m: IsingModel, s: np.ndarray) -> float:
    """Unnormalized log probability; -inf when a clamp is violated."""
    s = np.asarray(s)
    if s.shape != (m.n,):
        raise ValueError("configuration has wrong length")
    if not respects_clamps(m, s):
        return float("-inf")
    g = m.graph
    sf = s.astype(np.float64)
    # each edge appears twice in CSR, hence the half
    pair = 0.5 * float(sf @ _csr_matvec(g, sf))
    return pair + float(g.h @ sf)


def _csr_matvec(g: WeightedGraph, x: np.ndarray) -> np.ndarray:
    out = np.zeros(g.n)
    contrib = g.weights * x[g.indices]
    rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
    np.add.at(out, rows, contrib)
    return out


def local_field(m: IsingModel, s: np.ndarray, v: int) -> float:
    g = m.graph
    lo, hi = g.indptr[v], g.indptr[v + 1]
    return float(g.h[v] + g.weights[lo:hi] @ s[g.indices[lo:hi]].astype(np.float64))


def conditional_plus_prob(m: IsingModel, s: np.ndarray, v: int) -> float:
    """P(s_v = +1 | all other spins), the single-site heat-bath probability."""
    if m.graph.clamp[v] != 0:
        raise ConditioningError(f"vertex {v} is clamped")
    f = local_field(m, s, v)
    # logistic(2f), stable on both tails
    if f >= 0.0:
        return 1.0 / (1.0 + np.exp(-2.0 * f))
    e = np.exp(2.0 * f)
    return float(e / (1.0 + e))


# ---------------------------------------------------------------------------
# exact enumeration

@dataclass(frozen=True)
class ExactDistribution:
    """Probabilities over all 2^n configurations, bitmask-indexed.

    Bit v of the index is 1 exactly when s_v = +1, so vertex 0 is the
    least significant bit.  Configurations violating a clamp get mass 0.
    ``log_z`` is the log normalizer over clamp-respecting configurations;
    it is None for distributions that were built without one (e.g. the
    output law of a sampler).
    """

    n: int
    probs: np.ndarray
    log_z: float | None

    def prob_of(self, s: np.ndarray) -> float:
        return float(self.probs[config_index(s)])

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "log_z": self.log_z,
            "probs": [float(p) for p in self.probs],
        }


def exact_distribution_from_json(d: dict) -> ExactDistribution:
    probs = np.asarray(d["probs"], dtype=np.float64)
    return ExactDistribution(int(d["n"]), probs, d["log_z"])


def config_index(s: np.ndarray) -> int:
    """Bitmask index of a configuration (vertex 0 = least significant bit)."""
    idx = 0
    for v in range(len(s)):
        if s[v] > 0:
            idx |= 1 << v
    return idx


def index_config(idx: int, n: int) -> np.ndarray:
    s = np.empty(n, dtype=np.int8)
    for v in range(n):
        s[v] = 1 if (idx >> v) & 1 else -1
    return s


def _log_weights_table(m: IsingModel) -> tuple[np.ndarray, np.ndarray]:
    """(log weight, clamp-consistent) arrays over all 2^n bitmask states."""
    g = m.graph
    n = g.n
    if n > EXACT_ENUM_CAP:
        raise SizeError(f"exact enumeration capped at {EXACT_ENUM_CAP} vertices, got {n}")
    idx = np.arange(1 << n, dtype=np.int64)
    logw = np.zeros(1 << n)
    edges = g.edge_array()
    wts = g.edge_weights()
    for (u, v), b in zip(edges, wts):
        disagree = ((idx >> int(u)) ^ (idx >> int(v))) & 1
        logw += b * (1.0 - 2.0 * disagree)
    for v in range(n):
        sv = 2.0 * ((idx >> v) & 1) - 1.0
        logw += g.h[v] * sv
    ok = np.ones(1 << n, dtype=bool)
    for v in range(n):
        c = g.clamp[v]
        if c != 0:
            bit = (idx >> v) & 1
            ok &= bit == (1 if c > 0 else 0)
    return logw, ok


def exact_distribution(m: IsingModel) -> ExactDistribution:
    """Brute-force Boltzmann distribution with max-shifted normalization."""
    logw, ok = _log_weights_table(m)
    shift = logw[ok].max()
    mass = np.where(ok, np.exp(logw - shift), 0.0)
    z = mass.sum()
    return ExactDistribution(m.n, mass / z, float(shift + np.log(z)))


def merge_conditioning(m: IsingModel, cond: dict[int, int] | None) -> np.ndarray:
    """Clamps merged with extra conditioned spins, conflicts rejected."""
    pins = m.graph.clamp.copy()
    if cond:
        for v, val in cond.items():
            if not 0 <= v < m.n:
                raise ConditioningError(f"conditioned vertex {v} out of range")
            if val not in (-1, 1):
                raise ConditioningError(f"conditioned value must be +-1, got {val}")
            if pins[v] not in (0, val):
                raise ConditioningError(f"conditioning contradicts clamp at vertex {v}")
            pins[v] = val
    return pins


def exact_conditional_marginal(m: IsingModel, v: int, cond: dict[int, int] | None = None) -> float:
    """P(s_v = +1 | conditioned spins), by brute-force enumeration."""
    pins = merge_conditioning(m, cond)
    if pins[v] != 0:
        raise ConditioningError(f"query vertex {v} is pinned")
    logw, ok = _log_weights_table(m)
    idx = np.arange(1 << m.n, dtype=np.int64)
    for u in range(m.n):
        c = pins[u]
        if c != 0:
            ok &= ((idx >> u) & 1) == (1 if c > 0 else 0)
    if not ok.any():
        raise ConditioningError("conditioning event has probability zero")
    shift = logw[ok].max()
    mass = np.where(ok, np.exp(logw - shift), 0.0)
    num = mass[((idx >> v) & 1) == 1].sum()
    return float(num / mass.sum())


def tv_distance(p: ExactDistribution, q: ExactDistribution) -> float:
    if p.n != q.n:
        raise ValueError("distributions live on different spaces")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


# ---------------------------------------------------------------------------
# field clamping

def clamp_large_fields(m: IsingModel) -> IsingModel:
    """Pin every free vertex whose field exceeds 10 * beta_max * n in size.

    Pinned vertices (new and pre-existing) are detached: each incident
    coupling is absorbed into the neighbor's field as +-beta, and the edge
    is dropped.  This preserves the conditional law of the free spins
    exactly; it changes the unconditional law only by the mass of the
    pinned-away events, which is exponentially small when fields that
    large are present.
    """
    g = m.graph
    threshold = 10.0 * m.beta_max * g.n
    pins = g.clamp.copy()
    free = pins == 0
    pins[free & (g.h > threshold)] = 1
    pins[free & (g.h < -threshold)] = -1
    h = g.h.copy()
    edges = []
    ea = g.edge_array()
    ew = g.edge_weights()
    for (u, v), b in zip(ea, ew):
        pu, pv = pins[u], pins[v]
        if pu == 0 and pv == 0:
            edges.append((int(u), int(v), float(b)))
        elif pu != 0 and pv == 0:
            h[v] += pu * b
        elif pu == 0 and pv != 0:
            h[u] += pv * b
        # pinned-pinned edges contribute a constant and vanish
    out = graph_from_edges(g.n, edges, h=h, clamp=pins)
    bound = 100.0 * m.beta_max * g.n
    free_out = out.clamp == 0
    if m.beta_max > 0 and np.any(np.abs(out.h[free_out]) > bound):
        raise AssertionError("free field exceeded 100 * beta_max * n after clamping")
    return make_model(out)
