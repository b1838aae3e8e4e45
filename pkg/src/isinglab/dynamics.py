"""Single-site heat-bath dynamics, monotone coupling and exact spectra.

The chain picks a uniformly random free vertex and redraws it from its
conditional; clamped vertices never move.  Two chains sharing one update
stream form the standard monotone coupling: for cooperative couplings the
coordinatewise order of configurations is preserved, so the all-up and
all-down chains sandwich every other start and their meeting time bounds
mixing from above.

Desk-scale tools build the full transition matrix over the free spins,
extract the spectral gap via the symmetrized form, and locate the exact
mixing time at total-variation threshold 1/(2e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import MonotonicityError, SizeError
from .model import (
    ExactDistribution,
    IsingModel,
    all_minus,
    all_plus,
    respects_clamps,
    spins_array,
)
from .rng import substream

MATRIX_VERTEX_CAP = 10
TV_THRESHOLD = 1.0 / (2.0 * math.e)
BLOCK_SIZE_CAP = 20
_STEP_BLOCK = 1 << 16
_POST_COUPLING_AUDIT = 1024


class UpdateStream:
    """Deterministic stream of (site, uniform) update pairs.

    Pair t is a pure function of (master seed, chain id, t): each pair
    consumes exactly two Philox doubles, so the sequence does not depend
    on how consumers batch their draws.  The site is uniform over the
    model's free vertices via floor(u * count), whose bias at double
    resolution is far below anything resolvable here; the second double
    is the threshold uniform on [0, 1).
    """

    def __init__(self, m: IsingModel, master_seed: int, chain_id: int = 0):
        self.free = m.graph.free_vertices()
        if self.free.size == 0:
            raise ValueError("model has no free vertices")
        self.master_seed = int(master_seed)
        self.chain_id = int(chain_id)
        self.counter = 0
        self._rng = substream(master_seed, "glauber-updates", chain_id)

    def next_updates(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """The next ``count`` (site, uniform) pairs."""
        w = self._rng.random((count, 2))
        sites = self.free[(w[:, 0] * self.free.size).astype(np.int64)]
        self.counter += count
        return sites, np.ascontiguousarray(w[:, 1])

    def next_uniforms(self, count: int) -> np.ndarray:
        """Threshold uniforms only; consumes whole pairs to stay aligned."""
        _, us = self.next_updates(count)
        return us


def glauber_step(m: IsingModel, s: np.ndarray, v: int, u: float) -> np.ndarray:
    """One heat-bath update of site v driven by uniform u; returns a copy."""
    if m.graph.clamp[v] != 0:
        raise ValueError(f"vertex {v} is clamped")
    out = spins_array(s).copy()
    g = m.graph
    kernels.chain_steps(
        g.indptr, g.indices, g.weights, g.h, out,
        np.array([v], dtype=np.int64), np.array([u], dtype=np.float64),
    )
    return out


def run_chain(m: IsingModel, s0: np.ndarray, steps: int, stream: UpdateStream) -> np.ndarray:
    """Advance a chain ``steps`` updates from s0; returns the final state."""
    s = spins_array(s0).copy()
    if not respects_clamps(m, s):
        raise ValueError("initial configuration violates a clamp")
    g = m.graph
    done = 0
    while done < steps:
        k = min(_STEP_BLOCK, steps - done)
        vs, us = stream.next_updates(k)
        kernels.chain_steps(g.indptr, g.indices, g.weights, g.h, s, vs, us)
        done += k
    return s


def empirical_distribution(m: IsingModel, s0: np.ndarray, steps: int, thin: int,
                           stream: UpdateStream) -> ExactDistribution:
    """Occupation frequencies of the chain, thinned, as a distribution.

    Counts the configuration bitmask every ``thin`` updates; n is capped
    at 20 by the counts table.
    """
    if m.n > 20:
        raise SizeError("occupation counts capped at 20 vertices")
    if thin < 1:
        raise ValueError("thin must be >= 1")
    s = spins_array(s0).copy()
    if not respects_clamps(m, s):
        raise ValueError("initial configuration violates a clamp")
    g = m.graph
    counts = np.zeros(1 << m.n, dtype=np.int64)
    done = 0
    while done < steps:
        k = min(_STEP_BLOCK, steps - done)
        vs, us = stream.next_updates(k)
        kernels.chain_steps_counted(
            g.indptr, g.indices, g.weights, g.h, s, vs, us, thin, counts,
        )
        done += k
    total = counts.sum()
    if total == 0:
        raise ValueError("no samples recorded; steps < thin")
    return ExactDistribution(m.n, counts / total, None)


@dataclass(frozen=True)
class CouplingResult:
    """Outcome of one monotone coupled run."""

    coupled: bool
    steps: int  # first-agreement step (1-based) if coupled, else the cap
    cap: int
    checkpoints: list[tuple[int, int]]  # (step, Hamming distance)

    def to_json_dict(self, *, seed: int, n: int, d: float, beta: float) -> dict:
        return {
            "seed": int(seed),
            "n": int(n),
            "d": float(d),
            "beta": float(beta),
            "coupled": bool(self.coupled),
            "steps": int(self.steps),
            "checkpoints": [[int(t), int(hd)] for t, hd in self.checkpoints],
        }


def default_checkpoints(cap: int) -> list[int]:
    """Geometric audit schedule 1, 2, 4, ... capped at ``cap``."""
    points = []
    t = 1
    while t < cap:
        points.append(t)
        t *= 2
    points.append(cap)
    return points


def monotone_coupled_run(m: IsingModel, cap: int, stream: UpdateStream,
                         checkpoints: list[int] | None = None) -> CouplingResult:
    """Run the all-up and all-down chains on one stream until they meet.

    Every update asserts the order at the rewritten site; every checkpoint
    audits the full coordinatewise order and records the Hamming distance.
    After the chains meet, a short continuation asserts they never split.
    Raises MonotonicityError when the order breaks (it cannot, for
    cooperative couplings).
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    upper = all_plus(m)
    lower = all_minus(m)
    g = m.graph
    ham = int(np.count_nonzero(upper != lower))
    if checkpoints is None:
        checkpoints = default_checkpoints(cap)
    marks = sorted({int(t) for t in checkpoints if 1 <= t <= cap})
    recorded: list[tuple[int, int]] = []
    done = 0
    met_at = -1
    mark_i = 0
    while done < cap and met_at < 0:
        horizon = marks[mark_i] if mark_i < len(marks) else cap
        k = min(_STEP_BLOCK, horizon - done)
        vs, us = stream.next_updates(k)
        ham, coupled_at, violation = kernels.coupled_steps(
            g.indptr, g.indices, g.weights, g.h, upper, lower, vs, us, ham,
        )
        if violation >= 0:
            raise MonotonicityError(
                f"order violated at step {done + violation + 1}"
            )
        if coupled_at >= 0:
            met_at = done + coupled_at + 1
        done += k
        if mark_i < len(marks) and done == marks[mark_i]:
            if np.any(upper < lower):
                raise MonotonicityError(f"order violated at checkpoint {done}")
            recorded.append((done, int(ham)))
            mark_i += 1
    if met_at >= 0:
        vs, us = stream.next_updates(_POST_COUPLING_AUDIT)
        ham2, _, violation = kernels.coupled_steps(
            g.indptr, g.indices, g.weights, g.h, upper, lower, vs, us, 0,
        )
        if violation >= 0 or ham2 != 0:
            raise MonotonicityError("met chains split during post-meeting audit")
        return CouplingResult(True, met_at, cap, recorded)
    return CouplingResult(False, cap, cap, recorded)


# ---------------------------------------------------------------------------
# block dynamics

def _check_blocks(m: IsingModel, blocks: list[list[int]]) -> list[np.ndarray]:
    free = set(int(v) for v in m.graph.free_vertices())
    covered: set[int] = set()
    out = []
    for bl in blocks:
        arr = np.array(sorted(int(v) for v in bl), dtype=np.int64)
        if arr.size == 0 or arr.size > BLOCK_SIZE_CAP:
            raise ValueError(f"block size must be in 1..{BLOCK_SIZE_CAP}")
        if len(set(arr.tolist())) != arr.size:
            raise ValueError("block repeats a vertex")
        if not set(arr.tolist()) <= free:
            raise ValueError("blocks may contain only free vertices")
        covered |= set(arr.tolist())
        out.append(arr)
    if covered != free:
        raise ValueError("blocks must cover every free vertex")
    return out


def _block_conditional(m: IsingModel, s: np.ndarray, block: np.ndarray) -> np.ndarray:
    """Probabilities over the 2^|block| joint states of a block, given the rest."""
    g = m.graph
    k = block.size
    states = np.arange(1 << k, dtype=np.int64)
    logw = np.zeros(1 << k)
    inside = np.full(g.n, -1, dtype=np.int64)
    inside[block] = np.arange(k)
    for pos, v in enumerate(block):
        sv = 2.0 * ((states >> pos) & 1) - 1.0
        f_out = g.h[v]
        nbrs, wts = g.neighbors(int(v))
        for x, b in zip(nbrs, wts):
            x = int(x)
            if inside[x] >= 0:
                if inside[x] > pos:  # count internal edges once
                    sx = 2.0 * ((states >> inside[x]) & 1) - 1.0
                    logw += b * sv * sx
            else:
                f_out += b * s[x]
        logw += f_out * sv
    logw -= logw.max()
    p = np.exp(logw)
    return p / p.sum()


def block_dynamics_step(m: IsingModel, s: np.ndarray, blocks: list[list[int]],
                        which: int, u: float) -> np.ndarray:
    """Resample one block from its exact conditional; returns a copy.

    The new joint state is read off the conditional's CDF at ``u``.
    """
    checked = _check_blocks(m, blocks)
    block = checked[which]
    s = spins_array(s).copy()
    p = _block_conditional(m, s, block)
    state = int(np.searchsorted(np.cumsum(p), u, side="right"))
    state = min(state, p.size - 1)
    for pos, v in enumerate(block):
        s[v] = 1 if (state >> pos) & 1 else -1
    return s


# ---------------------------------------------------------------------------
# exact spectra

@dataclass(frozen=True)
class TransitionMatrix:
    """Dense transition matrix over the model's free spins.

    States index the free vertices' spins as bits (free_vertices[i] is bit
    i, bit 1 = spin +1); clamped vertices stay at their pins inside every
    state.  ``stationary`` is the Boltzmann law restricted the same way.
    """

    matrix: np.ndarray
    stationary: np.ndarray
    free_vertices: np.ndarray
    reversible: bool


def _state_spins(m: IsingModel, free: np.ndarray) -> np.ndarray:
    """(2^k, n) array of full configurations, one per free-spin state."""
    k = free.size
    states = np.arange(1 << k, dtype=np.int64)
    s = np.tile(m.graph.clamp.astype(np.float64), (1 << k, 1))
    for i, v in enumerate(free):
        s[:, v] = 2.0 * ((states >> i) & 1) - 1.0
    return s


def _dense_couplings(m: IsingModel) -> np.ndarray:
    g = m.graph
    w = np.zeros((g.n, g.n))
    rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
    w[rows, g.indices] = g.weights
    return w


def build_transition_matrix(m: IsingModel) -> TransitionMatrix:
    """Exact single-site dynamics matrix; capped at MATRIX_VERTEX_CAP vertices."""
    if m.n > MATRIX_VERTEX_CAP:
        raise SizeError(f"transition matrix capped at {MATRIX_VERTEX_CAP} vertices")
    free = m.graph.free_vertices()
    k = free.size
    if k == 0:
        raise ValueError("model has no free vertices")
    spins = _state_spins(m, free)
    w = _dense_couplings(m)
    fields = spins @ w + m.graph.h  # (2^k, n)
    p_plus = 1.0 / (1.0 + np.exp(-2.0 * fields))
    size = 1 << k
    mat = np.zeros((size, size))
    states = np.arange(size)
    for i, v in enumerate(free):
        target = states ^ (1 << i)
        bit_up = ((states >> i) & 1) == 1
        flip_prob = np.where(bit_up, 1.0 - p_plus[:, v], p_plus[:, v])
        mat[states, target] += flip_prob / k
    mat[states, states] += 1.0 - mat.sum(axis=1)
    stationary = _stationary_slice(m, spins)
    flux = stationary[:, None] * mat
    reversible = bool(np.abs(flux - flux.T).max() <= 1e-10)
    return TransitionMatrix(mat, stationary, free, reversible)


def _stationary_slice(m: IsingModel, spins: np.ndarray) -> np.ndarray:
    g = m.graph
    w = _dense_couplings(m)
    pair = 0.5 * np.einsum("si,ij,sj->s", spins, w, spins)
    logw = pair + spins @ g.h
    logw -= logw.max()
    mass = np.exp(logw)
    return mass / mass.sum()


def build_block_transition_matrix(m: IsingModel, blocks: list[list[int]]) -> TransitionMatrix:
    """Exact matrix of uniform-random-block resampling dynamics."""
    if m.n > MATRIX_VERTEX_CAP:
        raise SizeError(f"transition matrix capped at {MATRIX_VERTEX_CAP} vertices")
    checked = _check_blocks(m, blocks)
    free = m.graph.free_vertices()
    k = free.size
    size = 1 << k
    pos_of = {int(v): i for i, v in enumerate(free)}
    spins = _state_spins(m, free)
    stationary = _stationary_slice(m, spins)
    mat = np.zeros((size, size))
    for block in checked:
        bits = np.array([pos_of[int(v)] for v in block], dtype=np.int64)
        mask = 0
        for b in bits:
            mask |= 1 << int(b)
        groups: dict[int, list[int]] = {}
        for s in range(size):
            groups.setdefault(s & ~mask, []).append(s)
        for members in groups.values():
            idx = np.array(members, dtype=np.int64)
            pi = stationary[idx]
            total = pi.sum()
            if total <= 0.0:
                raise ValueError("degenerate conditional in block dynamics")
            mat[np.ix_(idx, idx)] += pi / total
    mat /= len(checked)
    flux = stationary[:, None] * mat
    reversible = bool(np.abs(flux - flux.T).max() <= 1e-10)
    return TransitionMatrix(mat, stationary, free, reversible)


def spectral_analysis(t: TransitionMatrix) -> tuple[float, float]:
    """(spectral gap, relaxation time) of a reversible transition matrix.

    The gap is min(1 - second eigenvalue, 1 - |most negative eigenvalue|)
    of the similarity-symmetrized matrix; relaxation time is its inverse,
    in units of single transitions.
    """
    if not t.reversible:
        raise ValueError("spectral analysis requires a reversible matrix")
    root = np.sqrt(t.stationary)
    sym = t.matrix * (root[:, None] / root[None, :])
    sym = 0.5 * (sym + sym.T)
    ev = np.linalg.eigvalsh(sym)
    lam2 = ev[-2] if ev.size >= 2 else -1.0
    lam_min = ev[0]
    gap = min(1.0 - lam2, 1.0 - abs(lam_min))
    if gap <= 0.0:
        raise ValueError("nonpositive spectral gap; chain too slow to resolve")
    return float(gap), float(1.0 / gap)


def chain_tv_from_stationary(t: TransitionMatrix, power: np.ndarray) -> float:
    """Worst-start total variation between P^s rows and the stationary law."""
    return float(0.5 * np.abs(power - t.stationary).sum(axis=1).max())


def exact_mixing_time(t: TransitionMatrix, threshold: float = TV_THRESHOLD,
                      step_cap: int = 10**9) -> int:
    """Smallest s with worst-start TV(P^s, stationary) <= threshold.

    Worst-start TV is nonincreasing in s, so a doubling sweep followed by
    a binary search on cached powers locates the crossing exactly.
    """
    mat = t.matrix
    powers = {1: mat}
    s = 1
    while chain_tv_from_stationary(t, powers[s]) > threshold:
        nxt = powers[s] @ powers[s]
        s *= 2
        powers[s] = nxt
        if s > step_cap:
            raise SizeError(f"mixing time exceeds step cap {step_cap}")
    if s == 1:
        return 1
    lo, hi = s // 2, s  # tv(lo) > threshold >= tv(hi)

    def power_of(e: int) -> np.ndarray:
        out = None
        b = 1
        while e:
            if e & 1:
                out = powers[b] if out is None else out @ powers[b]
            e >>= 1
            b *= 2
        return out

    while hi - lo > 1:
        mid = (lo + hi) // 2
        if chain_tv_from_stationary(t, power_of(mid)) > threshold:
            lo = mid
        else:
            hi = mid
    return hi
