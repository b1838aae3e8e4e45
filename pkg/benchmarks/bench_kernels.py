"""Timing comparison of the compiled and pure-Python kernel paths.

Run directly:  python3 benchmarks/bench_kernels.py [--steps N]

Each kernel is timed on a representative workload with both backends;
the pure path runs a scaled-down load and the table reports normalized
per-operation times plus the speedup.  Compilation happens in a warmup
call, so jit latency is excluded.
"""

import argparse
import time

import numpy as np

from isinglab import kernels
from isinglab.graph import generate_erdos_renyi, generate_galton_watson
from isinglab.model import make_model
from isinglab.rng import substream


def time_call(fn, *args, reps=3):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(steps: int) -> None:
    rng = substream(12345, "bench")
    g = generate_erdos_renyi(2000, 2.0, seed=1, beta=0.4)
    m = make_model(g)
    compiled = kernels.compiled_variants()
    pure = kernels.python_variants()
    if compiled is None:
        print("numba unavailable; nothing to compare")
        return

    py_steps = max(steps // 20, 1)
    rows = []

    def add_row(name, comp_time, comp_ops, py_time, py_ops):
        per_c = comp_time / comp_ops
        per_p = py_time / py_ops
        rows.append((name, per_c * 1e9, per_p * 1e9, per_p / per_c))

    # single-chain updates
    spins = np.ones(g.n, dtype=np.int8)
    v_arr = rng.integers(0, g.n, size=steps)
    u_arr = rng.random(steps)
    compiled["chain_steps"](g.indptr, g.indices, g.weights, g.h,
                            spins.copy(), v_arr[:100], u_arr[:100])  # warmup
    tc = time_call(compiled["chain_steps"], g.indptr, g.indices, g.weights,
                   g.h, spins.copy(), v_arr, u_arr)
    tp = time_call(pure["chain_steps"], g.indptr, g.indices, g.weights,
                   g.h, spins.copy(), v_arr[:py_steps], u_arr[:py_steps])
    add_row("chain_steps", tc, steps, tp, py_steps)

    # counted chain on a small model
    gs = generate_erdos_renyi(12, 2.0, seed=2, beta=0.4)
    counts = np.zeros(1 << gs.n, dtype=np.int64)
    vs = rng.integers(0, gs.n, size=steps)
    us = rng.random(steps)
    s0 = np.ones(gs.n, dtype=np.int8)
    compiled["chain_steps_counted"](gs.indptr, gs.indices, gs.weights, gs.h,
                                    s0.copy(), vs[:100], us[:100], 2, counts)
    tc = time_call(compiled["chain_steps_counted"], gs.indptr, gs.indices,
                   gs.weights, gs.h, s0.copy(), vs, us, 2, counts)
    tp = time_call(pure["chain_steps_counted"], gs.indptr, gs.indices,
                   gs.weights, gs.h, s0.copy(), vs[:py_steps], us[:py_steps],
                   2, counts)
    add_row("chain_steps_counted", tc, steps, tp, py_steps)

    # coupled pair of chains
    up = np.ones(g.n, dtype=np.int8)
    lo = -np.ones(g.n, dtype=np.int8)
    compiled["coupled_steps"](g.indptr, g.indices, g.weights, g.h,
                              up.copy(), lo.copy(), v_arr[:100], u_arr[:100], g.n)
    tc = time_call(compiled["coupled_steps"], g.indptr, g.indices, g.weights,
                   g.h, up.copy(), lo.copy(), v_arr, u_arr, g.n)
    tp = time_call(pure["coupled_steps"], g.indptr, g.indices, g.weights,
                   g.h, up.copy(), lo.copy(), v_arr[:py_steps],
                   u_arr[:py_steps], g.n)
    add_row("coupled_steps", tc, steps, tp, py_steps)

    # tree fold on a deep branching tree
    tree = generate_galton_watson(2.0, 16, seed=3)
    nn = tree.size
    eb = rng.uniform(0.2, 1.0, size=nn)
    h = rng.uniform(-0.5, 0.5, size=nn)
    clamp = np.zeros(nn, dtype=np.int8)
    compiled["tree_root_field"](tree.parent, eb, h, clamp)
    evals = max(1, steps // nn)
    t0 = time.perf_counter()
    for _ in range(evals):
        compiled["tree_root_field"](tree.parent, eb, h, clamp)
    tc = time.perf_counter() - t0
    py_evals = max(1, evals // 20)
    t0 = time.perf_counter()
    for _ in range(py_evals):
        pure["tree_root_field"](tree.parent, eb, h, clamp)
    tp = time.perf_counter() - t0
    add_row(f"tree_root_field ({nn} nodes)", tc, evals * nn, tp, py_evals * nn)

    print(f"backend: {kernels.backend()}  (numba available: {kernels.HAVE_NUMBA})")
    print(f"{'kernel':<30} {'compiled ns/op':>15} {'python ns/op':>14} {'speedup':>9}")
    for name, c, p, s in rows:
        print(f"{name:<30} {c:>15.1f} {p:>14.1f} {s:>8.1f}x")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=1_000_000,
                    help="compiled-path update count per kernel")
    bench(ap.parse_args().steps)
