"""Deterministic random streams.

Every random quantity in the package is drawn from a named substream of a
single 64-bit master seed.  Substreams use numpy's counter-based Philox
generator seeded with ``SeedSequence([master, hash(purpose), index])``, so

* runs are bit-reproducible across platforms for a fixed numpy version,
* adding a new purpose never perturbs the draws of existing ones,
* per-index streams (one per chain, per seed cell, ...) are independent.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

_MASK64 = (1 << 64) - 1

# Sequential-search Poisson inversion is exact only while exp(-mean) is
# comfortably above the double underflow threshold.
POISSON_MEAN_CAP = 30.0


def purpose_key(purpose: str) -> int:
    """Stable 64-bit key for a stream purpose label."""
    digest = hashlib.blake2b(purpose.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(master_seed: int, purpose: str, index: int = 0) -> np.random.Generator:
    """Philox generator for one named purpose under a master seed."""
    if index < 0:
        raise ValueError(f"stream index must be >= 0, got {index}")
    seq = np.random.SeedSequence(
        [int(master_seed) & _MASK64, purpose_key(purpose), int(index)]
    )
    return np.random.Generator(np.random.Philox(seq))


def poisson_by_inversion(u: float, mean: float) -> int:
    """Poisson(mean) quantile at u via sequential search.

    Consumes exactly one uniform, which keeps tree generation replayable
    draw-for-draw.  Valid for mean <= POISSON_MEAN_CAP.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    if not 0.0 < mean <= POISSON_MEAN_CAP:
        raise ValueError(f"mean must lie in (0, {POISSON_MEAN_CAP}], got {mean}")
    p = math.exp(-mean)
    cdf = p
    k = 0
    # After mean + 40*sqrt(mean) + 50 terms the remaining tail is far below
    # double resolution, so the cap is unreachable for u < 1.
    cap = int(mean + 40.0 * math.sqrt(mean) + 50.0)
    while u > cdf and k < cap:
        k += 1
        p *= mean / k
        cdf += p
    return k
