"""Joint moving-block bootstrap of quantile differences.

Each replicate draws block start indices uniformly with replacement and takes
the same blocks from x and y, so cross-dependence between the two series is
kept. Replicate ``i`` always draws from a random stream derived from
``(seed, i)``; results therefore do not depend on batching or thread count.

Rather than materialising and sorting every resample, the engine turns the
drawn starts into per-observation multiplicities and reads order statistics
off their cumulative sums in the original sort order. This is exact: the
selected values are bit-for-bit those a sort of the resample would return.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBlockLength
from .ingest import PairedSample
from .quantiles import check_levels, continuous_from_sorted, mid_from_atoms, mid_from_sorted, rank_positions

CONTINUOUS_BLOCKS = "ContinuousBlocks"
DISCRETE_SUBSAMPLE = "DiscreteSubsample"

DEFAULT_B = 1000
BATCH = 64
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class BootstrapMatrix:
    """Replicate statistics, one row per replicate and one column per level."""

    replicates: np.ndarray
    regime: str
    m: int
    n: int
    m1: int | None = None

    @property
    def B(self) -> int:
        return self.replicates.shape[0]

    @property
    def scale(self) -> float:
        # the subsampling regime carries a sqrt(m1) factor; dividing by sqrt(n)
        # puts it on the same footing as the unscaled continuous statistic
        return math.sqrt(self.n) if self.regime == DISCRETE_SUBSAMPLE else 1.0

    def standardized(self) -> np.ndarray:
        if self.regime == DISCRETE_SUBSAMPLE:
            return self.replicates / self.scale
        return self.replicates


@dataclass(frozen=True)
class VarianceVector:
    var: np.ndarray  # unbiased column variance of the raw replicates
    sigma: np.ndarray  # scale used downstream (regime-normalised)


def replicate_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed) & _U64, spawn_key=(int(i),))))


def draw_starts(seed: int, i: int, n_starts: int, n_blocks: int) -> np.ndarray:
    """0-based block start indices of replicate ``i``."""
    return replicate_rng(seed, i).integers(0, n_starts, size=n_blocks)


def subsample_size(n: int) -> int:
    """Smallest integer m1 with m1 >= n**(2/3), computed without rounding error."""
    m1 = max(1, round(n ** (2.0 / 3.0)))
    while m1**3 < n * n:
        m1 += 1
    while m1 > 1 and (m1 - 1) ** 3 >= n * n:
        m1 -= 1
    return m1


def _check_block(n: int, m: int) -> None:
    if not 1 <= m <= n:
        raise InvalidBlockLength(f"block length {m} must lie in [1, n={n}]")


class _Resampler:
    """Shared multiplicity machinery for one (n, m, n_blocks) layout."""

    def __init__(self, n: int, m: int, n_blocks: int, seed: int):
        self.n, self.m, self.n_blocks, self.seed = n, m, n_blocks, seed
        self.n_starts = n - m + 1
        j = np.arange(n)
        self._hi = np.minimum(j, self.n_starts - 1) + 1
        self._lo = np.maximum(j - m + 1, 0)

    @property
    def length(self) -> int:
        return self.n_blocks * self.m

    def weights(self, rows: range) -> np.ndarray:
        """Multiplicity of every original index in each replicate of ``rows``."""
        S = self.n_starts
        starts = np.stack([draw_starts(self.seed, i, S, self.n_blocks) for i in rows])
        offsets = (np.arange(len(rows)) * S)[:, None]
        counts = np.bincount((starts + offsets).ravel(), minlength=len(rows) * S)
        # one flat prefix sum; within-row differences are unaffected by earlier rows
        cc = np.empty((len(rows), S + 1), dtype=np.int64)
        cc[:, 1:] = np.cumsum(counts).reshape(len(rows), S)
        cc[0, 0] = 0
        cc[1:, 0] = cc[:-1, S]
        return cc[:, self._hi] - cc[:, self._lo]


def _order_stats(sorted_vals: np.ndarray, w_sorted: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Values at 1-based ``positions`` of each weighted row, via one global search.

    Every row sums to the same resample length, so the flat prefix sum over
    all rows is monotone and row ``r`` owns the targets offset by ``r * total``.
    """
    b, n = w_sorted.shape
    cum = np.cumsum(w_sorted.ravel())
    total = int(cum[n - 1])
    off = np.arange(b)[:, None] * total
    idx = np.searchsorted(cum, (positions[None, :] + off).ravel(), side="left")
    idx = idx.reshape(b, -1) - (np.arange(b) * n)[:, None]
    return sorted_vals[idx]


def _run(fn, B: int, threads: int) -> np.ndarray:
    chunks = [range(s, min(s + BATCH, B)) for s in range(0, B, BATCH)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, chunks))
    else:
        parts = [fn(c) for c in chunks]
    return np.vstack(parts)


def block_bootstrap_continuous(
    sample: PairedSample, K, B: int, m: int, seed: int, qx=None, qy=None, threads: int = 1
) -> BootstrapMatrix:
    """Moving-block bootstrap with ceil(n/m) blocks per replicate (no trimming)."""
    K = check_levels(K)
    n = sample.n
    _check_block(n, m)
    x, y = sample.x.values, sample.y.values
    ox, oy = np.argsort(x, kind="stable"), np.argsort(y, kind="stable")
    xs, ys = x[ox], y[oy]
    if qx is None:
        qx = continuous_from_sorted(xs, K)
    if qy is None:
        qy = continuous_from_sorted(ys, K)
    observed = np.abs(np.asarray(qx) - np.asarray(qy))

    rs = _Resampler(n, m, math.ceil(n / m), seed)
    lo, hi = rank_positions(rs.length, K)
    positions = np.concatenate([lo, hi])
    nK = K.size

    def batch(rows):
        w = rs.weights(rows)
        vx = _order_stats(xs, w[:, ox], positions)
        vy = _order_stats(ys, w[:, oy], positions)
        qxs = (vx[:, :nK] + vx[:, nK:]) / 2
        qys = (vy[:, :nK] + vy[:, nK:]) / 2
        return np.abs(qxs - qys) - observed

    return BootstrapMatrix(_run(batch, B, threads), CONTINUOUS_BLOCKS, m, n)


def block_bootstrap_discrete(
    sample: PairedSample, K, B: int, m: int, seed: int, qx=None, qy=None, threads: int = 1
) -> BootstrapMatrix:
    """m-out-of-n block bootstrap (m1 = ceil(n^(2/3))) with mid-distribution quantiles."""
    K = check_levels(K)
    n = sample.n
    _check_block(n, m)
    x, y = sample.x.values, sample.y.values
    sx, cx = np.unique(x, return_inverse=True)
    sy, cy = np.unique(y, return_inverse=True)
    if qx is None:
        qx = mid_from_sorted(x, K)
    if qy is None:
        qy = mid_from_sorted(y, K)
    observed = np.abs(np.asarray(qx) - np.asarray(qy))

    m1 = subsample_size(n)
    rs = _Resampler(n, m, math.ceil(m1 / m), seed)
    root_m1 = math.sqrt(m1)

    def atom_counts(w, codes, d):
        b = w.shape[0]
        flat = (codes[None, :] + (np.arange(b) * d)[:, None]).ravel()
        return np.bincount(flat, weights=w.ravel(), minlength=b * d).reshape(b, d)

    def batch(rows):
        w = rs.weights(rows)
        ax = atom_counts(w, cx, sx.size)
        ay = atom_counts(w, cy, sy.size)
        out = np.empty((len(rows), K.size))
        for r in range(len(rows)):
            qxs = mid_from_atoms(sx, ax[r], K)
            qys = mid_from_atoms(sy, ay[r], K)
            out[r] = root_m1 * (np.abs(qxs - qys) - observed)
        return out

    return BootstrapMatrix(_run(batch, B, threads), DISCRETE_SUBSAMPLE, m, n, m1)


def bootstrap_variances(matrix: BootstrapMatrix) -> VarianceVector:
    if matrix.B < 2:
        raise ValueError("need at least two replicates for a variance")
    var = np.var(matrix.replicates, axis=0, ddof=1)
    return VarianceVector(var=var, sigma=np.sqrt(var) / matrix.scale)
