"""Quantile estimators for the two data regimes.

Continuous data uses the rank-statistic estimator: the ``ceil(n*k)``-th order
statistic, or the midpoint of the ``n*k``-th and ``(n*k+1)``-th when ``n*k`` is
an integer. Discrete data uses mid-distribution quantiles, which interpolate
linearly between the atoms placed at their mid-CDF positions.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidLevel
from .ingest import DataKind

# relative tolerance for "n*k is an integer" and "k equals a mid-CDF position"
REL_TOL = 1e-12

PRESETS = {
    "percentiles": tuple(round(i / 100, 2) for i in range(1, 100)),
    "deciles": tuple(round(i / 10, 1) for i in range(1, 10)),
    "quartiles": (0.25, 0.5, 0.75),
}
DEFAULT_PRESET = "percentiles"


def check_levels(K) -> np.ndarray:
    """Validate a set of quantile levels and return it as a float array."""
    arr = np.atleast_1d(np.asarray(K, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidLevel("need at least one quantile level")
    if not np.all((arr > 0) & (arr < 1)):
        raise InvalidLevel(f"quantile levels must lie in (0, 1), got {arr[(arr <= 0) | (arr >= 1)].tolist()}")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise InvalidLevel("quantile levels must be strictly increasing")
    return arr


def parse_levels(text: str) -> np.ndarray:
    """Accept a preset name or a comma separated list like ``0.1,0.5,0.9``."""
    text = text.strip()
    if text in PRESETS:
        return check_levels(PRESETS[text])
    try:
        return check_levels([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise InvalidLevel(f"unknown preset or malformed level list: {text!r}") from None


def _check_level(k) -> float:
    k = float(k)
    if not 0 < k < 1:
        raise InvalidLevel(f"quantile level must lie in (0, 1), got {k}")
    return k


def rank_positions(N: int, K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """1-based order-statistic positions (lo, hi) whose midpoint is the estimate.

    lo == hi unless ``N*k`` is an integer.
    """
    nk = N * K
    r = np.rint(nk)
    is_int = np.abs(nk - r) <= REL_TOL * np.maximum(1.0, nk)
    lo = np.where(is_int, r, np.ceil(nk)).astype(np.int64)
    hi = np.where(is_int, r + 1, lo).astype(np.int64)
    np.clip(lo, 1, N, out=lo)
    np.clip(hi, 1, N, out=hi)
    return lo, hi


def continuous_from_sorted(xs: np.ndarray, K: np.ndarray) -> np.ndarray:
    lo, hi = rank_positions(xs.size, K)
    return (xs[lo - 1] + xs[hi - 1]) / 2


def mid_from_atoms(support: np.ndarray, counts: np.ndarray, K: np.ndarray) -> np.ndarray:
    """Mid-distribution quantiles from sorted support points and their counts.

    Atoms with zero count are ignored.
    """
    keep = counts > 0
    support = support[keep]
    p = counts[keep] / counts[keep].sum()
    pi = np.cumsum(p) - p / 2
    # np.interp clamps to the first/last atom outside [pi_1, pi_d]
    out = np.interp(K, pi, support)
    # snap levels that sit on a mid-CDF position to the atom itself
    j = np.clip(np.searchsorted(pi, K), 0, pi.size - 1)
    for cand in (j, np.maximum(j - 1, 0)):
        hit = np.abs(K - pi[cand]) <= REL_TOL * np.maximum(K, pi[cand])
        out = np.where(hit, support[cand], out)
    return out


def mid_from_sorted(xs: np.ndarray, K: np.ndarray) -> np.ndarray:
    support, counts = np.unique(xs, return_counts=True)
    return mid_from_atoms(support, counts.astype(np.float64), K)


def empirical_quantile_continuous(x, k) -> float:
    k = _check_level(k)
    xs = np.sort(np.asarray(x, dtype=np.float64).reshape(-1))
    if xs.size == 0:
        raise ValueError("empty series")
    return float(continuous_from_sorted(xs, np.array([k]))[0])


def mid_distribution_quantile(x, k) -> float:
    k = _check_level(k)
    xs = np.asarray(x, dtype=np.float64).reshape(-1)
    if xs.size == 0:
        raise ValueError("empty series")
    return float(mid_from_sorted(xs, np.array([k]))[0])


def quantile_vector(x, K, kind: DataKind | str) -> np.ndarray:
    """Quantile estimates at every level in ``K`` with the regime's estimator."""
    K = check_levels(K)
    xs = np.sort(np.asarray(getattr(x, "values", x), dtype=np.float64).reshape(-1))
    if xs.size == 0:
        raise ValueError("empty series")
    discrete = kind.is_discrete if isinstance(kind, DataKind) else kind == "Discrete"
    if discrete:
        return mid_from_sorted(xs, K)
    return continuous_from_sorted(xs, K)
