"""Relevant two-sample quantile test with a bootstrap maximum threshold.

The test asks whether some quantile gap between x and y exceeds the
negligibility threshold ``delta``. Quantile levels are filtered twice: first
levels whose bootstrap variance is out of proportion to the rest are dropped,
then only levels whose gap could plausibly exceed ``delta`` are kept. The
studentised maximum over the survivors is compared with the bootstrap
``(1 - alpha)`` order statistic of the same maximum.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .bootstrap import (
    DEFAULT_B,
    BootstrapMatrix,
    block_bootstrap_continuous,
    block_bootstrap_discrete,
    bootstrap_variances,
)
from .dependence import DEFAULT_CONFIG, BlockLengthConfig, DependenceEstimate, estimate_pair_dependence
from .errors import EmptyActiveSet, UsageError
from .ingest import CONTINUOUS, DISCRETE, DataKind, PairedSample, classify_data_kind
from .quantiles import DEFAULT_PRESET, PRESETS, check_levels, quantile_vector

SCHEMA_VERSION = 1
MIN_REPLICATES = 100

VIOLATION = "Violation"
NO_VIOLATION = "NoViolation"

VARIANCE_RATIO = 5.0
SLACK_CONSTANT = 30.0


@dataclass(frozen=True)
class TestConfig:
    __test__ = False

    alpha: float = 0.1
    delta: float = 0.0
    levels: tuple[float, ...] = PRESETS[DEFAULT_PRESET]
    B: int = DEFAULT_B
    seed: int = 0
    kind_override: str | None = None
    threads: int = 1
    block: BlockLengthConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise UsageError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise UsageError(f"delta must be a finite number >= 0, got {self.delta}")
        if self.B < MIN_REPLICATES:
            raise UsageError(f"B must be at least {MIN_REPLICATES}, got {self.B}")
        if self.kind_override not in (None, CONTINUOUS, DISCRETE):
            raise UsageError(f"kind override must be {CONTINUOUS!r} or {DISCRETE!r}")
        object.__setattr__(self, "levels", tuple(float(k) for k in check_levels(self.levels)))

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["levels"] = list(self.levels)
        return d


@dataclass(frozen=True)
class FilterDiagnostics:
    levels: np.ndarray
    qx: np.ndarray
    qy: np.ndarray
    diff: np.ndarray
    sigma: np.ndarray
    in_k_sub: np.ndarray
    in_k_sub_max: np.ndarray

    @property
    def k_sub(self) -> np.ndarray:
        return self.levels[self.in_k_sub]

    @property
    def k_sub_max(self) -> np.ndarray:
        return self.levels[self.in_k_sub_max]

    def rows(self) -> list[dict[str, Any]]:
        return [
            {
                "k": float(k),
                "qx": float(a),
                "qy": float(b),
                "diff": float(d),
                "sigma": float(s),
                "in_k_sub": bool(i),
                "in_k_sub_max": bool(j),
            }
            for k, a, b, d, s, i, j in zip(
                self.levels, self.qx, self.qy, self.diff, self.sigma, self.in_k_sub, self.in_k_sub_max
            )
        ]


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    decision: str
    statistic: float
    threshold: float | None
    n: int
    dependence: DependenceEstimate
    kind: DataKind
    diagnostics: FilterDiagnostics
    config: TestConfig
    forced: bool = False
    degenerate: bool = False
    matrix: BootstrapMatrix | None = field(default=None, repr=False, compare=False)

    @property
    def violation(self) -> bool:
        return self.decision == VIOLATION

    @property
    def m(self) -> int:
        return self.dependence.m

    def to_dict(self, include_matrix: bool = False) -> dict[str, Any]:
        out = {
            "schema_version": SCHEMA_VERSION,
            "decision": self.decision,
            "statistic": json_float(self.statistic),
            "threshold": json_float(self.threshold),
            "alpha": self.config.alpha,
            "delta": self.config.delta,
            "n": self.n,
            "m": self.m,
            "m_x": self.dependence.m_x,
            "m_y": self.dependence.m_y,
            "kind": self.kind.kind,
            "distinct_count": self.kind.distinct_count,
            "B": self.config.B,
            "seed": self.config.seed,
            "forced": self.forced,
            "degenerate": self.degenerate,
            "config": self.config.to_dict(),
            "levels": self.diagnostics.rows(),
        }
        if include_matrix and self.matrix is not None:
            out["bootstrap_matrix"] = self.matrix.replicates.tolist()
        return out


def json_float(v: float | None):
    """Strict-JSON encoding: non-finite values become the strings "inf"/"-inf"."""
    if v is None:
        return None
    v = float(v)
    if math.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def slack_term(n: int) -> float:
    return SLACK_CONSTANT * math.sqrt(math.log(n) ** 1.5 / n)


def select_k_sub(var: np.ndarray, eligible: np.ndarray | None = None) -> np.ndarray:
    """Mask of levels whose variance is below five times the mean variance.

    The mean is taken over ``eligible`` levels only; ineligible levels are
    never selected.
    """
    var = np.asarray(var, dtype=np.float64)
    if eligible is None:
        eligible = np.ones(var.shape, dtype=bool)
    if not eligible.any():
        return np.zeros(var.shape, dtype=bool)
    bound = VARIANCE_RATIO * var[eligible].mean()
    return eligible & (var < bound)


def select_k_sub_max(diff, sigma, delta: float, n: int, k_sub: np.ndarray) -> np.ndarray:
    diff = np.asarray(diff, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    out = np.zeros(diff.shape, dtype=bool)
    s = sigma[k_sub]
    out[k_sub] = diff[k_sub] / s + slack_term(n) >= delta / s
    return out


def test_statistic(diff, sigma, delta: float, active: np.ndarray) -> float:
    if not np.any(active):
        return -math.inf
    diff = np.asarray(diff, dtype=np.float64)[active]
    sigma = np.asarray(sigma, dtype=np.float64)[active]
    return float(np.max((diff - delta) / sigma))


test_statistic.__test__ = False


def order_statistic_index(alpha: float, B: int) -> int:
    """1-based index floor((1 - alpha) * B), clamped to [1, B]."""
    return min(B, max(1, math.floor((1.0 - alpha) * B + 1e-9)))


def bootstrap_threshold(replicates: np.ndarray, sigma, active: np.ndarray, alpha: float) -> float:
    """``floor((1-alpha)B)``-th smallest of the per-replicate studentised maxima.

    ``replicates`` must already be on the scale of ``sigma`` (see
    :meth:`BootstrapMatrix.standardized`).
    """
    active = np.asarray(active, dtype=bool)
    if not active.any():
        raise EmptyActiveSet("no active quantile levels")
    replicates = np.asarray(replicates, dtype=np.float64)
    maxima = np.max(replicates[:, active] / np.asarray(sigma, dtype=np.float64)[active], axis=1)
    maxima.sort()
    return float(maxima[order_statistic_index(alpha, maxima.size) - 1])


def run_test(sample: PairedSample, config: TestConfig = TestConfig()) -> TestResult:
    K = np.asarray(config.levels)
    x, y = sample.x.values, sample.y.values
    n = sample.n

    detected = classify_data_kind(sample)
    kind = DataKind(config.kind_override, detected.distinct_count) if config.kind_override else detected

    qx = quantile_vector(x, K, kind)
    qy = quantile_vector(y, K, kind)
    diff = np.abs(qx - qy)
    dep = estimate_pair_dependence(sample, config.block)

    if np.ptp(x) == 0 and np.ptp(y) == 0 and x[0] == y[0]:
        zeros = np.zeros(K.size)
        none = np.zeros(K.size, dtype=bool)
        diag = FilterDiagnostics(K, qx, qy, diff, zeros, none, none)
        return TestResult(NO_VIOLATION, -math.inf, None, n, dep, kind, diag, config, degenerate=True)

    engine = block_bootstrap_discrete if kind.is_discrete else block_bootstrap_continuous
    matrix = engine(sample, K, config.B, dep.m, config.seed, qx=qx, qy=qy, threads=config.threads)
    variances = bootstrap_variances(matrix)
    sigma = variances.sigma

    # a gap with no resampling noise at all cannot be studentised: above delta
    # it is a certain leak, otherwise the level carries no information
    zero_var = sigma == 0
    forced = bool(np.any(zero_var & (diff > config.delta)))

    k_sub = select_k_sub(variances.var, eligible=~zero_var)
    k_sub_max = select_k_sub_max(diff, sigma, config.delta, n, k_sub)
    diag = FilterDiagnostics(K, qx, qy, diff, sigma, k_sub, k_sub_max)

    statistic = test_statistic(diff, sigma, config.delta, k_sub_max)
    threshold = None
    if k_sub_max.any():
        threshold = bootstrap_threshold(matrix.standardized(), sigma, k_sub_max, config.alpha)

    if forced:
        decision, statistic = VIOLATION, math.inf
    elif threshold is not None and statistic > threshold:
        decision = VIOLATION
    else:
        decision = NO_VIOLATION
    return TestResult(decision, statistic, threshold, n, dep, kind, diag, config, forced=forced, matrix=matrix)

