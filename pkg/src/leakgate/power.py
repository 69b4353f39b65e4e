"""Sample-size estimation from a pilot sample.

The pilot's bootstrap quantile standard errors are rescaled to a per-
observation scale ``sigma_hat``. The required size then solves the
single-quantile power approximation

    P(Z > z_{1-alpha} - sqrt(n) * (mu - delta) / sigma_hat) = p,

i.e. ``n = (sigma_hat * (z_{1-alpha} + z_p) / (mu - delta))**2``, floored at 100.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import norm

from .bootstrap import DEFAULT_B, block_bootstrap_continuous, block_bootstrap_discrete, bootstrap_variances
from .dependence import DEFAULT_CONFIG, BlockLengthConfig, estimate_pair_dependence
from .detector import MIN_REPLICATES, select_k_sub
from .errors import InvalidRequest, PilotTooSmall
from .ingest import CONTINUOUS, DISCRETE, DataKind, PairedSample, classify_data_kind
from .quantiles import DEFAULT_PRESET, PRESETS, check_levels, quantile_vector

MIN_PILOT = 100
MIN_SAMPLE = 100

MIN_OVER_KSUB = "MinOverKsub"
MEDIAN_OVER_KSUB = "MedianOverKsub"
THEOREM_DERIVED = "TheoremDerived"
PAPER_LITERAL = "PaperLiteral"


@dataclass(frozen=True)
class PowerRequest:
    mu: float
    delta: float
    p: float = 0.9
    alpha: float = 0.1
    shift: bool = False
    B: int = DEFAULT_B
    seed: int = 0
    formula: str = THEOREM_DERIVED
    kind_override: str | None = None

    def __post_init__(self):
        if not self.delta >= 0:
            raise InvalidRequest(f"delta must be >= 0, got {self.delta}")
        if not self.mu > self.delta:
            raise InvalidRequest(
                f"power analysis requires the expected leak mu ({self.mu}) to exceed delta ({self.delta})"
            )
        if not 0 < self.p < 1:
            raise InvalidRequest(f"p must lie in (0, 1), got {self.p}")
        if not 0 < self.alpha < 1:
            raise InvalidRequest(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.B < MIN_REPLICATES:
            raise InvalidRequest(f"B must be at least {MIN_REPLICATES}, got {self.B}")
        if self.formula not in (THEOREM_DERIVED, PAPER_LITERAL):
            raise InvalidRequest(f"unknown formula {self.formula!r}")
        if self.kind_override not in (None, CONTINUOUS, DISCRETE):
            raise InvalidRequest(f"unknown data kind {self.kind_override!r}")


@dataclass(frozen=True)
class PowerResult:
    n: int
    n_sub_raw: float
    sigma_hat: float
    variant: str
    formula: str
    pilot_n: int
    m: int
    sigma_candidates: dict

    def to_dict(self) -> dict:
        return asdict(self)


def required_n(sigma_hat: float, mu: float, delta: float, p: float, alpha: float, formula: str = THEOREM_DERIVED) -> float:
    """Unfloored sample size for a per-observation scale ``sigma_hat``."""
    gap = mu - delta
    if formula == PAPER_LITERAL:
        return ((norm.ppf(1 - p) / sigma_hat - norm.ppf(1 - alpha) * sigma_hat) / gap) ** 2
    return (sigma_hat * (norm.ppf(1 - alpha) + norm.ppf(p)) / gap) ** 2


def finalize_n(n_sub: float) -> int:
    return math.ceil(max(MIN_SAMPLE, n_sub))


def estimate_sample_size(
    pilot: PairedSample,
    req: PowerRequest,
    K=PRESETS[DEFAULT_PRESET],
    block: BlockLengthConfig = DEFAULT_CONFIG,
) -> PowerResult:
    if pilot.n < MIN_PILOT:
        raise PilotTooSmall(f"pilot has {pilot.n} paired values; at least {MIN_PILOT} are needed")
    K = check_levels(K)
    detected = classify_data_kind(pilot)
    kind = DataKind(req.kind_override, detected.distinct_count) if req.kind_override else detected

    qx = quantile_vector(pilot.x, K, kind)
    qy = quantile_vector(pilot.y, K, kind)
    dep = estimate_pair_dependence(pilot, block)
    engine = block_bootstrap_discrete if kind.is_discrete else block_bootstrap_continuous
    matrix = engine(pilot, K, req.B, dep.m, req.seed, qx=qx, qy=qy)
    variances = bootstrap_variances(matrix)

    positive = variances.sigma > 0
    k_sub = select_k_sub(variances.var, eligible=positive)
    if not k_sub.any():
        raise PilotTooSmall("pilot shows no resampling variation at any quantile level")
    root_n = math.sqrt(pilot.n)
    active = variances.sigma[k_sub]
    candidates = {
        "min": root_n * float(np.min(active)),
        "median": root_n * float(np.median(active)),
        "max": root_n * float(np.max(active)),
    }
    variant = MIN_OVER_KSUB if req.shift else MEDIAN_OVER_KSUB
    sigma_hat = candidates["min"] if req.shift else candidates["median"]
    n_sub = required_n(sigma_hat, req.mu, req.delta, req.p, req.alpha, req.formula)
    return PowerResult(
        n=finalize_n(n_sub),
        n_sub_raw=float(n_sub),
        sigma_hat=sigma_hat,
        variant=variant,
        formula=req.formula,
        pilot_n=pilot.n,
        m=dep.m,
        sigma_candidates=candidates,
    )
