"""Synthetic ground truth: AR(1) pairs and Monte Carlo rejection surfaces."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.signal import lfilter

from .bootstrap import DEFAULT_B
from .detector import TestConfig, run_test
from .errors import InvalidSpec, UsageError
from .ingest import PairedSample
from .quantiles import DEFAULT_PRESET, PRESETS

DEFAULT_BURN_IN = 1000
DEFAULT_REPS = 200
MIN_REPS = 50


@dataclass(frozen=True)
class Ar1Spec:
    phi: float = 0.0
    sigma: float = 1.0
    mu_shift: float = 0.0
    n: int = 1000
    burn_in: int = DEFAULT_BURN_IN
    seed: int = 0

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise InvalidSpec(f"|phi| must be < 1 for a stationary AR(1), got {self.phi}")
        if not self.sigma > 0:
            raise InvalidSpec(f"innovation sd must be > 0, got {self.sigma}")
        if self.n < 1:
            raise InvalidSpec(f"n must be positive, got {self.n}")
        if self.burn_in < 0:
            raise InvalidSpec(f"burn_in must be >= 0, got {self.burn_in}")


def _ar1_path(phi: float, sigma: float, n: int, burn_in: int, rng: np.random.Generator) -> np.ndarray:
    eps = rng.normal(0.0, sigma, size=n + burn_in)
    # y_t = phi * y_{t-1} + eps_t with y_0 = 0
    return lfilter([1.0], [1.0, -phi], eps)[burn_in:]


def gen_ar1(spec: Ar1Spec) -> PairedSample:
    """Two independent AR(1) paths; y is shifted by ``mu_shift`` after the recursion."""
    rx, ry = (np.random.default_rng(s) for s in np.random.SeedSequence(spec.seed).spawn(2))
    x = _ar1_path(spec.phi, spec.sigma, spec.n, spec.burn_in, rx)
    y = _ar1_path(spec.phi, spec.sigma, spec.n, spec.burn_in, ry) + spec.mu_shift
    return PairedSample.from_arrays(x, y)


def derive_seed(*key: int) -> int:
    """64-bit seed deterministically derived from an integer key path."""
    return int(np.random.SeedSequence([k & ((1 << 64) - 1) for k in key]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class GridSpec:
    phis: tuple[float, ...] = (0.0,)
    mus: tuple[float, ...] = (0.0,)
    n: int = 1000
    delta: float = 0.5
    alpha: float = 0.1
    B: int = DEFAULT_B
    reps: int = DEFAULT_REPS
    seed: int = 0
    levels: tuple[float, ...] = PRESETS[DEFAULT_PRESET]
    sigma: float = 1.0
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if self.reps < MIN_REPS:
            raise UsageError(f"reps must be at least {MIN_REPS}, got {self.reps}")
        for phi in self.phis:
            if not abs(phi) < 1:
                raise InvalidSpec(f"|phi| must be < 1, got {phi}")
        object.__setattr__(self, "phis", tuple(float(p) for p in self.phis))
        object.__setattr__(self, "mus", tuple(float(m) for m in self.mus))
        object.__setattr__(self, "levels", tuple(float(k) for k in self.levels))


@dataclass(frozen=True)
class CellResult:
    phi: float
    mu: float
    n: int
    delta: float
    alpha: float
    reps: int
    rejections: int

    @property
    def reject_rate(self) -> float:
        return self.rejections / self.reps

    @property
    def stderr(self) -> float:
        p = self.reject_rate
        return math.sqrt(p * (1 - p) / self.reps)

    def record(self) -> dict:
        d = asdict(self)
        del d["rejections"]
        d["reject_rate"] = self.reject_rate
        d["stderr"] = self.stderr
        return d


@dataclass(frozen=True)
class RejectionSurface:
    grid: GridSpec
    cells: list[CellResult] = field(default_factory=list)

    FIELDS = ("phi", "mu", "n", "delta", "alpha", "reps", "reject_rate", "stderr")

    def records(self) -> list[dict]:
        return [c.record() for c in self.cells]

    def cell(self, phi: float, mu: float) -> CellResult:
        for c in self.cells:
            if c.phi == phi and c.mu == mu:
                return c
        raise KeyError((phi, mu))

    def to_csv(self, delimiter: str = ",") -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.FIELDS, delimiter=delimiter, lineterminator="\n")
        writer.writeheader()
        for rec in self.records():
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in rec.items()})
        return buf.getvalue()

    def to_dict(self) -> dict:
        g = asdict(self.grid)
        g["levels"] = list(self.grid.levels)
        return {"grid": g, "cells": self.records()}


def rejection_trial(phi: float, mu: float, n: int, config: TestConfig, seed: int, sigma=1.0, burn_in=DEFAULT_BURN_IN) -> bool:
    """One data generation plus one test; the seed fixes both."""
    data_seed, test_seed = derive_seed(seed, 0), derive_seed(seed, 1)
    sample = gen_ar1(Ar1Spec(phi=phi, sigma=sigma, mu_shift=mu, n=n, burn_in=burn_in, seed=data_seed))
    return run_test(sample, replace(config, seed=test_seed)).violation


def _cell_job(args) -> int:
    grid, ci, phi, mu = args
    config = TestConfig(alpha=grid.alpha, delta=grid.delta, levels=grid.levels, B=grid.B)
    return sum(
        rejection_trial(phi, mu, grid.n, config, derive_seed(grid.seed, ci, r), grid.sigma, grid.burn_in)
        for r in range(grid.reps)
    )


def rejection_grid(grid: GridSpec, workers: int = 1) -> RejectionSurface:
    """Rejection frequency for every (phi, mu) cell.

    Each (cell, rep) has its own derived seed, so the surface is identical for
    any ``workers`` count.
    """
    jobs = [(grid, ci, phi, mu) for ci, (phi, mu) in enumerate((p, m) for p in grid.phis for m in grid.mus)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_cell_job, jobs))
    else:
        counts = [_cell_job(j) for j in jobs]
    cells = [
        CellResult(phi, mu, grid.n, grid.delta, grid.alpha, grid.reps, k)
        for (_, _, phi, mu), k in zip(jobs, counts)
    ]
    return RejectionSurface(grid, cells)
