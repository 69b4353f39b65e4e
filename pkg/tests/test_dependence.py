import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import lfilter

from leakgate.dependence import (
    combine_block_lengths,
    estimate_block_length,
    estimate_pair_dependence,
    select_block_length,
)
from leakgate.ingest import PairedSample


def ar1(phi, n, rng):
    return lfilter([1.0], [1.0, -phi], rng.normal(size=n + 500))[500:]


def test_white_noise_gives_short_blocks():
    # the optimal block for white noise is 1; allow estimation noise up to 4
    small = sum(
        estimate_block_length(np.random.default_rng(seed).normal(size=10_000)) <= 4 for seed in range(200)
    )
    assert small >= 190


def test_strong_dependence_gives_longer_blocks():
    longer = 0
    for seed in range(200):
        rng = np.random.default_rng(10_000 + seed)
        longer += estimate_block_length(ar1(0.9, 10_000, rng)) > estimate_block_length(rng.normal(size=10_000))
    assert longer >= 190


def test_constant_series_is_degenerate():
    b = select_block_length(np.full(500, 3.0))
    assert b.value == 1.0 and b.degenerate


def test_short_series_short_circuit():
    assert estimate_block_length(np.arange(31.0)) == 1.0


def test_ma_order_ordering():
    # moving averages of growing order depend over longer spans
    medians = []
    for q in (0, 2, 8, 24):
        vals = []
        for seed in range(30):
            e = np.random.default_rng(seed).normal(size=5_000 + q)
            vals.append(estimate_block_length(np.convolve(e, np.ones(q + 1), mode="valid")))
        medians.append(np.median(vals))
    assert medians == sorted(medians)
    assert medians[-1] > medians[0]


@pytest.mark.parametrize(
    "mx,my,n,expected",
    [(2.3, 5.1, 1000, 6), (700.0, 1.0, 1000, 500), (1.0, 1.0, 1000, 1), (0.2, 0.4, 1000, 1)],
)
def test_combine(mx, my, n, expected):
    assert combine_block_lengths(mx, my, n) == expected


def test_pair_estimate_iid():
    hits = 0
    for seed in range(40):
        rng = np.random.default_rng(seed)
        est = estimate_pair_dependence(PairedSample.from_arrays(rng.normal(size=10_000), rng.normal(size=10_000)))
        hits += est.m <= 4
        assert est.m == combine_block_lengths(est.m_x, est.m_y, 10_000)
    assert hits >= 38


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.sampled_from([0.0, 0.3, 0.7]),
    st.integers(-1000, 1000),
    st.sampled_from([0.5, 2.0, 8.0]),
)
def test_affine_invariance(seed, phi, shift, scale):
    x = np.round(ar1(phi, 400, np.random.default_rng(seed)) * 64)
    base = estimate_block_length(x)
    assert estimate_block_length(x + shift) == base
    assert estimate_block_length(x * scale) == base


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 300), st.integers(0, 2**32 - 1))
def test_bounds(n, seed):
    rng = np.random.default_rng(seed)
    est = estimate_pair_dependence(PairedSample.from_arrays(ar1(0.95, n, rng), rng.normal(size=n)))
    assert 1 <= est.m <= max(1, n // 2)
