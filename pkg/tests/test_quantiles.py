import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leakgate.errors import InvalidLevel
from leakgate.ingest import CONTINUOUS, DISCRETE
from leakgate.quantiles import (
    PRESETS,
    check_levels,
    empirical_quantile_continuous,
    mid_distribution_quantile,
    parse_levels,
    quantile_vector,
)
from oracles import mid_quantile, rank_quantile


@pytest.mark.parametrize(
    "x,k,expected",
    [
        ([1, 2, 3, 4], 0.5, 2.5),
        ([5, 1, 3], 0.5, 3.0),
        ([7], 0.9, 7.0),
    ],
)
def test_continuous_examples(x, k, expected):
    assert empirical_quantile_continuous(x, k) == expected


@pytest.mark.parametrize("k,expected", [(0.5, 0.5), (0.1, 0.0), (0.9, 1.0)])
def test_mid_distribution_examples(k, expected):
    assert mid_distribution_quantile([0, 0, 1, 1], k) == expected


@pytest.mark.parametrize("k", [0.0, 1.0, -0.1, 1.5])
def test_invalid_level(k):
    with pytest.raises(InvalidLevel):
        empirical_quantile_continuous([1, 2], k)
    with pytest.raises(InvalidLevel):
        mid_distribution_quantile([1, 2], k)


def test_level_validation():
    with pytest.raises(InvalidLevel):
        check_levels([0.5, 0.5])
    with pytest.raises(InvalidLevel):
        check_levels([0.6, 0.5])
    with pytest.raises(InvalidLevel):
        check_levels([])
    assert parse_levels("quartiles").tolist() == [0.25, 0.5, 0.75]
    assert parse_levels("0.1, 0.9").tolist() == [0.1, 0.9]
    assert len(parse_levels("percentiles")) == 99
    with pytest.raises(InvalidLevel):
        parse_levels("tertiles")


def test_vector_deciles_of_1_to_100():
    # every decile of 1..100 lands on the midpoint branch: n*k = 10, 20, ...
    q = quantile_vector(np.arange(1, 101), PRESETS["deciles"], CONTINUOUS)
    np.testing.assert_array_equal(q, np.arange(1, 10) * 10 + 0.5)


def test_vector_discrete_example():
    q = quantile_vector([0, 0, 1, 1], [0.1, 0.5, 0.9], DISCRETE)
    np.testing.assert_array_equal(q, [0.0, 0.5, 1.0])


@pytest.mark.parametrize("kind", [CONTINUOUS, DISCRETE])
def test_constant_series(kind):
    q = quantile_vector([3.25] * 17, PRESETS["percentiles"], kind)
    assert np.all(q == 3.25)


def test_percentile_grid_hits_midpoint_branch():
    # 0.29 * 100 is not exactly 29 in binary floating point
    x = np.arange(1, 101, dtype=float)
    assert empirical_quantile_continuous(x, 0.29) == 29.5
    assert empirical_quantile_continuous(x, 0.57) == 57.5


def test_mid_distribution_interpolates_distinct_values():
    # all distinct, n=4: mid-CDF positions 1/8, 3/8, 5/8, 7/8
    x = [10.0, 20.0, 30.0, 40.0]
    assert mid_distribution_quantile(x, 0.25) == pytest.approx(15.0, abs=1e-12)
    assert mid_distribution_quantile(x, 3 / 8) == 20.0
    v = mid_distribution_quantile(x, 0.3)
    assert 10.0 < v < 20.0


series = st.lists(st.integers(-50, 50), min_size=1, max_size=12)
levels = st.integers(1, 99).map(lambda i: i / 100)


@settings(max_examples=300, deadline=None)
@given(series, levels)
def test_continuous_matches_oracle(x, k):
    assert empirical_quantile_continuous(x, k) == rank_quantile(x, k)


@settings(max_examples=300, deadline=None)
@given(series, levels)
def test_mid_matches_oracle(x, k):
    assert mid_distribution_quantile(x, k) == pytest.approx(mid_quantile(x, k), rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40), st.sampled_from([CONTINUOUS, DISCRETE]))
def test_monotone_in_level(x, kind):
    q = quantile_vector(x, PRESETS["percentiles"], kind)
    assert np.all(np.diff(q) >= -1e-9 * (1 + np.abs(q[:-1])))
