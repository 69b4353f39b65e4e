import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leakgate.errors import EmptyInput, IoError, LengthMismatch, ParseError, UnitMismatch
from leakgate.ingest import (
    CONTINUOUS,
    DISCRETE,
    MeasurementSeries,
    PairedSample,
    classify_data_kind,
    load_series,
    pair,
    write_series,
)


@pytest.fixture
def write(tmp_path):
    def _write(text, name="series.txt"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write


def test_load_plain(write):
    s = load_series(write("1\n2\n3\n"))
    assert s.values.tolist() == [1.0, 2.0, 3.0]
    assert len(s) == 3


def test_load_skips_comments_and_blanks(write):
    s = load_series(write("# hdr\n5\n\n7\n"), unit="cycles")
    assert s.values.tolist() == [5.0, 7.0]
    assert s.unit == "cycles"


def test_load_accepts_decimal_and_exponent(write):
    assert load_series(write("1.5\n-2e3\n+4E-1\n  8  \n")).values.tolist() == [1.5, -2000.0, 0.4, 8.0]


def test_parse_error_reports_line(write):
    with pytest.raises(ParseError) as info:
        load_series(write("5\nabc\n"))
    assert info.value.line_no == 2


@pytest.mark.parametrize("bad", ["nan", "inf", "-Infinity"])
def test_non_finite_rejected(write, bad):
    with pytest.raises(ParseError):
        load_series(write(f"1\n{bad}\n"))


def test_empty_input(write):
    with pytest.raises(EmptyInput):
        load_series(write("# nothing\n\n"))


def test_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_series(tmp_path / "missing.txt")


def test_series_is_immutable():
    s = MeasurementSeries([1, 2, 3])
    with pytest.raises(ValueError):
        s.values[0] = 5


def test_pair_equal_lengths():
    x = MeasurementSeries(np.arange(100))
    assert pair(x, MeasurementSeries(np.arange(100))).n == 100


def test_pair_truncates_on_request():
    x, y = MeasurementSeries(np.arange(100)), MeasurementSeries(np.arange(90))
    p = pair(x, y, truncate=True)
    assert p.n == 90
    assert p.x.values.tolist() == list(range(90))


def test_pair_length_mismatch():
    with pytest.raises(LengthMismatch):
        pair(MeasurementSeries(np.arange(100)), MeasurementSeries(np.arange(90)))


def test_pair_unit_mismatch():
    with pytest.raises(UnitMismatch):
        pair(MeasurementSeries([1, 2], unit="ns"), MeasurementSeries([1, 2], unit="cycles"))


def test_classify_cycle_counter_is_discrete():
    rng = np.random.default_rng(0)
    levels = np.arange(100, 112)
    p = PairedSample.from_arrays(rng.choice(levels, 10_000), rng.choice(levels, 10_000))
    kind = classify_data_kind(p)
    assert kind.kind == DISCRETE and kind.distinct_count == 12


def test_classify_continuous_draws():
    rng = np.random.default_rng(1)
    p = PairedSample.from_arrays(rng.normal(size=10_000), rng.normal(size=10_000))
    kind = classify_data_kind(p)
    assert kind.kind == CONTINUOUS and kind.distinct_count == 20_000


def test_classify_threshold_at_small_n():
    # budget is max(16, floor(0.05 * 200)) = 16, and 30 distinct values exceed it
    x = np.arange(100) % 30
    kind = classify_data_kind(PairedSample.from_arrays(x, x))
    assert kind.distinct_count == 30
    assert kind.kind == CONTINUOUS
    x16 = np.arange(100) % 16
    assert classify_data_kind(PairedSample.from_arrays(x16, x16)).kind == DISCRETE


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=50))
def test_write_load_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "s.txt"
    write_series(MeasurementSeries(values), path)
    back = load_series(path)
    assert back.values.tobytes() == np.asarray(values, dtype=float).tobytes()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=2, max_size=60), st.randoms())
def test_classify_permutation_invariant(values, rnd):
    x = np.asarray(values, float)
    y = x[::-1].copy()
    shuffled = list(values)
    rnd.shuffle(shuffled)
    a = classify_data_kind(PairedSample.from_arrays(x, y))
    b = classify_data_kind(PairedSample.from_arrays(np.asarray(shuffled, float), y))
    assert a == b
