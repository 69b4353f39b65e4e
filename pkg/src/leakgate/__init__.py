"""Relevant-difference testing of timing measurements.

Decides, with bounded type-1 error, whether two timing distributions differ
at some quantile by more than a user-chosen negligibility threshold, while
allowing for serially dependent measurements.
"""

__version__ = "0.1.0"

from .detector import TestConfig, TestResult, run_test
from .ingest import DataKind, MeasurementSeries, PairedSample, classify_data_kind, load_series, pair, write_series
from .power import PowerRequest, PowerResult, estimate_sample_size
from .simulate import Ar1Spec, GridSpec, gen_ar1, rejection_grid

__all__ = [
    "Ar1Spec",
    "DataKind",
    "GridSpec",
    "MeasurementSeries",
    "PairedSample",
    "PowerRequest",
    "PowerResult",
    "TestConfig",
    "TestResult",
    "classify_data_kind",
    "estimate_sample_size",
    "gen_ar1",
    "load_series",
    "pair",
    "rejection_grid",
    "run_test",
    "write_series",
]
