"""Loading, pairing and classifying timing measurements.

The on-disk format is plain UTF-8 text with one numeric literal per line.
Lines whose first non-blank character is ``#`` and blank lines are skipped.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal

import numpy as np

from .errors import EmptyInput, IoError, LengthMismatch, ParseError, UnitMismatch

Unit = Literal["ns", "cycles", "unitless"]
UNITS = ("ns", "cycles", "unitless")

CONTINUOUS = "Continuous"
DISCRETE = "Discrete"

# minimum distinct-value budget below which pooled data counts as discrete
DISCRETE_MIN_DISTINCT = 16
DISCRETE_FRACTION = 0.05


@dataclass(frozen=True)
class MeasurementSeries:
    """Ordered timing observations of one input class.

    Order matters: it carries the serial dependence the bootstrap preserves.
    """

    values: np.ndarray
    label: str = ""
    unit: Unit = "unitless"

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise EmptyInput(f"series {self.label!r} is empty")
        if not np.all(np.isfinite(arr)):
            raise ParseError(self.label, int(np.flatnonzero(~np.isfinite(arr))[0]) + 1, "non-finite value")
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}; expected one of {UNITS}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class PairedSample:
    x: MeasurementSeries
    y: MeasurementSeries
    n: int = field(init=False)

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise LengthMismatch(f"x has {len(self.x)} values, y has {len(self.y)}")
        if self.x.unit != self.y.unit:
            raise UnitMismatch(f"x is in {self.x.unit}, y is in {self.y.unit}")
        object.__setattr__(self, "n", len(self.x))

    @classmethod
    def from_arrays(cls, x, y, unit: Unit = "unitless") -> "PairedSample":
        return cls(MeasurementSeries(x, "x", unit), MeasurementSeries(y, "y", unit))

    def swapped(self) -> "PairedSample":
        return PairedSample(self.y, self.x)


@dataclass(frozen=True)
class DataKind:
    kind: str
    distinct_count: int

    @property
    def is_discrete(self) -> bool:
        return self.kind == DISCRETE


def _parse_lines(lines: Iterable[str], path) -> list[float]:
    out = []
    for line_no, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            value = float(text)
        except ValueError:
            raise ParseError(path, line_no, text) from None
        # float() accepts "nan"/"inf" spellings; those are not measurements
        if not math.isfinite(value):
            raise ParseError(path, line_no, text)
        out.append(value)
    return out


def load_series(path, unit: Unit = "unitless", label: str | None = None) -> MeasurementSeries:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            values = _parse_lines(fh, path)
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not values:
        raise EmptyInput(f"{path}: no numeric lines")
    return MeasurementSeries(np.asarray(values), label if label is not None else path.stem, unit)


def format_value(v: float) -> str:
    """Text form used by :func:`write_series`; integers stay integers."""
    v = float(v)
    if v.is_integer() and abs(v) < 2**53 and not (v == 0 and math.copysign(1, v) < 0):
        return str(int(v))
    return repr(v)


def write_series(series: MeasurementSeries | np.ndarray, path) -> None:
    """Write one value per line, atomically (temp file + rename).

    ``repr`` gives the shortest string that round-trips, which is at most
    17 significant digits.
    """
    values = series.values if isinstance(series, MeasurementSeries) else np.asarray(series, dtype=float)
    body = "".join(format_value(v) + "\n" for v in values)
    atomic_write_text(path, body)


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise IoError(f"cannot write {path}: {exc}") from exc


def pair(x: MeasurementSeries, y: MeasurementSeries, truncate: bool = False) -> PairedSample:
    if x.unit != y.unit:
        raise UnitMismatch(f"{x.label} is in {x.unit}, {y.label} is in {y.unit}")
    if len(x) != len(y):
        if not truncate:
            raise LengthMismatch(
                f"{x.label} has {len(x)} values but {y.label} has {len(y)}; "
                "pass truncate=True to cut both to the common prefix"
            )
        n = min(len(x), len(y))
        x = MeasurementSeries(x.values[:n], x.label, x.unit)
        y = MeasurementSeries(y.values[:n], y.label, y.unit)
    return PairedSample(x, y)


def discrete_budget(n: int) -> int:
    return max(DISCRETE_MIN_DISTINCT, math.floor(DISCRETE_FRACTION * 2 * n))


def classify_data_kind(sample: PairedSample) -> DataKind:
    """Pooled distinct-value count decides between the two estimator regimes."""
    distinct = int(np.unique(np.concatenate([sample.x.values, sample.y.values])).size)
    kind = DISCRETE if distinct <= discrete_budget(sample.n) else CONTINUOUS
    return DataKind(kind, distinct)
