"""Price ingestion, log returns and the growing-window ladder.

CSV schemas
-----------
prices:   ``date,close``       (header required, ISO-8601 dates, decimal closes)
returns:  ``date,log_return``  (written with 17 significant digits)

Lines starting with ``#`` are treated as comments; the CLI uses them to echo
the run configuration at the top of every file it writes.

Trading days are indexed by position. Weekends and holidays in the date
column are not interpreted.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from .errors import (
    NonMonotonicDates,
    NonPositivePrice,
    ParseError,
    PlanInfeasible,
    SeriesTooShort,
)

PRICE_SCHEMA = "date,close"
RETURN_SCHEMA = "date,log_return"
ANCHORS = ("series_start", "series_end")

# synthetic calendars (simulations, model samples) count business days from here
SYNTHETIC_EPOCH = "2000-01-03"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _as_dates(dates: Iterable) -> np.ndarray:
    return np.asarray(list(dates) if not isinstance(dates, np.ndarray) else dates, dtype="datetime64[D]")


@dataclass(frozen=True)
class PriceSeries:
    dates: np.ndarray
    closes: np.ndarray
    label: str = ""

    def __post_init__(self):
        dates = _as_dates(self.dates).copy()
        closes = np.array(self.closes, dtype=np.float64)
        if dates.shape != closes.shape or closes.ndim != 1:
            raise ValueError("dates and closes must be 1-d and the same length")
        if len(closes) < 2:
            raise SeriesTooShort(f"need at least 2 closes, got {len(closes)}")
        bad = np.flatnonzero(~(closes > 0) | ~np.isfinite(closes))
        if bad.size:
            raise NonPositivePrice(int(bad[0]) + 1, float(closes[bad[0]]))
        back = np.flatnonzero(np.diff(dates) <= np.timedelta64(0, "D"))
        if back.size:
            raise NonMonotonicDates(int(back[0]) + 2)
        object.__setattr__(self, "dates", _frozen(dates))
        object.__setattr__(self, "closes", _frozen(closes))

    def __len__(self) -> int:
        return len(self.closes)


@dataclass(frozen=True)
class ReturnSeries:
    dates: np.ndarray
    values: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        dates = _as_dates(self.dates).copy()
        values = np.array(self.values, dtype=np.float64)
        if dates.shape != values.shape or values.ndim != 1:
            raise ValueError("dates and values must be 1-d and the same length")
        if not np.all(np.isfinite(values)):
            i = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ParseError(i + 1, "non-finite log return")
        object.__setattr__(self, "dates", _frozen(dates))
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def synthetic(cls, values: Sequence[float] | np.ndarray, label: str = "synthetic",
                  epoch: str = SYNTHETIC_EPOCH) -> "ReturnSeries":
        """Wrap bare values with a business-day calendar starting at ``epoch``."""
        values = np.asarray(values, dtype=np.float64)
        return cls(trading_days(len(values), epoch), values, label)


def trading_days(count: int, epoch: str = SYNTHETIC_EPOCH) -> np.ndarray:
    return np.busday_offset(np.datetime64(epoch, "D"), np.arange(count), roll="forward")


# -- CSV -------------------------------------------------------------------

def _data_rows(handle: TextIO) -> Iterator[list[str]]:
    lines = (ln for ln in handle if ln.strip() and not ln.lstrip().startswith("#"))
    yield from csv.reader(lines)


def _read_table(source, columns: tuple[str, str]) -> tuple[list[tuple[int, str, str]], str]:
    """Return (row_number, date_text, value_text) triples; row numbers count data rows from 1."""
    label = ""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise FileNotFoundError(str(path))
        label = path.stem
        handle = path.open("r", encoding="utf-8", newline="")
    else:
        handle = source
    try:
        rows = _data_rows(handle)
        try:
            header = [h.strip().lower() for h in next(rows)]
        except StopIteration:
            raise ParseError(0, "empty file (header required)") from None
        try:
            i_date, i_val = header.index(columns[0]), header.index(columns[1])
        except ValueError:
            raise ParseError(0, f"header must contain {columns[0]!r} and {columns[1]!r}, got {header}") from None
        out = []
        for k, row in enumerate(rows, start=1):
            if len(row) <= max(i_date, i_val):
                raise ParseError(k, f"expected at least {max(i_date, i_val) + 1} fields, got {len(row)}")
            out.append((k, row[i_date].strip(), row[i_val].strip()))
        return out, label
    finally:
        if isinstance(source, (str, Path)):
            handle.close()


def _parse_date(row: int, text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise ParseError(row, f"bad ISO-8601 date {text!r}") from None


def _parse_float(row: int, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(row, f"bad number {text!r}") from None
    if not math.isfinite(v):
        raise ParseError(row, f"non-finite number {text!r}")
    return v


def load_prices(path, format: str = PRICE_SCHEMA, label: str | None = None) -> PriceSeries:
    """Read a ``date,close`` CSV.

    Rows are numbered from 1 starting at the first data row. Non-positive
    closes and out-of-order dates raise rather than being dropped.
    """
    if format != PRICE_SCHEMA:
        raise ValueError(f"unsupported price schema {format!r}")
    rows, stem = _read_table(path, ("date", "close"))
    dates, closes = [], []
    prev = None
    for k, d_text, c_text in rows:
        d = _parse_date(k, d_text)
        c = _parse_float(k, c_text)
        if c <= 0:
            raise NonPositivePrice(k, c)
        if prev is not None and d <= prev:
            raise NonMonotonicDates(k)
        prev = d
        dates.append(d)
        closes.append(c)
    if len(closes) < 2:
        raise SeriesTooShort(f"need at least 2 closes, got {len(closes)}")
    return PriceSeries(np.array(dates, dtype="datetime64[D]"), np.array(closes), label or stem)


def load_returns(path, label: str | None = None) -> ReturnSeries:
    rows, stem = _read_table(path, ("date", "log_return"))
    dates, values = [], []
    prev = None
    for k, d_text, v_text in rows:
        d = _parse_date(k, d_text)
        if prev is not None and d <= prev:
            raise NonMonotonicDates(k)
        prev = d
        dates.append(d)
        values.append(_parse_float(k, v_text))
    if not values:
        raise SeriesTooShort("no returns in file")
    return ReturnSeries(np.array(dates, dtype="datetime64[D]"), np.array(values), label or stem)


def load_series(path) -> ReturnSeries:
    """Load either schema, deciding by the header: prices are converted to log returns."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    with path.open("r", encoding="utf-8", newline="") as fh:
        header = next(_data_rows(fh), [])
    header = [h.strip().lower() for h in header]
    if "log_return" in header:
        return load_returns(path)
    return log_returns(load_prices(path))


def write_returns_csv(series: ReturnSeries, target, comment: str | None = None) -> None:
    def _write(fh: TextIO):
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(RETURN_SCHEMA + "\n")
        for d, x in zip(series.dates, series.values):
            fh.write(f"{d},{x:.17g}\n")

    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
    else:
        _write(target)


def returns_to_csv_text(series: ReturnSeries) -> str:
    buf = io.StringIO()
    write_returns_csv(series, buf)
    return buf.getvalue()


# -- transforms ------------------------------------------------------------

def log_returns(prices: PriceSeries) -> ReturnSeries:
    """x[i] = ln(close[i+1] / close[i]), dated by the later close."""
    closes = prices.closes
    if len(closes) < 2:
        raise SeriesTooShort(f"need at least 2 closes, got {len(closes)}")
    x = np.log(closes[1:] / closes[:-1])
    return ReturnSeries(prices.dates[1:], x, prices.label)


@dataclass(frozen=True)
class WindowPlan:
    start_fraction: float = 0.01
    step_fraction: float = 0.001
    anchor: str = "series_start"
    min_length: int = 2

    def __post_init__(self):
        if not 0 < self.start_fraction <= 1:
            raise ValueError(f"start_fraction must be in (0, 1], got {self.start_fraction}")
        if not 0 < self.step_fraction <= 1:
            raise ValueError(f"step_fraction must be in (0, 1], got {self.step_fraction}")
        if self.anchor not in ANCHORS:
            raise ValueError(f"anchor must be one of {ANCHORS}, got {self.anchor!r}")
        if int(self.min_length) != self.min_length or self.min_length < 2:
            raise ValueError(f"min_length must be an integer >= 2, got {self.min_length}")


@dataclass(frozen=True)
class Window:
    t0: np.datetime64
    N: int
    values: np.ndarray = field(repr=False)
    start: int = 0

    def __len__(self) -> int:
        return self.N


def _half_up(x: np.ndarray) -> np.ndarray:
    # the epsilon keeps exact halves like 2.5 from landing on 2.4999999999999996
    return np.floor(x + 0.5 + 1e-9).astype(np.int64)


def window_lengths(L: int, plan: WindowPlan) -> np.ndarray:
    """Distinct window lengths of the ladder for a series of length ``L``."""
    first = int(_half_up(np.array(plan.start_fraction * L)))
    if first < plan.min_length:
        raise PlanInfeasible(
            f"first window has {first} points (start_fraction={plan.start_fraction}, L={L}); "
            f"min_length is {plan.min_length}"
        )
    k_max = int(math.floor((1.0 - plan.start_fraction) / plan.step_fraction + 1e-9))
    fracs = plan.start_fraction + plan.step_fraction * np.arange(k_max + 1)
    lengths = _half_up(fracs * L)
    lengths = np.minimum(lengths, L)
    lengths = np.unique(np.append(lengths, L))
    return lengths[lengths >= plan.min_length]


def build_windows(returns: ReturnSeries, plan: WindowPlan) -> list[Window]:
    L = len(returns)
    lengths = window_lengths(L, plan)
    out = []
    for n in lengths:
        n = int(n)
        s = 0 if plan.anchor == "series_start" else L - n
        out.append(Window(returns.dates[s], n, returns.values[s:s + n], s))
    return out
