"""Standardised moments of return windows.

All moments use the population convention (divide by N, no bias
correction) and are computed in two passes: the mean first, then powers of
the centred values. Only even orders are supported.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyWindow, OddOrderUnsupported, ZeroVariance
from .series import ReturnSeries, Window, WindowPlan, build_windows

DEFAULT_ORDERS = (4, 6)
ZERO_VARIANCE_FLAG = "zero_variance"


def _values(w) -> np.ndarray:
    return np.asarray(getattr(w, "values", w), dtype=np.float64)


def _check_order(n) -> int:
    if int(n) != n or n < 2 or n % 2:
        raise OddOrderUnsupported(n)
    return int(n)


def _is_constant(x: np.ndarray) -> bool:
    # exact test; a float mean of identical values can leave ~1 ulp residuals
    return x.size == 0 or x.max() == x.min()


def mean(w) -> float:
    x = _values(w)
    if x.size == 0:
        raise EmptyWindow("mean of an empty window")
    return float(x.mean())


def _central(x: np.ndarray, orders: Sequence[int]) -> dict[int, float]:
    d = x - x.mean()
    d2 = d * d
    out = {}
    p = d2
    top = max(orders)
    for k in range(2, top + 1, 2):
        if k > 2:
            p = p * d2
        if k in orders:
            out[k] = float(p.mean())
    return out


def central_moment(w, n: int) -> float:
    """<(x - mu)^n> over the window."""
    n = _check_order(n)
    x = _values(w)
    if x.size == 0:
        raise EmptyWindow("central moment of an empty window")
    if _is_constant(x):
        return 0.0
    return _central(x, (n,))[n]


def _standardise(central: dict[int, float], n: int) -> float:
    return central[n] / central[2] ** (n // 2)


def standardized_moment(w, n: int) -> float:
    """Gamma_n = <(x-mu)^n> / <(x-mu)^2>^(n/2).

    Raises ZeroVariance for a constant window; callers should skip such a
    window rather than substitute a value.
    """
    n = _check_order(n)
    x = _values(w)
    if x.size == 0:
        raise EmptyWindow("standardized moment of an empty window")
    if _is_constant(x):
        raise ZeroVariance("window has zero variance")
    c = _central(x, sorted({2, n}))
    if c[2] <= 0:
        raise ZeroVariance("window has zero variance")
    return _standardise(c, n)


def gaussian_moment(n: int) -> int:
    """Standardised gaussian moment, the double factorial (n-1)!!."""
    n = _check_order(n)
    return math.prod(range(n - 1, 0, -2))


@dataclass(frozen=True)
class GaussianMomentTable:
    values: dict[int, int]

    @classmethod
    def for_orders(cls, orders: Iterable[int] = (2, 4, 6, 8, 10, 12)) -> "GaussianMomentTable":
        return cls({int(n): gaussian_moment(n) for n in orders})


def gaussian_ratio(w, n: int) -> float:
    """R_n = Gamma_n(gaussian) / Gamma_n(window)."""
    return gaussian_moment(n) / standardized_moment(w, n)


@dataclass(frozen=True)
class MomentRecord:
    t0: np.datetime64
    N: int
    mu: float
    central: dict[int, float] = field(default_factory=dict)
    gamma: dict[int, float] = field(default_factory=dict)
    flag: str = ""

    @property
    def degenerate(self) -> bool:
        return self.flag == ZERO_VARIANCE_FLAG

    def ratio(self, n: int) -> float:
        return gaussian_moment(n) / self.gamma[n]


def moment_record(w: Window, orders: Iterable[int] = DEFAULT_ORDERS) -> MomentRecord:
    orders = sorted({2, *(_check_order(n) for n in orders)})
    x = _values(w)
    if x.size == 0:
        raise EmptyWindow("empty window")
    mu = float(x.mean())
    if _is_constant(x):
        return MomentRecord(w.t0, w.N, mu, {n: 0.0 for n in orders}, {}, ZERO_VARIANCE_FLAG)
    c = _central(x, orders)
    if c[2] <= 0:
        return MomentRecord(w.t0, w.N, mu, c, {}, ZERO_VARIANCE_FLAG)
    return MomentRecord(w.t0, w.N, mu, c, {n: _standardise(c, n) for n in orders})


def moment_profile(returns: ReturnSeries, plan: WindowPlan,
                   orders: Iterable[int] = DEFAULT_ORDERS) -> list[MomentRecord]:
    """One record per window of the plan, in window order.

    Zero-variance windows are kept but flagged, and downstream fits skip
    them.
    """
    orders = tuple(orders)
    return [moment_record(w, orders) for w in build_windows(returns, plan)]


# -- export ----------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.17g}"


def records_to_rows(records: Sequence[MomentRecord], orders: Sequence[int]) -> list[dict]:
    rows = []
    for r in records:
        row = {"t0": str(r.t0), "N": r.N, "mu": r.mu}
        for n in orders:
            row[f"gamma_{n}"] = r.gamma.get(n) if not r.degenerate else None
        row["flag"] = r.flag
        rows.append(row)
    return rows


def ratio_rows(records: Sequence[MomentRecord], orders: Sequence[int]) -> list[dict]:
    rows = []
    for r in records:
        row = {"t0": str(r.t0), "N": r.N}
        for n in orders:
            row[f"R_{n}"] = None if r.degenerate else r.ratio(n)
        row["flag"] = r.flag
        rows.append(row)
    return rows


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str], comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        out = []
        for c in columns:
            v = row.get(c)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(_fmt(v))
            else:
                out.append(str(v))
        w.writerow(out)
    return buf.getvalue()


def records_to_csv(records: Sequence[MomentRecord], orders: Sequence[int], comment: str | None = None) -> str:
    cols = ["t0", "N", "mu", *(f"gamma_{n}" for n in orders), "flag"]
    return rows_to_csv(records_to_rows(records, orders), cols, comment)


def records_to_json(records: Sequence[MomentRecord], orders: Sequence[int], config: dict | None = None) -> str:
    doc = {"config": config or {}, "records": records_to_rows(records, orders)}
    return json.dumps(doc, indent=1)
