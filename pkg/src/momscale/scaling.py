"""Log-log scaling lines between standardised moments.

A scaling relation Gamma_m = A * Gamma_4**B is a straight line in
(ln Gamma_4, ln Gamma_m). ``fit_two_regimes`` finds the single breakpoint,
taken over window length, that minimises the pooled squared error of two
independent OLS lines. It scans every admissible split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateDesign, NoUsablePoints, TooFewPoints
from .moments import MomentRecord, rows_to_csv

DEFAULT_PAIR = (4, 6)
DEFAULT_MIN_SEGMENT = 10
# slope-difference z score (AR(1)-adjusted standard errors) below which the
# two regimes are reported as indistinguishable
DISTINCT_Z = 3.0


@dataclass(frozen=True)
class LogLogPoint:
    N: int
    lx: float
    ly: float


@dataclass(frozen=True)
class ScalingLine:
    B: float
    lnA: float
    sse: float
    n_points: int
    slope_se: float = math.nan

    @property
    def A(self) -> float:
        return math.exp(self.lnA)

    def __call__(self, lx):
        return self.B * np.asarray(lx) + self.lnA


@dataclass(frozen=True)
class TwoRegimeFit:
    short_line: ScalingLine
    long_line: ScalingLine
    split_N: int
    split_index: int
    total_sse: float

    @property
    def slope_z(self) -> float:
        dB = abs(self.short_line.B - self.long_line.B)
        se = math.hypot(self.short_line.slope_se, self.long_line.slope_se)
        if dB == 0:
            return 0.0
        if se == 0:
            return math.inf
        return dB / se  # nan if either se is undefined

    @property
    def distinguishable(self) -> bool:
        z = self.slope_z
        return bool(z >= DISTINCT_Z)


def loglog_points(records: Sequence[MomentRecord], pair: tuple[int, int] = DEFAULT_PAIR,
                  min_window: int = 2) -> tuple[list[LogLogPoint], int]:
    """Convert moment records to (ln Gamma_4, ln Gamma_m) points ordered by N.

    Returns ``(points, excluded)``. A record is excluded when it is flagged
    degenerate, is shorter than ``min_window``, lacks either order, or has a
    non-positive value.
    """
    p, m = pair
    if m % 2 or p % 2:
        raise ValueError(f"moment pair must be even orders, got {pair}")
    points, excluded = [], 0
    for r in records:
        gx, gy = r.gamma.get(p), r.gamma.get(m)
        if (r.degenerate or r.N < min_window or gx is None or gy is None
                or not (gx > 0 and gy > 0) or not (math.isfinite(gx) and math.isfinite(gy))):
            excluded += 1
            continue
        points.append(LogLogPoint(r.N, math.log(gx), math.log(gy)))
    if not points:
        raise NoUsablePoints(f"no usable records out of {len(records)}")
    points.sort(key=lambda q: q.N)
    return points, excluded


def _arrays(points: Sequence[LogLogPoint]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    N = np.array([q.N for q in points], dtype=np.int64)
    lx = np.array([q.lx for q in points], dtype=np.float64)
    ly = np.array([q.ly for q in points], dtype=np.float64)
    order = np.lexsort((ly, lx, N))
    return N[order], lx[order], ly[order]


def _ols(lx: np.ndarray, ly: np.ndarray) -> ScalingLine:
    n = lx.size
    xm = lx.mean()
    dx = lx - xm
    sxx = float(dx @ dx)
    if n < 2 or sxx == 0.0:
        raise DegenerateDesign("all ln Gamma_4 values are equal")
    ym = ly.mean()
    B = float(dx @ (ly - ym)) / sxx
    lnA = float(ym - B * xm)
    r = ly - (B * lx + lnA)
    sse = float(r @ r)
    se = math.nan
    if n > 2:
        rho = float(r[1:] @ r[:-1]) / sse if sse > 0 else 0.0
        rho = min(max(rho, 0.0), 0.999999)
        se = math.sqrt(sse / (n - 2) / sxx * (1 + rho) / (1 - rho))
    return ScalingLine(B, lnA, sse, n, se)


def fit_line(points: Sequence[LogLogPoint]) -> ScalingLine:
    """Ordinary least squares for ly = B * lx + lnA."""
    _, lx, ly = _arrays(points)
    return _ols(lx, ly)


def fit_two_regimes(points: Sequence[LogLogPoint], min_segment: int = DEFAULT_MIN_SEGMENT) -> TwoRegimeFit:
    """Best single breakpoint, scanning every split that leaves ``min_segment`` points per side.

    Shorter windows form the first segment. When two splits give exactly
    the same pooled error, the one with the smaller split_N wins.
    """
    if min_segment < 2:
        raise ValueError("min_segment must be at least 2")
    N, lx, ly = _arrays(points)
    n = N.size
    if n < 2 * min_segment:
        raise TooFewPoints(f"{n} points, need at least {2 * min_segment}")
    best = None
    for k in range(min_segment, n - min_segment + 1):
        try:
            a = _ols(lx[:k], ly[:k])
            b = _ols(lx[k:], ly[k:])
        except DegenerateDesign:
            continue
        total = a.sse + b.sse
        if best is None or total < best[0]:
            best = (total, k, a, b)
    if best is None:
        raise DegenerateDesign("no split leaves both segments with distinct ln Gamma_4")
    total, k, a, b = best
    return TwoRegimeFit(a, b, int(N[k]), k, total)


# -- export ----------------------------------------------------------------

def fit_report(fit: TwoRegimeFit, pair: tuple[int, int], excluded: int,
               single: ScalingLine | None = None) -> dict:
    report = {
        "pair": list(pair),
        "B_short": fit.short_line.B,
        "lnA_short": fit.short_line.lnA,
        "B_long": fit.long_line.B,
        "lnA_long": fit.long_line.lnA,
        "split_N": fit.split_N,
        "sse_short": fit.short_line.sse,
        "sse_long": fit.long_line.sse,
        "excluded_points": excluded,
        "n_short": fit.short_line.n_points,
        "n_long": fit.long_line.n_points,
        "slope_z": fit.slope_z if math.isfinite(fit.slope_z) else None,
        "regimes_distinguishable": fit.distinguishable,
        "breakpoint_method": "exhaustive single-breakpoint OLS, minimum pooled SSE",
    }
    if single is not None:
        report.update(B_single=single.B, lnA_single=single.lnA, sse_single=single.sse)
    return report


def plot_rows(points: Sequence[LogLogPoint], fit: TwoRegimeFit) -> list[dict]:
    N, lx, ly = _arrays(points)
    rows = []
    for i in range(N.size):
        line, regime = (fit.short_line, "short") if i < fit.split_index else (fit.long_line, "long")
        rows.append({"lx": float(lx[i]), "ly": float(ly[i]), "regime": regime,
                     "fitted_ly": float(line(lx[i])), "N": int(N[i])})
    return rows


def plot_csv(points: Sequence[LogLogPoint], fit: TwoRegimeFit, comment: str | None = None) -> str:
    return rows_to_csv(plot_rows(points, fit), ["lx", "ly", "regime", "fitted_ly", "N"], comment)
