"""Historical Value-at-Risk on growing windows.

The loss at confidence q is minus the (1 - q) empirical quantile of the
window's returns. The quantile interpolates linearly between order
statistics at plotting position (k - 1) / (n - 1) (Hyndman-Fan type 7,
``numpy.quantile(method="linear")``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import WindowTooSmall
from .moments import rows_to_csv
from .series import ReturnSeries, WindowPlan, build_windows

DEFAULT_CONFIDENCE = 0.90
TOO_SMALL_FLAG = "window_too_small"


def min_observations(confidence: float) -> int:
    """Smallest window that puts at least one observation in the tail."""
    if not 0 < confidence < 1:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    return math.ceil(1.0 / (1.0 - confidence) - 1e-9)


def historical_var(w, confidence: float = DEFAULT_CONFIDENCE) -> float:
    x = np.asarray(getattr(w, "values", w), dtype=np.float64)
    need = min_observations(confidence)
    if x.size < max(need, 2):
        raise WindowTooSmall(f"{x.size} observations, need {max(need, 2)} at confidence {confidence}")
    return -float(np.quantile(x, 1.0 - confidence, method="linear"))


@dataclass(frozen=True)
class VarPoint:
    N: int
    var_level: float
    index: int
    flag: str = ""


@dataclass(frozen=True)
class VarCurve:
    points: tuple[VarPoint, ...]
    confidence: float
    plan: WindowPlan

    @property
    def valid(self) -> list[VarPoint]:
        return [p for p in self.points if not p.flag]

    def lengths(self) -> np.ndarray:
        return np.array([p.N for p in self.valid])

    def losses(self) -> np.ndarray:
        return np.array([p.var_level for p in self.valid])


def var_curve(returns: ReturnSeries, plan: WindowPlan, confidence: float = DEFAULT_CONFIDENCE) -> VarCurve:
    points = []
    for i, w in enumerate(build_windows(returns, plan)):
        try:
            points.append(VarPoint(w.N, historical_var(w, confidence), i))
        except WindowTooSmall:
            points.append(VarPoint(w.N, math.nan, i, TOO_SMALL_FLAG))
    return VarCurve(tuple(points), confidence, plan)


def turning_points(curve: VarCurve) -> list[tuple[int, str]]:
    """(N, 'peak' | 'trough') wherever the valid loss sequence changes direction."""
    N, y = curve.lengths(), curve.losses()
    out = []
    direction = 0
    for i in range(1, len(y)):
        d = np.sign(y[i] - y[i - 1])
        if d == 0:
            continue
        if direction and d != direction:
            out.append((int(N[i - 1]), "peak" if direction > 0 else "trough"))
        direction = d
    return out


def curve_rows(curve: VarCurve) -> list[dict]:
    return [{"N": p.N, "var_loss": None if p.flag else p.var_level, "flag": p.flag,
             "window_index": p.index} for p in curve.points]


def curve_to_csv(curve: VarCurve, comment: str | None = None) -> str:
    return rows_to_csv(curve_rows(curve), ["N", "var_loss", "flag", "window_index"], comment)


def curve_to_json(curve: VarCurve, config: dict | None = None) -> str:
    return json.dumps({"config": config or {}, "confidence": curve.confidence,
                       "points": curve_rows(curve)}, indent=1)
