"""Two-exponent Pareto tail and the window cutoff it implies.

Density (even in x):

    p(x) = 0                          |x| < x0
         = A * |x / x1| ** -gamma1    x0 < |x| < x1
         = A * |x / x1| ** -gamma2    |x| > x1

A window of N draws is assumed to see no returns beyond the cutoff x_W
defined by 2N * P(|x| > x_W) = C, so its even moments are the truncated
integrals <x^n> = 2 * int_{x0}^{x_W} x^n p(x) dx. As x_W grows through the
inner band and then past x1, Gamma_6 against Gamma_4 follows two power
laws with exponents (7 - gamma) / (5 - gamma).

Every integral here is closed form. They are evaluated in r = x / x1, and
the expm1 form keeps (b**k - a**k) / k accurate when k is near zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidExponents, NoSolution, OddOrderUnsupported, ThresholdBelowSupport
from .moments import rows_to_csv
from .series import ReturnSeries

GAMMA_MIN, GAMMA_MAX = 3.0, 5.0


@dataclass(frozen=True)
class TailSpec:
    x0: float
    x1: float
    gamma1: float
    gamma2: float
    C: float = 1.0
    A: float | None = None

    def __post_init__(self):
        if not (0 < self.x0 < self.x1) or not math.isfinite(self.x1):
            raise ValueError(f"need 0 < x0 < x1, got x0={self.x0}, x1={self.x1}")
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        for name in ("gamma1", "gamma2"):
            g = getattr(self, name)
            if not GAMMA_MIN < g < GAMMA_MAX:
                raise InvalidExponents(f"{name}={g} outside ({GAMMA_MIN}, {GAMMA_MAX})")

    @property
    def ratio(self) -> float:
        return self.x0 / self.x1

    def to_json(self) -> str:
        return json.dumps({"x0": self.x0, "x1": self.x1, "gamma1": self.gamma1,
                           "gamma2": self.gamma2, "C": self.C})

    @classmethod
    def from_json(cls, text: str) -> "TailSpec":
        d = json.loads(text)
        return cls(d["x0"], d["x1"], d["gamma1"], d["gamma2"], d.get("C", 1.0))


@dataclass(frozen=True)
class CutoffSolution:
    N: float
    x_W: float
    regime: str  # "inner" (x_W < x1) or "outer"


@dataclass(frozen=True)
class TailPrediction:
    exponent_short: float
    exponent_long: float
    prefactor_short: float | None = None
    prefactor_long: float | None = None

    def with_prefactors(self, fit) -> "TailPrediction":
        """Fill L1, L2 from the intercepts of a fitted two-regime model."""
        return replace(self, prefactor_short=math.exp(fit.short_line.lnA),
                       prefactor_long=math.exp(fit.long_line.lnA))


@dataclass(frozen=True)
class CurvePoint:
    N: float
    x_W: float
    regime: str
    gamma4: float
    gamma6: float


def _power_integral(lo: float, hi: float, k: float) -> float:
    """int_lo^hi r**(k-1) dr for 0 < lo <= hi <= inf."""
    if hi == lo:
        return 0.0
    if math.isinf(hi):
        if k >= 0:
            raise InvalidExponents("divergent tail integral")
        return -(lo ** k) / k
    if k == 0:
        return math.log(hi / lo)
    return lo ** k * math.expm1(k * math.log(hi / lo)) / k


def _check_gamma(g: float):
    if not g > 1:
        raise InvalidExponents(f"tail exponent {g} <= 1 is not normalisable")


def normalize(spec: TailSpec) -> TailSpec:
    """Return ``spec`` with A fixed by total probability one."""
    _check_gamma(spec.gamma1)
    _check_gamma(spec.gamma2)
    mass = _power_integral(spec.ratio, 1.0, 1.0 - spec.gamma1) + 1.0 / (spec.gamma2 - 1.0)
    return replace(spec, A=1.0 / (2.0 * spec.x1 * mass))


def _normalized(spec: TailSpec) -> TailSpec:
    return spec if spec.A is not None else normalize(spec)


def density(spec: TailSpec, x) -> np.ndarray:
    spec = _normalized(spec)
    a = np.abs(np.asarray(x, dtype=np.float64)) / spec.x1
    with np.errstate(divide="ignore"):
        p = np.where(a < 1.0, a ** -spec.gamma1, a ** -spec.gamma2) * spec.A
    return np.where(a * spec.x1 < spec.x0, 0.0, p)


def _boundary_prob(spec: TailSpec) -> float:
    return 2.0 * spec.A * spec.x1 / (spec.gamma2 - 1.0)


def tail_prob(spec: TailSpec, threshold: float) -> float:
    """P(|x| > threshold) = 2 * int_threshold^inf p(x) dx."""
    spec = _normalized(spec)
    if threshold < spec.x0:
        raise ThresholdBelowSupport(f"threshold {threshold} below x0={spec.x0}")
    r = threshold / spec.x1
    if r >= 1.0:
        return 2.0 * spec.A * spec.x1 * _power_integral(r, math.inf, 1.0 - spec.gamma2)
    return 2.0 * spec.A * spec.x1 * (_power_integral(r, 1.0, 1.0 - spec.gamma1) + 1.0 / (spec.gamma2 - 1.0))


def _inverse_tail(spec: TailSpec, q: np.ndarray) -> np.ndarray:
    """Threshold t with tail_prob(t) = q, for q in (0, 1]."""
    q = np.asarray(q, dtype=np.float64)
    p1 = _boundary_prob(spec)
    g1, g2 = spec.gamma1, spec.gamma2
    with np.errstate(divide="ignore", invalid="ignore"):
        outer = (q / p1) ** (-1.0 / (g2 - 1.0))
        J = q / (2.0 * spec.A * spec.x1) - 1.0 / (g2 - 1.0)
        inner = (1.0 + (g1 - 1.0) * J) ** (-1.0 / (g1 - 1.0))
    r = np.where(q <= p1, outer, np.maximum(inner, spec.ratio))
    return r * spec.x1


def solve_xw(spec: TailSpec, N: float) -> CutoffSolution:
    """Cutoff x_W with 2N * tail_prob(x_W) = C."""
    spec = _normalized(spec)
    if not N > 0:
        raise NoSolution(f"N must be positive, got {N}")
    q = spec.C / (2.0 * N)
    if q >= 1.0:
        raise NoSolution(f"C={spec.C} >= 2N={2 * N}: every draw already exceeds x0")
    xw = float(_inverse_tail(spec, q))
    return CutoffSolution(N, xw, "inner" if xw < spec.x1 else "outer")


def n_for_cutoff(spec: TailSpec, x_W: float) -> float:
    """Inverse of solve_xw: the (real-valued) window length whose cutoff is x_W."""
    return _normalized(spec).C / (2.0 * tail_prob(spec, x_W))


def truncated_moment(spec: TailSpec, x_W: float, n: int) -> float:
    """<x^n> = 2 * int_{x0}^{x_W} x^n p(x) dx for even n >= 0 (n = 0 gives the mass below x_W)."""
    if int(n) != n or n < 0 or n % 2:
        raise OddOrderUnsupported(n)
    spec = _normalized(spec)
    if x_W < spec.x0:
        raise ThresholdBelowSupport(f"x_W {x_W} below x0={spec.x0}")
    w = x_W / spec.x1
    k1, k2 = n + 1.0 - spec.gamma1, n + 1.0 - spec.gamma2
    s = _power_integral(spec.ratio, min(w, 1.0), k1)
    if w > 1.0:
        s += _power_integral(1.0, w, k2)
    return 2.0 * spec.A * spec.x1 ** (n + 1) * s


def gamma_curve(spec: TailSpec, N_values: Iterable[float]) -> list[CurvePoint]:
    """Exact Gamma_4, Gamma_6 of the truncated density for each window length.

    The density is even, so raw and central moments coincide.
    """
    spec = _normalized(spec)
    out = []
    for N in N_values:
        sol = solve_xw(spec, N)
        m2, m4, m6 = (truncated_moment(spec, sol.x_W, n) for n in (2, 4, 6))
        out.append(CurvePoint(N, sol.x_W, sol.regime, m4 / m2 ** 2, m6 / m2 ** 3))
    return out


def scaling_exponent(gamma: float, m: int = 6) -> float:
    """Leading-order slope of ln Gamma_m against ln Gamma_4 for tail exponent gamma."""
    if not GAMMA_MIN < gamma < GAMMA_MAX:
        raise InvalidExponents(f"gamma={gamma} outside ({GAMMA_MIN}, {GAMMA_MAX})")
    return (m + 1.0 - gamma) / (5.0 - gamma)


def predicted_exponents(spec: TailSpec) -> TailPrediction:
    return TailPrediction(scaling_exponent(spec.gamma1), scaling_exponent(spec.gamma2))


def sample_tail(spec: TailSpec, count: int, seed: int) -> np.ndarray:
    """i.i.d. draws by inverting P(|x| > t); the sign is +/- with equal probability."""
    spec = _normalized(spec)
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(count)  # (0, 1]
    mag = _inverse_tail(spec, u)
    sign = np.where(rng.random(count) < 0.5, -1.0, 1.0)
    return sign * mag


def sample_tail_series(spec: TailSpec, count: int, seed: int) -> ReturnSeries:
    return ReturnSeries.synthetic(sample_tail(spec, count, seed), label=f"pareto-tail seed={seed}")


def geometric_n_sweep(spec: TailSpec, x_lo: float, x_hi: float, count: int) -> np.ndarray:
    """Window lengths whose cutoffs are log-spaced between x_lo and x_hi."""
    return np.array([n_for_cutoff(spec, x) for x in np.geomspace(x_lo, x_hi, count)])


# -- export ----------------------------------------------------------------

def curve_rows(curve: Sequence[CurvePoint]) -> list[dict]:
    return [{"N": p.N, "x_W": p.x_W, "regime": p.regime, "gamma4": p.gamma4, "gamma6": p.gamma6}
            for p in curve]


def curve_to_csv(curve: Sequence[CurvePoint], comment: str | None = None) -> str:
    return rows_to_csv(curve_rows(curve), ["N", "x_W", "regime", "gamma4", "gamma6"], comment)
