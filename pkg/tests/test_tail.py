from __future__ import annotations

import csv
import io
import math

import numpy as np
import pytest
from scipy import optimize

from momscale.errors import InvalidExponents, NoSolution, OddOrderUnsupported, ThresholdBelowSupport
from momscale.moments import moment_profile, standardized_moment
from momscale.scaling import LogLogPoint, fit_two_regimes, loglog_points
from momscale.series import WindowPlan
from momscale.tail import (
    TailPrediction,
    TailSpec,
    curve_to_csv,
    gamma_curve,
    n_for_cutoff,
    normalize,
    predicted_exponents,
    sample_tail,
    sample_tail_series,
    solve_xw,
    tail_prob,
    truncated_moment,
)

from oracles import (
    asymptotic_slopes,
    curve_points,
    oracle_A,
    oracle_integral,
    oracle_moment,
    oracle_tail,
    random_spec,
    rel,
)


# -- normalisation ---------------------------------------------------------

def test_normalize_matches_quadrature():
    spec = normalize(TailSpec(0.01, 0.05, 4.5, 3.5))
    assert rel(spec.A, oracle_A(spec)) < 1e-10
    assert oracle_integral(spec, spec.x0, math.inf, 0, spec.A) == pytest.approx(1.0, abs=1e-10)


def test_equal_exponents_single_pareto():
    g = 3.7
    spec = normalize(TailSpec(0.002, 0.03, g, g))
    assert spec.A == pytest.approx((g - 1) / (2 * spec.x1 ** g * spec.x0 ** (1 - g)), rel=1e-12)


def test_vanishing_inner_band():
    x1 = 0.04
    spec = normalize(TailSpec(x1 * (1 - 1e-9), x1, 4.2, 3.3))
    assert spec.A == pytest.approx((3.3 - 1) / (2 * x1), rel=1e-8)


def test_spec_validation():
    with pytest.raises(InvalidExponents):
        TailSpec(0.01, 0.1, 5.0, 3.5)
    with pytest.raises(InvalidExponents):
        TailSpec(0.01, 0.1, 4.0, 3.0)
    with pytest.raises(ValueError):
        TailSpec(0.1, 0.1, 4.0, 3.5)
    with pytest.raises(ValueError):
        TailSpec(0.01, 0.1, 4.0, 3.5, C=0)
    s = TailSpec(0.01, 0.1, 4.0, 3.5, C=2.0)
    assert TailSpec.from_json(s.to_json()) == s


# -- tail probability ------------------------------------------------------

def test_tail_prob_examples():
    spec = normalize(TailSpec(0.01, 0.05, 4.5, 3.5))
    assert tail_prob(spec, spec.x0) == pytest.approx(1.0, abs=1e-14)
    assert tail_prob(spec, spec.x1) == pytest.approx(2 * spec.A * spec.x1 / 2.5, rel=1e-14)
    with pytest.raises(ThresholdBelowSupport):
        tail_prob(spec, 0.005)


def test_closed_forms_match_quadrature():
    rng = np.random.default_rng(77)
    for _ in range(100):
        spec = normalize(random_spec(rng))
        assert rel(spec.A, oracle_A(spec)) < 1e-10
        t = spec.x0 * 10 ** rng.uniform(0, math.log10(spec.x1 / spec.x0) + 2)
        assert rel(tail_prob(spec, t), oracle_tail(spec, t)) < 1e-10
        for n in (2, 4, 6):
            assert rel(truncated_moment(spec, t, n), oracle_moment(spec, t, n)) < 1e-10


# -- cutoff ------------------------------------------------------------------

def test_boundary_cutoff():
    spec = normalize(TailSpec(0.01, 0.05, 4.5, 3.5))
    N_star = spec.C / (2 * tail_prob(spec, spec.x1))
    sol = solve_xw(spec, N_star)
    assert sol.x_W == pytest.approx(spec.x1, rel=1e-12)
    assert sol.regime == "outer"
    assert n_for_cutoff(spec, spec.x1) == pytest.approx(N_star, rel=1e-15)


def test_cutoff_against_bisection_on_oracle():
    rng = np.random.default_rng(5)
    for _ in range(30):
        spec = normalize(random_spec(rng, C=rng.uniform(0.5, 2)))
        N = spec.C / 2 * 10 ** rng.uniform(0.1, 6)
        f = lambda s: 2 * N * oracle_tail(spec, math.exp(s)) - spec.C
        ref = math.exp(optimize.brentq(f, math.log(spec.x0), math.log(spec.x1) + 10, xtol=1e-15, rtol=1e-15))
        sol = solve_xw(spec, N)
        assert rel(sol.x_W, ref) < 1e-10
        assert sol.regime == ("inner" if ref < spec.x1 else "outer")


def test_cutoff_grows_with_window():
    rng = np.random.default_rng(6)
    for _ in range(100):
        spec = random_spec(rng)
        N = 10 ** rng.uniform(0, 7)
        assert solve_xw(spec, 2 * N).x_W > solve_xw(spec, N).x_W
    spec = TailSpec(1e-3, 1e-1, 4.5, 3.5)
    xs = [solve_xw(spec, n).x_W for n in np.geomspace(1, 1e12, 400)]
    assert all(b > a for a, b in zip(xs, xs[1:]))


def test_cutoff_continuous_at_crossing():
    spec = normalize(TailSpec(1e-3, 1e-1, 4.5, 3.5))
    N_star = n_for_cutoff(spec, spec.x1)
    below, above = solve_xw(spec, N_star * (1 - 1e-12)), solve_xw(spec, N_star * (1 + 1e-12))
    assert below.x_W == pytest.approx(spec.x1, rel=1e-9)
    assert above.x_W == pytest.approx(spec.x1, rel=1e-9)
    assert below.regime == "inner" and above.regime == "outer"


def test_no_solution():
    spec = TailSpec(0.01, 0.05, 4.5, 3.5, C=2.0)
    with pytest.raises(NoSolution):
        solve_xw(spec, 1)
    with pytest.raises(NoSolution):
        solve_xw(spec, 0)
    assert solve_xw(spec, 1.01).x_W > spec.x0


# -- truncated moments -------------------------------------------------------

def test_zeroth_moment_is_mass_below_cutoff():
    spec = normalize(TailSpec(0.01, 0.05, 4.5, 3.5))
    for t in (0.01, 0.02, 0.05, 0.3, 7.0):
        assert truncated_moment(spec, t, 0) == pytest.approx(1 - tail_prob(spec, t), abs=1e-14)


def test_second_moment_inner_formula():
    spec = normalize(TailSpec(0.01, 0.05, 4.5, 3.5))
    g1, x0, x1, xw = spec.gamma1, spec.x0, spec.x1, 0.03
    expected = 2 * spec.A * x1 ** g1 * (xw ** (3 - g1) - x0 ** (3 - g1)) / (3 - g1)
    assert truncated_moment(spec, xw, 2) == pytest.approx(expected, rel=1e-12)


def test_truncated_moment_errors():
    spec = TailSpec(0.01, 0.05, 4.5, 3.5)
    with pytest.raises(OddOrderUnsupported):
        truncated_moment(spec, 0.02, 3)
    with pytest.raises(ThresholdBelowSupport):
        truncated_moment(spec, 0.001, 2)


# -- predicted and exact scaling -----------------------------------------------

def test_predicted_exponents():
    assert predicted_exponents(TailSpec(1e-3, 1e-1, 4.0, 3.5)).exponent_short == 3.0
    p = predicted_exponents(TailSpec(1e-3, 1e-1, 4.5, 3.5))
    assert p.exponent_short == 5.0
    assert p.exponent_long == pytest.approx(7 / 3, rel=1e-15)
    rng = np.random.default_rng(0)
    for _ in range(200):
        g1, g2 = rng.uniform(3.001, 4.999, 2)
        p = predicted_exponents(TailSpec(1e-3, 1e-1, g1, g2))
        assert (p.exponent_short > p.exponent_long) == (g1 > g2)


def test_wide_separation_recovers_both_exponents():
    short, long_ = asymptotic_slopes(TailSpec(1e-9, 1e-1, 4.5, 3.5))
    assert short == pytest.approx(5.0, rel=0.02)
    assert long_ == pytest.approx(7 / 3, rel=0.02)


def test_slopes_converge_with_separation():
    errors = []
    for sep in (1e2, 1e3, 1e4):
        short, long_ = asymptotic_slopes(TailSpec(1e-1 / sep, 1e-1, 4.5, 3.5))
        errors.append((abs(short / 5 - 1), abs(long_ / (7 / 3) - 1)))
    for (s0, l0), (s1, l1) in zip(errors, errors[1:]):
        assert s1 < s0 and l1 < l0


def test_short_slope_exceeds_long_slope():
    # asymptotic corrections decay like (x_W/x0)^-(5-gamma1), so the ordering is
    # checked where the inner band is wide and gamma1 is not crowding 5
    rng = np.random.default_rng(2)
    for _ in range(60):
        g2 = rng.uniform(3.01, 4.4)
        g1 = rng.uniform(g2 + 0.05, 4.5)
        spec = TailSpec(1e-9, 1e-9 * 10 ** rng.uniform(4, 8), g1, g2)
        short, long_ = asymptotic_slopes(spec, 40)
        assert short > long_ - 1e-3


def test_equal_exponents_give_one_slope():
    spec = TailSpec(1e-6, 1e-3, 4.0, 4.0)
    fit = fit_two_regimes(curve_points(spec, 1e-4, 1e0, 120))
    assert abs(fit.short_line.B - fit.long_line.B) < 0.05
    assert fit.short_line.B == pytest.approx(3.0, rel=0.02)


def test_curve_regimes_and_export():
    spec = TailSpec(1e-3, 1e-1, 4.5, 3.5)
    curve = gamma_curve(spec, np.geomspace(1, 1e9, 50))
    assert curve[0].regime == "inner" and curve[-1].regime == "outer"
    rows = list(csv.DictReader(io.StringIO(curve_to_csv(curve))))
    assert list(rows[0]) == ["N", "x_W", "regime", "gamma4", "gamma6"]
    assert float(rows[10]["gamma6"]) == curve[10].gamma6
    with pytest.raises(NoSolution):
        gamma_curve(spec, [0.4])


def test_prefactors_from_fit():
    pts = [LogLogPoint(i, 1 + i / 40, (5 if i < 20 else 7 / 3) * (1 + i / 40) + (0.5 if i < 20 else 3)) for i in range(40)]
    pred = predicted_exponents(TailSpec(1e-3, 1e-1, 4.5, 3.5)).with_prefactors(fit_two_regimes(pts))
    assert isinstance(pred, TailPrediction)
    assert pred.prefactor_short == pytest.approx(math.exp(0.5), rel=1e-9)
    assert pred.prefactor_long == pytest.approx(math.exp(3), rel=1e-9)


# -- sampler -------------------------------------------------------------------

def test_sampler_fraction_beyond_x1():
    spec = normalize(TailSpec(1e-3, 1e-2, 4.5, 3.5))
    x = sample_tail(spec, 10**6, seed=1)
    p = tail_prob(spec, spec.x1)
    frac = np.mean(np.abs(x) > spec.x1)
    assert abs(frac - p) < 3 * math.sqrt(p * (1 - p) / x.size)
    assert np.all(np.abs(x) >= spec.x0)
    assert abs(np.mean(x > 0) - 0.5) < 3 * 0.5 / math.sqrt(x.size)


def test_sampler_hill_estimate():
    g = 4.0
    x = np.sort(np.abs(sample_tail(TailSpec(1e-3, 1e-2, g, g), 10**6, seed=2)))[::-1]
    k = x.size // 100
    hill = 1.0 / np.mean(np.log(x[:k] / x[k]))
    assert hill == pytest.approx(g - 1, rel=0.10)


def test_sampler_truncated_kurtosis():
    spec = normalize(TailSpec(1e-3, 1e-2, 4.5, 3.5))
    x = sample_tail(spec, 10**6, seed=3)
    x_W = 2e-2
    kept = x[np.abs(x) < x_W]
    m0, m2, m4 = (truncated_moment(spec, x_W, n) for n in (0, 2, 4))
    # conditional on |x| < x_W, so the mass m0 re-enters; 20 seeds give a
    # spread of about 3.3%, so allow three of those
    assert standardized_moment(kept, 4) == pytest.approx(m4 * m0 / m2 ** 2, rel=0.10)


def test_sampler_deterministic():
    spec = TailSpec(1e-3, 1e-2, 4.5, 3.5)
    assert sample_tail(spec, 1000, 9).tobytes() == sample_tail(spec, 1000, 9).tobytes()
    assert len(sample_tail_series(spec, 50, 0)) == 50


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="nested-window noise and the sampled cutoff range keep fitted "
                                       "slopes far from the asymptotic exponents; see decisions ledger")
def test_pipeline_recovers_exponents():
    spec = TailSpec(1e-3, 1e-1, 4.5, 3.5)
    series = sample_tail_series(spec, 10**6, seed=0)
    fit = fit_two_regimes(loglog_points(moment_profile(series, WindowPlan(), (4, 6)))[0])
    assert fit.short_line.B == pytest.approx(5.0, rel=0.15)
    assert fit.long_line.B == pytest.approx(7 / 3, rel=0.15)
