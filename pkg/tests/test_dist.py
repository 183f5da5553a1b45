import math

import mpmath as mp
import numpy as np
import pytest
from scipy import stats as sps

from ..dist import (
    cdf,
    cdf_tails,
    contour_is_stable,
    limit_checks,
    logpdf_ts,
    mode,
    pdf,
    pdf_left_tail,
    pdf_right_tail,
    pdf_ts,
    quantile,
    sf,
    slope_integral,
)
from ..exceptions import DomainError
from ..models.params import AtsParams
from ..params import laplace_ats
from ..quad import integrate_semi_infinite
from ..utils import InversionMethod, TailRegime


def _mp_density(log_transform, x: float, dps: int = 30) -> float:
    with mp.workdps(dps):
        return float(mp.invertlaplace(lambda s: mp.exp(log_transform(s)), x, method="talbot"))


def _ag_log_transform(at, b):
    return lambda s: at - at * (1 + b / s) * mp.log(1 + s / b)


def _aig_log_transform(at, b):
    root_pi = mp.sqrt(mp.pi)
    return lambda s: 4 * root_pi * at * (mp.mpf(b) ** 1.5 + 1.5 * mp.sqrt(b) * s - (b + s) ** 1.5) / (3 * s)


def _ats_log_transform(at, b, c):
    scale, b = at * mp.gamma(-c), mp.mpf(b)
    return lambda s: scale * (((b + s) ** (c + 1) - b ** (c + 1)) / ((c + 1) * s) - b**c)


@pytest.mark.parametrize("x", [0.3, 1.0, 2.5])
def test_average_gamma_density_against_talbot_oracle(x):
    p = AtsParams(a=2.0, b=1.5, c=0.0)
    assert pdf(p, x) == pytest.approx(_mp_density(_ag_log_transform(2.0, 1.5), x), rel=1e-8)


@pytest.mark.parametrize("x", [0.2, 0.9, 3.0])
def test_average_ig_density_against_talbot_oracle(x):
    p = AtsParams(a=1.0, b=1.0, c=0.5)
    assert pdf(p, x) == pytest.approx(_mp_density(_aig_log_transform(1.0, 1.0), x), rel=1e-8)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_contour_and_talbot_routes_agree(x):
    p = AtsParams(a=2.0, b=1.0, c=0.3)
    contour = pdf(p, x, method=InversionMethod.CONTOUR)
    talbot = pdf(p, x, method=InversionMethod.TALBOT)
    assert contour == pytest.approx(talbot, rel=1e-6)
    assert cdf(p, x, method=InversionMethod.CONTOUR) == pytest.approx(cdf(p, x, method=InversionMethod.TALBOT), abs=1e-7)


def test_heavy_exponent_leaves_the_contour():
    p = AtsParams(a=5.0, b=1.0, c=0.9)
    assert not contour_is_stable(p, 1e-3)
    assert contour_is_stable(AtsParams(a=1.0, b=1.0, c=0.0), 1e-3)


def test_large_shape_falls_back_to_talbot():
    p = AtsParams(a=40.0, b=1.0, c=0.0)
    assert not contour_is_stable(p, 20.0)
    assert pdf(p, 20.0) == pytest.approx(_mp_density(_ag_log_transform(40.0, 1.0), 20.0), rel=1e-6)


def test_distribution_function_and_survival_are_complements(reference):
    xs = np.array([0.1, 0.5, 1.0, 3.0, 8.0])
    np.testing.assert_allclose(cdf(reference, xs) + sf(reference, xs), 1.0, atol=1e-12)
    values = cdf(reference, xs)
    assert np.all(np.diff(values) > 0)
    assert np.all((values >= 0) & (values <= 1))


def test_deep_right_tail_keeps_relative_accuracy(reference):
    far = sf(reference, 40.0)
    assert 0.0 < far < 1e-15
    assert far == pytest.approx(cdf_tails(reference, 40.0, TailRegime.RIGHT).value, rel=0.3)


def test_density_integrates_to_the_distribution_function(average_gamma):
    from ..quad import integrate_finite

    res = integrate_finite(lambda x: pdf(average_gamma, x), 1e-12, 1.5)
    assert res.value == pytest.approx(cdf(average_gamma, 1.5), abs=1e-8)


def test_pdf_accepts_arrays(reference):
    xs = np.array([[0.5, 1.0], [1.5, 2.0]])
    out = pdf(reference, xs)
    assert out.shape == xs.shape
    assert out[0, 1] == pytest.approx(pdf(reference, 1.0))


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf])
def test_density_domain(reference, x):
    with pytest.raises(DomainError):
        pdf(reference, x)


def test_point_mass_at_time_zero(reference):
    with pytest.raises(DomainError):
        cdf(reference.with_horizon(0.0), 1.0)


@pytest.mark.parametrize("q", [0.05, 0.5, 0.95])
def test_quantile_inverts_cdf(reference, q):
    x = quantile(reference, q)
    assert cdf(reference, x) == pytest.approx(q, abs=1e-10)


def test_quantile_domain(reference):
    with pytest.raises(DomainError):
        quantile(reference, 1.0)


def test_mode_is_a_local_maximum():
    p = AtsParams(a=2.0, b=1.0, c=0.5)
    m = mode(p)
    assert abs(slope_integral(p, m)) < 1e-6
    assert pdf(p, m) > pdf(p, 0.95 * m)
    assert pdf(p, m) > pdf(p, 1.05 * m)


def test_mode_sits_at_the_origin_for_small_average_gamma_shapes():
    assert mode(AtsParams(a=1.0, b=2.0, c=0.0)) == 0.0
    assert mode(AtsParams(a=3.0, b=2.0, c=0.0)) > 0.0


def test_right_tail_estimate(reference):
    ratios = [pdf(reference, x) / pdf_right_tail(reference, x).value for x in (20.0, 60.0)]
    assert abs(ratios[1] - 1.0) < 0.15
    assert abs(ratios[1] - 1.0) < abs(ratios[0] - 1.0)


def test_average_gamma_left_tail_for_unit_shape():
    p = AtsParams(a=1.0, b=1.0, c=0.0)
    estimate = pdf_left_tail(p, 1e-4)
    assert not estimate.leading_order_only
    assert pdf(p, 1e-4) == pytest.approx(estimate.value, rel=2e-5)
    assert cdf(p, 1e-4) == pytest.approx(cdf_tails(p, 1e-4, TailRegime.LEFT).value, rel=2e-5)
    assert pdf(p, 1e-6) == pytest.approx(math.e, rel=2e-3)


def test_tail_estimates_carry_their_regime(reference):
    assert cdf_tails(reference, 20.0, TailRegime.RIGHT).regime is TailRegime.RIGHT
    left = cdf_tails(AtsParams(a=0.5, b=1.0, c=0.0), 1e-4, TailRegime.LEFT)
    assert left.regime is TailRegime.LEFT
    assert left.value == pytest.approx(cdf(AtsParams(a=0.5, b=1.0, c=0.0), 1e-4), rel=1e-2)


def test_limits_of_the_exponent(reference):
    report = limit_checks(reference)
    assert report.activity_limit < 1e-7
    assert report.stable_limit < 1e-3
    assert report.gamma_limit < 1e-4


def test_closed_form_ts_densities():
    gamma_p = AtsParams(a=1.5, b=2.0, c=0.0, t=2.0)
    xs = np.array([0.2, 1.0, 3.0])
    np.testing.assert_allclose(logpdf_ts(gamma_p, xs), sps.gamma.logpdf(xs, 3.0, scale=0.5), rtol=1e-12)
    ig = AtsParams(a=0.8, b=1.2, c=0.5)
    mean, shape = math.sqrt(math.pi) * 0.8 / math.sqrt(1.2), 2.0 * math.pi * 0.8**2
    np.testing.assert_allclose(logpdf_ts(ig, xs), sps.invgauss.logpdf(xs, mean / shape, scale=shape), rtol=1e-12)
    with pytest.raises(DomainError):
        logpdf_ts(AtsParams(a=1.0, b=1.0, c=0.3), xs)


@pytest.mark.parametrize("x", [0.0177, 0.00886])
def test_deep_left_tail_of_the_average_ig(x):
    p = AtsParams(a=1.0, b=1.0, c=0.5)
    value = pdf(p, x)
    assert value == pytest.approx(_mp_density(_ats_log_transform(1.0, 1.0, 0.5), x, dps=80), rel=1e-6)
    assert value == pytest.approx(pdf_left_tail(p, x).value, rel=1e-2)


def test_distribution_function_is_monotone_from_the_deep_left_tail(reference):
    values = cdf(reference, np.array([0.00886, 0.0177, 0.03, 0.06, 0.1, 0.3]))
    assert np.all(np.isfinite(values))
    assert values[0] > 0.0
    assert np.all(np.diff(values) > 0)


HEAVY = AtsParams(a=0.5, b=1.0, c=0.75)


@pytest.mark.parametrize("x", [0.02, 0.05, 0.0723])
def test_heavy_exponent_density_underflows_cleanly(x):
    value = pdf(HEAVY, x)
    assert math.isfinite(value)
    assert 0.0 <= value <= 1e-300


@pytest.mark.parametrize("x", [0.1, 0.15, 0.2])
def test_heavy_exponent_density_against_talbot_oracle(x):
    oracle = _mp_density(_ats_log_transform(0.5, 1.0, 0.75), x, dps=150)
    assert pdf(HEAVY, x) == pytest.approx(oracle, rel=1e-6)


def test_heavy_exponent_distribution_function():
    xs = np.array([0.02, 0.05, 0.1, 0.15, 0.2, 0.5, 1.0, 3.0])
    values = cdf(HEAVY, xs)
    assert np.all(np.isfinite(values))
    assert np.all((values >= 0) & (values <= 1))
    assert np.all(np.diff(values[2:]) > 0)
    np.testing.assert_allclose(values + sf(HEAVY, xs), 1.0, atol=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("u", [0.5, 1.0, 2.0, 5.0])
def test_heavy_exponent_density_reproduces_the_transform(u):
    res = integrate_semi_infinite(lambda x: np.exp(-u * x) * pdf(HEAVY, x), 0.0)
    assert res.value == pytest.approx(laplace_ats(HEAVY, u).real, abs=1e-6)


def test_density_is_the_derivative_of_the_distribution_function(reference):
    for x in (0.3, 0.9, 2.5):
        h = 1e-3 * x
        slope = (cdf(reference, x + h) - cdf(reference, x - h)) / (2.0 * h)
        assert slope == pytest.approx(pdf(reference, x), rel=1e-5)


def test_density_has_unit_mass_and_the_right_mean(reference):
    mean = math.gamma(0.5) / 2.0
    assert integrate_semi_infinite(lambda x: pdf(reference, x), 0.0).value == pytest.approx(1.0, abs=1e-8)
    assert integrate_semi_infinite(lambda x: x * pdf(reference, x), 0.0).value == pytest.approx(mean, abs=1e-7)


UNIMODAL_CASES = [
    AtsParams(a=1.0, b=1.0, c=0.5),
    AtsParams(a=2.0, b=1.0, c=0.25),
    HEAVY,
    AtsParams(a=2.0, b=1.0, c=0.0),
]


@pytest.mark.parametrize("p", UNIMODAL_CASES)
def test_density_rises_then_falls(p):
    mean = p.shape * math.gamma(1.0 - p.c) / (2.0 * p.b ** (1.0 - p.c))
    values = pdf(p, np.geomspace(0.02 * mean, 12.0 * mean, 500))
    peak = int(np.argmax(values))
    assert np.all(np.diff(values[: peak + 1]) >= 0)
    assert np.all(np.diff(values[peak:]) <= 0)


@pytest.mark.parametrize("p", UNIMODAL_CASES)
def test_slope_changes_sign_once(p):
    mean = p.shape * math.gamma(1.0 - p.c) / (2.0 * p.b ** (1.0 - p.c))
    slopes = np.array([slope_integral(p, x) for x in np.geomspace(0.1 * mean, 12.0 * mean, 200)])
    signs = np.sign(slopes[slopes != 0])
    assert np.count_nonzero(np.diff(signs)) == 1


def test_mode_matches_the_grid_maximum(reference):
    m = mode(reference)
    grid = np.linspace(0.5 * m, 1.5 * m, 401)
    assert grid[np.argmax(pdf(reference, grid))] == pytest.approx(m, abs=grid[1] - grid[0])


@pytest.mark.parametrize("p", [AtsParams(a=1.0, b=1.0, c=0.5), AtsParams(a=2.0, b=1.0, c=0.0)])
def test_average_density_is_steeper_than_the_subordinator_density(p):
    grid = np.geomspace(1e-3, 10.0, 500)
    assert np.max(pdf(p, grid)) > np.max(pdf_ts(p, grid))


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_saddle_route_agrees_with_the_contour(reference, x):
    saddle = pdf(reference, x, method=InversionMethod.SADDLE)
    assert saddle == pytest.approx(pdf(reference, x, method=InversionMethod.CONTOUR), rel=1e-7)
    assert cdf(reference, x, method=InversionMethod.SADDLE) == pytest.approx(
        cdf(reference, x, method=InversionMethod.CONTOUR), abs=1e-9
    )


def test_saddle_route_needs_a_positive_exponent():
    with pytest.raises(DomainError):
        pdf(AtsParams(a=1.0, b=1.0, c=0.0), 1.0, method=InversionMethod.SADDLE)
