import math

import numpy as np
import pytest
from scipy import stats as sps

from ..degrade import (
    INSPECTION_TIMES,
    batch_report,
    expected_condition,
    fisher_standard_errors,
    fit_mle,
    gamma_survival_probability,
    load_series_csv,
    log_likelihood,
    median_lifetime,
    model_recovery_rate,
    simulate_series,
    survival_probability,
    transform_series,
    transformed_spacings,
)
from ..dist import cdf
from ..exceptions import DataFormatError, DomainError
from ..models.degrade import BarrierSpec, DegradationSeries
from ..models.params import AtsParams
from ..moments import stats
from ..utils import DegradationModel

BARRIER = BarrierSpec(initial_condition=4.8, alert_level=1.0)


def test_transform_recovers_step_averages():
    # cumulative integrals 0, 1, 3, 6 at t = 0..3, i.e. levels 1, 2, 3 over the steps
    s = DegradationSeries(unit_id="u1", times=[0.0, 1.0, 2.0, 3.0], readings=[0.0, 1.0, 1.5, 2.0])
    increments, usable = transform_series(s)
    np.testing.assert_allclose(increments, [1.0, 1.0])
    np.testing.assert_allclose(transformed_spacings(s), [1.0, 1.0])
    assert usable


def test_transform_flags_unusable_units():
    s = DegradationSeries(unit_id="u1", times=[0.0, 1.0, 2.0, 3.0], readings=[0.0, 1.0, 0.8, 0.6])
    _, usable = transform_series(s)
    assert not usable
    with pytest.raises(DomainError):
        transform_series(DegradationSeries(unit_id="u2", times=[0.0, 1.0], readings=[0.0, 1.0]))


def test_gamma_log_likelihood_matches_scipy():
    x = np.array([0.3, 1.2, 0.7])
    dts = np.array([0.5, 1.0, 2.0])
    expected = sps.gamma.logpdf(x, 1.5 * dts, scale=1.0 / 2.0).sum()
    assert log_likelihood(DegradationModel.GAMMA, 1.5, 2.0, x, dts) == pytest.approx(expected, rel=1e-12)


def test_ig_log_likelihood_matches_scipy():
    x = np.array([0.3, 1.2, 0.7])
    dts = np.array([0.5, 1.0, 2.0])
    a, b = 1.5, 2.0
    mean, shape = math.sqrt(math.pi) * a * dts / math.sqrt(b), 2.0 * math.pi * (a * dts) ** 2
    expected = sps.invgauss.logpdf(x, mean / shape, scale=shape).sum()
    assert log_likelihood(DegradationModel.AIG, a, b, x, dts) == pytest.approx(expected, rel=1e-12)


def test_gamma_mle_recovers_parameters(rng):
    a, b = 2.0, 3.0
    dts = rng.uniform(0.5, 1.5, 200)
    x = rng.gamma(a * dts, 1.0 / b)
    fit = fit_mle(x, dts, DegradationModel.GAMMA)
    se_a, se_b = fisher_standard_errors(fit, x, dts)
    assert abs(fit.a_hat - a) < 3.0 * se_a
    assert abs(fit.b_hat - b) < 3.0 * se_b
    assert fit.aic == pytest.approx(4.0 - 2.0 * fit.log_likelihood)


def test_ig_mle_recovers_parameters(rng):
    a, b = 1.5, 2.0
    dts = np.full(400, 0.5)
    mean, shape = math.sqrt(math.pi) * a * dts / math.sqrt(b), 2.0 * math.pi * (a * dts) ** 2
    x = rng.wald(mean, shape)
    fit = fit_mle(x, dts, DegradationModel.AIG)
    se_a, se_b = fisher_standard_errors(fit, x, dts)
    assert abs(fit.a_hat - a) < 4.0 * se_a
    assert abs(fit.b_hat - b) < 4.0 * se_b


def test_mle_gradient_vanishes_at_the_optimum(rng):
    dts = np.full(50, 1.0)
    x = rng.gamma(2.0 * dts, 0.5)
    fit = fit_mle(x, dts, DegradationModel.AG)
    h = 1e-6
    up = log_likelihood(DegradationModel.AG, fit.a_hat * (1 + h), fit.b_hat, x, dts)
    down = log_likelihood(DegradationModel.AG, fit.a_hat * (1 - h), fit.b_hat, x, dts)
    assert fit.log_likelihood >= max(up, down) - 1e-9


@pytest.mark.parametrize(
    "x, dts",
    [([1.0], [1.0]), ([1.0, -1.0], [1.0, 1.0]), ([1.0, 2.0], [1.0]), ([1.0, 2.0], [0.0, 1.0])],
)
def test_mle_rejects_bad_input(x, dts):
    with pytest.raises(DomainError):
        fit_mle(x, dts, DegradationModel.GAMMA)


def test_survival_is_the_distribution_function_at_the_headroom(average_gamma):
    assert survival_probability(average_gamma, BARRIER, 2.0) == pytest.approx(cdf(average_gamma.with_horizon(2.0), 3.8))
    values = [survival_probability(average_gamma, BARRIER, T) for T in (0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(values, values[1:]))
    with pytest.raises(DomainError):
        survival_probability(average_gamma, BARRIER, 0.0)


def test_gamma_survival():
    assert gamma_survival_probability(2.0, 3.0, BARRIER, 1.5) == pytest.approx(sps.gamma.cdf(3.8, 3.0, scale=1.0 / 3.0))


@pytest.mark.parametrize("c", [0.0, 0.25])
def test_expected_condition_far_from_the_barrier(c):
    p = AtsParams(a=5.0, b=6.0, c=c)
    mean = stats(p).mean
    assert expected_condition(p, BARRIER, 1.0) == pytest.approx(4.8 - mean, rel=1e-9)


def test_expected_condition_routes_agree():
    # c = 0.25 on the contour form against the direct integral of F
    p = AtsParams(a=3.0, b=1.0, c=0.25)
    barrier = BarrierSpec(initial_condition=2.0, alert_level=0.5)
    from ..quad import integrate_finite

    direct = integrate_finite(lambda x: cdf(p, x), 0.0, 2.0).value
    assert expected_condition(p, barrier, 1.0) == pytest.approx(direct, rel=1e-8)


def test_median_lifetime_halves_survival():
    p = AtsParams(a=5.0, b=6.0, c=0.0)
    T = median_lifetime(p, BARRIER)
    assert survival_probability(p, BARRIER, T) == pytest.approx(0.5, abs=1e-9)


def test_simulated_series_look_like_inspection_data(rng):
    data = simulate_series(AtsParams(a=15.0, b=5.0, c=0.0), rng, 4, n_steps=500)
    assert [s.unit_id for s in data] == ["u1", "u2", "u3", "u4"]
    for s in data:
        np.testing.assert_allclose(s.times, INSPECTION_TIMES)
        assert s.readings[0] == 0.0
        assert np.all(np.diff(s.readings) >= 0)


def test_batch_report_marks_unusable_units():
    good = DegradationSeries(unit_id="good", times=[0.0, 0.1, 0.3, 0.6, 1.0], readings=[0.0, 0.2, 0.35, 0.6, 0.95])
    flat = DegradationSeries(unit_id="flat", times=[0.0, 0.1, 0.3, 0.6, 1.0], readings=[0.0, 0.2, 0.2, 0.2, 0.2])
    rows = batch_report([good, flat], BARRIER, 2.0, (DegradationModel.GAMMA, DegradationModel.AG), workers=2)
    assert [(r.unit_id, r.model) for r in rows] == [
        ("good", DegradationModel.GAMMA),
        ("good", DegradationModel.AG),
        ("flat", DegradationModel.GAMMA),
        ("flat", DegradationModel.AG),
    ]
    assert rows[0].usable and rows[1].usable
    assert 0.0 <= rows[1].survival <= 1.0
    assert not rows[2].usable and not rows[3].usable
    assert rows[3].a_hat is None and rows[3].note


@pytest.mark.slow
def test_average_model_is_preferred_on_average_data():
    assert model_recovery_rate(AtsParams(a=15.0, b=5.0, c=0.0), seed=7, replications=50) >= 0.8


def test_load_series_csv(write_csv):
    path = write_csv(
        "unit_id,time,reading,temperature\n"
        "A,0,0,150C\nA,0.5,0.4,150C\nA,1.0,0.9,150C\n"
        "B,0,0,\nB,0.5,0.3,\nB,1.0,0.8,\n"
    )
    data = load_series_csv(path)
    assert [s.unit_id for s in data] == ["A", "B"]
    assert data[0].temperature_label == "150C"
    assert data[1].temperature_label is None
    np.testing.assert_allclose(data[1].readings, [0.0, 0.3, 0.8])


@pytest.mark.parametrize(
    "text, line",
    [
        ("unit_id,time\nA,0\n", 1),
        ("unit_id,time,reading\nA,0,0\nA,0.5,oops\n", 3),
        ("unit_id,time,reading\nA,0,0\nA,0.5,0.2\nB,0.1,0\n", 4),
    ],
)
def test_load_series_csv_reports_the_line(write_csv, text, line):
    with pytest.raises(DataFormatError) as info:
        load_series_csv(write_csv(text))
    assert info.value.line == line
    assert info.value.exit_code == 8
