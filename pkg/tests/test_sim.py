import math

import numpy as np
import pytest
from scipy import stats as sps

from ..exceptions import DomainError
from ..models.params import AtsParams
from ..models.pricing import MarketContext, MixtureParams
from ..models.sim import CpaConfig, PathGrid
from ..moments import stats
from ..sim import (
    cpa_bins,
    cpa_lambda_paths,
    cpa_matrix,
    euler_matrix,
    euler_paths,
    matrix_frame,
    mixture_matrix,
    mixture_paths,
    paths_frame,
    price_paths,
    sample_ts,
    sample_ts_increment,
)


def _ts_mean_sd(p: AtsParams, dt: float) -> tuple[float, float]:
    shape = p.a * dt
    mean = shape * math.gamma(1.0 - p.c) / p.b ** (1.0 - p.c)
    var = shape * math.gamma(2.0 - p.c) / p.b ** (2.0 - p.c)
    return mean, math.sqrt(var)


@pytest.mark.parametrize("c", [0.0, 0.3, 0.5, 0.8])
def test_ts_draws_have_the_right_moments(rng, c):
    p = AtsParams(a=2.0, b=1.5, c=c)
    n = 100_000
    draws = sample_ts(p, 0.5, n, rng)
    mean, sd = _ts_mean_sd(p, 0.5)
    assert np.all(draws >= 0)
    assert abs(draws.mean() - mean) < 5.0 * sd / math.sqrt(n)
    assert draws.std() == pytest.approx(sd, rel=0.05)


def test_gamma_and_ig_draws_follow_their_laws(rng):
    gamma_draws = sample_ts(AtsParams(a=2.0, b=1.5, c=0.0), 0.5, 5000, rng)
    assert sps.kstest(gamma_draws, sps.gamma(1.0, scale=1.0 / 1.5).cdf).pvalue > 1e-3
    ig = AtsParams(a=2.0, b=1.5, c=0.5)
    mean, shape = math.sqrt(math.pi) * 1.0 / math.sqrt(1.5), 2.0 * math.pi
    ig_draws = sample_ts(ig, 0.5, 5000, rng)
    assert sps.kstest(ig_draws, sps.invgauss(mean / shape, scale=shape).cdf).pvalue > 1e-3


def test_large_shapes_are_split_for_rejection(rng):
    p = AtsParams(a=40.0, b=2.0, c=0.6)
    draws = sample_ts(p, 1.0, 20_000, rng)
    mean, sd = _ts_mean_sd(p, 1.0)
    assert abs(draws.mean() - mean) < 5.0 * sd / math.sqrt(draws.size)


def test_sampling_shapes_and_domain(reference, rng):
    assert sample_ts(reference, 0.1, (3, 4), rng).shape == (3, 4)
    assert isinstance(sample_ts_increment(reference, 0.1, rng), float)
    with pytest.raises(DomainError):
        sample_ts(reference, 0.0, 5, rng)


def test_euler_paths_start_at_zero_and_never_decrease(reference, rng):
    grid = PathGrid(n_steps=200, horizon=2.0)
    levels, averages = euler_matrix(reference, grid, 25, rng)
    assert levels.shape == averages.shape == (25, 201)
    assert np.all(levels[:, 0] == 0) and np.all(averages[:, 0] == 0)
    assert np.all(np.diff(levels, axis=1) >= 0)
    assert np.all(np.diff(averages, axis=1) >= 0)
    assert np.all(averages[:, -1] <= levels[:, -1])


def test_euler_running_average_is_the_rectangle_rule(reference, rng):
    grid = PathGrid(n_steps=4, horizon=1.0)
    levels, averages = euler_matrix(reference, grid, 1, rng)
    expected = np.cumsum(levels[0, 1:]) * grid.dt / grid.times[1:]
    np.testing.assert_allclose(averages[0, 1:], np.maximum.accumulate(expected), rtol=1e-14)


def test_euler_sample_paths(reference, rng):
    xs, avgs = euler_paths(reference, PathGrid(n_steps=10, horizon=1.0), 3, rng)
    assert len(xs) == len(avgs) == 3
    assert all(path.is_nondecreasing for path in xs + avgs)


def test_cpa_bins(reference):
    cfg = CpaConfig(n_bins=40)
    bins = cpa_bins(reference, cfg)
    assert bins.edges.size == 41
    assert bins.edges[0] == pytest.approx(cfg.x_min) and bins.edges[-1] == pytest.approx(cfg.x_max)
    assert np.all(bins.intensities > 0)
    assert np.all((bins.jump_sizes > bins.edges[:-1]) & (bins.jump_sizes < bins.edges[1:]))
    assert bins.drift >= 0.0
    uniform = cpa_bins(reference, CpaConfig.coarse_uniform())
    assert np.allclose(np.diff(uniform.edges), 0.07)


def test_cpa_paths_are_nondecreasing(reference, rng):
    grid = PathGrid(n_steps=100, horizon=1.0)
    values = cpa_matrix(reference, grid, CpaConfig(n_bins=40), rng, 30)
    assert values.shape == (30, 101)
    assert np.all(np.diff(values, axis=1) >= 0)
    paths = cpa_lambda_paths(reference, grid, CpaConfig(n_bins=40), rng, 2)
    assert all(path.is_nondecreasing for path in paths)


def test_cpa_terminal_mean_tracks_the_law(reference, rng):
    values = cpa_matrix(reference, PathGrid(n_steps=10, horizon=1.0), CpaConfig(), rng, 20_000)
    s = stats(reference)
    assert values[:, -1].mean() == pytest.approx(s.mean, rel=0.03)


def test_mixture_paths(mixture, rng):
    grid = PathGrid(n_steps=50, horizon=0.5)
    values = mixture_matrix(mixture, grid, CpaConfig(n_bins=40), rng, 5)
    assert values.shape == (5, 51)
    assert np.all(values[:, 0] == 0.0)
    assert len(mixture_paths(mixture, grid, CpaConfig(n_bins=40), rng, 2)) == 2
    with pytest.raises(DomainError):
        mixture_matrix(mixture.model_copy(update={"averaging": False}), grid, CpaConfig(n_bins=40), rng)


def test_price_paths_start_at_spot(rng):
    mp = MixtureParams(mu=0.0, sigma=0.3, base=AtsParams(a=5.0, b=2.0, c=0.5))
    market = MarketContext(spot=50.0, rate=0.02)
    grid = PathGrid(n_steps=20, horizon=1.0)
    prices = price_paths(mp, market, grid, CpaConfig(n_bins=100), rng, 4_000)
    assert np.all(prices[:, 0] == 50.0)
    assert np.all(prices > 0)
    assert prices[:, -1].mean() == pytest.approx(50.0 * math.exp(0.02), rel=0.05)


def test_frames(reference, rng):
    grid = PathGrid(n_steps=3, horizon=1.0)
    values = cpa_matrix(reference, grid, CpaConfig(n_bins=10), rng, 2)
    frame = matrix_frame(values, grid.times)
    assert list(frame.columns) == ["path", "time", "value"]
    assert len(frame) == 8
    assert frame["path"].tolist() == [0, 0, 0, 0, 1, 1, 1, 1]
    paths = cpa_lambda_paths(reference, grid, CpaConfig(n_bins=10), rng, 2)
    assert len(paths_frame(paths)) == 8
    assert paths_frame([]).empty


@pytest.mark.slow
def test_euler_average_matches_the_law(reference, rng):
    grid = PathGrid(n_steps=200, horizon=1.0)
    _, averages = euler_matrix(reference, grid, 10_000, rng)
    terminal = averages[:, -1]
    s = stats(reference)
    assert abs(terminal.mean() - s.mean) < 4.0 * math.sqrt(s.variance / terminal.size)
    assert terminal.var() == pytest.approx(s.variance, rel=0.1)


def test_mixture_terminal_moments(mixture, rng):
    grid = PathGrid(n_steps=1, horizon=1.0)
    terminal = mixture_matrix(mixture, grid, CpaConfig(n_bins=100), rng, 100_000)[:, -1]
    clock = stats(mixture.base.with_horizon(grid.horizon))
    mean = mixture.mu * clock.mean
    var = mixture.sigma**2 * clock.mean + mixture.mu**2 * clock.variance
    assert abs(terminal.mean() - mean) < 4.0 * math.sqrt(var / terminal.size) + 0.01 * abs(mean)
    assert terminal.var() == pytest.approx(var, rel=0.05)


def test_driftless_mixture_is_symmetric(mixture, rng):
    mp = mixture.model_copy(update={"mu": 0.0})
    terminal = mixture_matrix(mp, PathGrid(n_steps=1, horizon=1.0), CpaConfig(n_bins=100), rng, 100_000)[:, -1]
    n = terminal.size
    assert abs(terminal.mean()) < 4.0 * terminal.std() / math.sqrt(n)
    assert abs(sps.skew(terminal)) < 4.0 * math.sqrt(6.0 / n)
    assert abs(np.mean(terminal > 0) - 0.5) < 2.0 / math.sqrt(n)
