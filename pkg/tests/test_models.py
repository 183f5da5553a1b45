import math

import numpy as np
import pytest
from pydantic import ValidationError

from ..models.degrade import BarrierSpec, DegradationSeries, FitResult
from ..models.params import AtsParams
from ..models.pricing import MixtureParams, OptionQuote, strip_bounds
from ..models.quad import QuadConfig
from ..models.sim import CpaConfig, PathGrid, SamplePath
from ..utils import BinSpacing, DegradationModel


@pytest.mark.parametrize(
    "fields",
    [
        {"a": 0.0, "b": 1.0, "c": 0.5},
        {"a": 1.0, "b": -1.0, "c": 0.5},
        {"a": 1.0, "b": 1.0, "c": 1.0},
        {"a": 1.0, "b": 1.0, "c": -0.1},
        {"a": 1.0, "b": 1.0, "c": 0.5, "t": -1.0},
        {"a": math.inf, "b": 1.0, "c": 0.5},
    ],
)
def test_invalid_ats_params(fields):
    with pytest.raises(ValidationError):
        AtsParams(**fields)


def test_params_are_frozen(reference):
    with pytest.raises(ValidationError):
        reference.a = 2.0
    assert reference.replace(a=2.0).a == 2.0
    assert reference.with_horizon(3.0).shape == 3.0


def test_quad_tolerance_is_the_looser_bound():
    cfg = QuadConfig(abs_tol=1e-8, rel_tol=1e-6)
    assert cfg.tolerance(1.0) == pytest.approx(1e-6)
    assert cfg.tolerance(1e-6) == pytest.approx(1e-8)


def test_barrier_levels():
    spec = BarrierSpec(initial_condition=4.8, alert_level=1.0)
    assert spec.headroom == pytest.approx(3.8)
    with pytest.raises(ValidationError):
        BarrierSpec(initial_condition=1.0, alert_level=1.0)


@pytest.mark.parametrize(
    "times, readings",
    [
        ([0.1, 0.2, 0.3], [0.0, 1.0, 2.0]),
        ([0.0, 0.2, 0.2], [0.0, 1.0, 2.0]),
        ([0.0, 0.2, 0.3], [0.5, 1.0, 2.0]),
        ([0.0, 0.2], [0.0, 1.0, 2.0]),
        ([0.0, 0.2, 0.3], [0.0, np.nan, 2.0]),
    ],
)
def test_invalid_series(times, readings):
    with pytest.raises(ValidationError):
        DegradationSeries(unit_id="u1", times=times, readings=readings)


def test_fit_result_aic_must_match_likelihood():
    FitResult(model=DegradationModel.AG, a_hat=1.0, b_hat=2.0, log_likelihood=3.0, aic=-2.0)
    with pytest.raises(ValidationError):
        FitResult(model=DegradationModel.AG, a_hat=1.0, b_hat=2.0, log_likelihood=3.0, aic=0.0)


def test_mixture_needs_an_integrable_exponential():
    base = AtsParams(a=1.0, b=0.5, c=0.5)
    MixtureParams(mu=0.1, sigma=0.5, base=base)
    with pytest.raises(ValidationError):
        MixtureParams(mu=0.4, sigma=0.5, base=base)
    lo, hi = strip_bounds(0.5, 0.1, 0.5)
    assert lo < -1.0 < 0.0 < hi


def test_option_quote_positive_fields():
    with pytest.raises(ValidationError):
        OptionQuote(strike=100.0, maturity=0.0, market_price=1.0)


def test_cpa_config_range():
    assert CpaConfig.coarse_uniform().spacing is BinSpacing.UNIFORM
    assert not CpaConfig.coarse_uniform().monotone
    with pytest.raises(ValidationError):
        CpaConfig(x_min=5.0, x_max=1.0)


def test_sample_path_shape():
    grid = PathGrid(n_steps=4, horizon=2.0)
    assert grid.dt == 0.5
    np.testing.assert_allclose(grid.times, [0.0, 0.5, 1.0, 1.5, 2.0])
    path = SamplePath(grid=grid, values=np.array([0.0, 1.0, 1.0, 2.0, 3.0]))
    assert path.is_nondecreasing
    with pytest.raises(ValidationError):
        SamplePath(grid=grid, values=np.array([0.0, 1.0, 2.0]))
    with pytest.raises(ValidationError):
        SamplePath(grid=grid, values=np.array([1.0, 1.0, 1.0, 2.0, 3.0]))
