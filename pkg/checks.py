"""Acceptance checks run by ``selftest``.

Every check returns ``(deviation, tolerance, detail)``; :func:`run_checks` times
it and turns library errors into failed rows instead of aborting the run.
"""

import logging
import math
import time
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.stats import kstest

from .degrade import fisher_standard_errors, fit_mle, model_recovery_rate
from .dist import cdf, pdf, pdf_left_tail, pdf_right_tail, slope_integral
from .exceptions import AtsException
from .models.checks import CheckResult
from .models.params import AtsParams
from .models.pricing import MarketContext, MixtureParams, OptionQuote
from .models.sim import CpaConfig, PathGrid
from .moments import TS_RATIOS, moment, moment_exact, stats, ts_stats
from .params import laplace_ats, laplace_exponent_ats, levy_khintchine_exponent, levy_triplet_ats
from .pricing import DAYS_PER_YEAR, calibrate, log_martingale_factor, price_both
from .quad import integrate_finite, integrate_semi_infinite
from .sim import cpa_matrix, euler_matrix, mixture_paths
from .utils import SEED, CheckLevel, DegradationModel

logger = logging.getLogger(__name__)

Check = Callable[[], tuple[float, float, str | None]]

AG_UNIT_MOMENTS = (Fraction(1), Fraction(1, 2), Fraction(7, 12), Fraction(9, 8), Fraction(743, 240), Fraction(1075, 96))
REFERENCE = AtsParams(a=1.0, b=1.0, c=0.5)
PRICING_MIXTURE = MixtureParams(mu=-0.1, sigma=0.5, base=AtsParams(a=2.0, b=1.0, c=0.5))
PRICING_MARKET = MarketContext(spot=100.0, rate=0.01)
DUALITY_SETS = (
    AtsParams(a=1.0, b=1.0, c=0.0),
    REFERENCE,
    AtsParams(a=2.0, b=1.0, c=0.25),
    AtsParams(a=0.5, b=1.0, c=0.75),
)
DUALITY_U = (0.5, 1.0, 2.0, 5.0)
ROUND_TRIP_DAYS = (19.0, 47.0, 166.0, 257.0)
ROUND_TRIP_STRIKES = (90.0, 95.0, 105.0, 110.0)


def check_moment_table() -> tuple[float, float, str | None]:
    worst = 0.0
    for n, expected in enumerate(AG_UNIT_MOMENTS):
        worst = max(worst, abs(float(moment_exact(Fraction(1), Fraction(1), n) - expected)))
    sqrt_pi = math.sqrt(math.pi)
    worst = max(worst, abs(moment(REFERENCE, 1) - sqrt_pi / 2.0))
    worst = max(worst, abs(moment(REFERENCE, 2) - (3.0 * math.pi + 2.0 * sqrt_pi) / 12.0))
    return worst, 1e-12, None


def check_contour_identity() -> tuple[float, float, str | None]:
    def integrand(y):
        return np.power(1.0 / y - 1.0, y - 1.0) * np.sin(math.pi * (1.0 - y)) / (y * y)

    res = integrate_finite(integrand, 0.0, 1.0)
    return abs(res.value - math.pi), 1e-8, f"integral {res.value:.15g}"


def _duality_deviation(cases) -> float:
    worst = 0.0
    for p, u in cases:
        res = integrate_semi_infinite(lambda x: np.exp(-u * x) * pdf(p, x), 0.0)
        worst = max(worst, abs(res.value - laplace_ats(p, u).real))
    return worst


def check_duality_quick() -> tuple[float, float, str | None]:
    return _duality_deviation([(REFERENCE, 1.0)]), 1e-6, "1 parameter set, 1 u value"


def check_duality_full() -> tuple[float, float, str | None]:
    cases = [(p, u) for p in DUALITY_SETS for u in DUALITY_U]
    return _duality_deviation(cases), 1e-6, "4 parameter sets x 4 u values"


def check_statistics() -> tuple[float, float, str | None]:
    worst = 0.0
    for p in (REFERENCE, AtsParams(a=2.0, b=3.0, c=0.25, t=0.5), AtsParams(a=1.0, b=1.0, c=0.0)):
        s, ts = stats(p), ts_stats(p)
        mean = p.shape * math.gamma(1.0 - p.c) / (2.0 * p.b ** (1.0 - p.c))
        var = p.shape * math.gamma(2.0 - p.c) / (3.0 * p.b ** (2.0 - p.c))
        m1, m2 = moment(p, 1), moment(p, 2)
        worst = max(
            worst,
            abs(s.mean - mean) / mean,
            abs(s.variance - var) / var,
            abs(m1 - mean) / mean,
            abs(m2 - m1 * m1 - var) / var,
            abs(s.mean / ts.mean - TS_RATIOS["mean"]),
            abs(s.variance / ts.variance - TS_RATIOS["variance"]),
            abs(s.skewness / ts.skewness - TS_RATIOS["skewness"]),
            abs(s.excess_kurtosis / ts.excess_kurtosis - TS_RATIOS["excess_kurtosis"]),
        )
    return worst, 1e-8, None


def check_quadrature_moments() -> tuple[float, float, str | None]:
    p = AtsParams(a=2.0, b=1.0, c=0.5)
    s = stats(p)
    first = integrate_semi_infinite(lambda x: x * pdf(p, x), 0.0).value
    second = integrate_semi_infinite(lambda x: x * x * pdf(p, x), 0.0).value
    return max(abs(first - s.mean), abs(second - first * first - s.variance)), 1e-8, None


def check_ag_left_limit() -> tuple[float, float, str | None]:
    at_one = abs(pdf(AtsParams(a=1.0, b=1.0, c=0.0), 1e-6) / math.e - 1.0) / 2e-3
    half = AtsParams(a=0.5, b=1.0, c=0.0)
    xs = np.array([1e-4, 1e-5, 1e-6])
    scaled = pdf(half, xs) * xs ** (1.0 - half.shape)
    flat = (scaled.max() - scaled.min()) / scaled.mean() / 0.05
    return max(at_one, flat), 1.0, "deviations relative to 2e-3 and 5%"


def check_transform_laws() -> tuple[float, float, str | None]:
    u = np.array([0.3, 1.0, 2.5 + 1.0j, -0.5])
    p1, p2 = AtsParams(a=0.7, b=1.5, c=0.4), AtsParams(a=1.1, b=1.5, c=0.4)
    joint = AtsParams(a=1.8, b=1.5, c=0.4)
    convolution = np.max(np.abs(laplace_ats(joint, u) / (laplace_ats(p1, u) * laplace_ats(p2, u)) - 1.0))
    semigroup = np.max(
        np.abs(laplace_ats(p1.with_horizon(3.0), u) / laplace_ats(p1.with_horizon(1.0), u) ** 3 - 1.0)
    )
    # X̃ under (a, b) has the law of X̃ under (a s^c, b/s) divided by s
    s = 2.0
    scaled = AtsParams(a=p1.a * s**p1.c, b=p1.b / s, c=p1.c)
    scaling = np.max(np.abs(laplace_ats(scaled, u / s) / laplace_ats(p1, u) - 1.0))
    return float(max(convolution, semigroup, scaling)), 1e-12, None


def check_levy_khintchine() -> tuple[float, float, str | None]:
    worst = 0.0
    for p in (REFERENCE, AtsParams(a=2.0, b=0.7, c=0.25)):
        triplet = levy_triplet_ats(p)
        for u in (0.5, 2.0):
            worst = max(worst, abs(levy_khintchine_exponent(triplet, u) - laplace_exponent_ats(p, u).real))
    return worst, 1e-6, None


def check_shape() -> tuple[float, float, str | None]:
    p = AtsParams(a=2.0, b=1.0, c=0.5)
    xs = np.linspace(0.05, 8.0, 40)
    values = cdf(p, xs)
    drop = float(max(0.0, -np.min(np.diff(values))))
    signs = np.sign([slope_integral(p, x) for x in xs])
    changes = int(np.count_nonzero(np.diff(signs[signs != 0])))
    return drop + max(0, changes - 1), 1e-12, f"slope sign changes: {changes}"


def check_path_monotonicity() -> tuple[float, float, str | None]:
    rng = np.random.default_rng(SEED)
    grid = PathGrid(n_steps=500, horizon=1.0)
    levels, averages = euler_matrix(REFERENCE, grid, 20, rng)
    lam = cpa_matrix(REFERENCE, grid, CpaConfig(n_bins=60), rng, 20)
    worst = max(float(-np.min(np.diff(m, axis=1))) for m in (levels, averages, lam))
    return max(worst, 0.0), 0.0, None


def check_parity() -> tuple[float, float, str | None]:
    worst = 0.0
    for strike in (80.0, 100.0, 125.0):
        price = price_both(PRICING_MIXTURE, PRICING_MARKET, strike, 0.25)
        residual = price.call - price.put - PRICING_MARKET.spot + strike * math.exp(-PRICING_MARKET.rate * 0.25)
        worst = max(worst, abs(residual))
    return worst, 1e-12, None


def _tail_ratios(estimate, p, xs) -> list[float]:
    return [abs(pdf(p, x) / estimate(p, x).value - 1.0) for x in xs]


def check_tails() -> tuple[float, float, str | None]:
    right = _tail_ratios(pdf_right_tail, REFERENCE, (20.0, 40.0, 60.0))
    mean = stats(REFERENCE).mean
    left = _tail_ratios(pdf_left_tail, REFERENCE, tuple(f * mean for f in (0.05, 0.02, 0.01)))
    monotone = all(a > b for a, b in zip(right, right[1:])) and all(a > b for a, b in zip(left, left[1:]))
    deviation = max(right[-1], left[-1]) if monotone else math.inf
    return deviation, 0.1, f"right {np.round(right, 4).tolist()}, left {np.round(left, 4).tolist()}"


def check_simulation_law() -> tuple[float, float, str | None]:
    rng = np.random.default_rng(SEED)
    p = REFERENCE
    _, averages = euler_matrix(p, PathGrid(n_steps=2000, horizon=1.0), 2000, rng)
    euler_ks = kstest(averages[:, -1], lambda x: cdf(p, np.maximum(x, 1e-300))).statistic
    lam = cpa_matrix(p, PathGrid(n_steps=10, horizon=1.0), CpaConfig(n_bins=100), rng, 2000)
    cpa_ks = kstest(lam[:, -1], lambda x: cdf(p, np.maximum(x, 1e-300))).statistic
    return float(max(euler_ks, cpa_ks)), 0.05, f"Euler KS {euler_ks:.4f}, CPA KS {cpa_ks:.4f}"


def check_degradation_recovery() -> tuple[float, float, str | None]:
    rate = model_recovery_rate(AtsParams(a=15.0, b=5.0, c=0.0), SEED, replications=50)
    rng = np.random.default_rng(SEED)
    a, b = 2.0, 3.0
    dts = np.full(200, 1.0)
    x = rng.gamma(a * dts, 1.0 / b)
    fit = fit_mle(x, dts, DegradationModel.GAMMA)
    se_a, se_b = fisher_standard_errors(fit, x, dts)
    z = max(abs(fit.a_hat - a) / se_a, abs(fit.b_hat - b) / se_b)
    # pass when the AG model wins at least 80% of replications and the MLE sits within 3 SE
    deviation = max(0.8 - rate, 0.0) + max(z - 3.0, 0.0)
    return deviation, 0.0, f"AG preferred in {rate:.0%}; gamma MLE within {z:.2f} SE"


def check_pricing_monte_carlo() -> tuple[float, float, str | None]:
    rng = np.random.default_rng(SEED)
    mp, market = PRICING_MIXTURE, PRICING_MARKET
    worst = 0.0
    for maturity in (0.1, 0.5):
        paths = mixture_paths(mp, PathGrid(n_steps=1, horizon=maturity), CpaConfig(n_bins=100), rng, 100_000)
        h = np.array([path.values[-1] for path in paths])
        terminal = market.forward(maturity) * np.exp(h - log_martingale_factor(mp.with_horizon(maturity)))
        for strike in (90.0, 100.0, 110.0):
            payoff = math.exp(-market.rate * maturity) * np.maximum(terminal - strike, 0.0)
            se = payoff.std(ddof=1) / math.sqrt(payoff.size)
            model = price_both(mp, market, strike, maturity).call
            worst = max(worst, abs(payoff.mean() - model) / se)
    return worst, 3.0, "deviation in standard errors"


def check_calibration_round_trip() -> tuple[float, float, str | None]:
    mp, market = PRICING_MIXTURE, PRICING_MARKET
    quotes = []
    for days in ROUND_TRIP_DAYS:
        maturity = days / DAYS_PER_YEAR
        for strike in ROUND_TRIP_STRIKES:
            price = price_both(mp, market, strike, maturity)
            is_call = strike > market.spot
            quotes.append(
                OptionQuote(
                    strike=strike, maturity=maturity, market_price=price.call if is_call else price.put, is_call=is_call
                )
            )
    seed = (mp.base.a * 1.02, mp.base.b * 0.98, mp.mu * 1.02, mp.sigma * 0.98)
    result = calibrate(quotes, market, mp.base.c, init=[seed])
    return result.arpe, 1e-4, f"ARPE {result.arpe:.3e} over {len(quotes)} quotes"


QUICK_CHECKS: dict[str, Check] = {
    "moment_table": check_moment_table,
    "contour_identity": check_contour_identity,
    "transform_density_duality": check_duality_quick,
    "statistics": check_statistics,
    "ag_left_limit": check_ag_left_limit,
    "transform_laws": check_transform_laws,
    "levy_khintchine": check_levy_khintchine,
    "cdf_and_mode_shape": check_shape,
    "path_monotonicity": check_path_monotonicity,
    "put_call_parity": check_parity,
}

FULL_CHECKS: dict[str, Check] = {
    "transform_density_duality_grid": check_duality_full,
    "quadrature_moments": check_quadrature_moments,
    "tail_asymptotics": check_tails,
    "simulation_law": check_simulation_law,
    "degradation_recovery": check_degradation_recovery,
    "pricing_monte_carlo": check_pricing_monte_carlo,
    "calibration_round_trip": check_calibration_round_trip,
}


def run_check(name: str, check: Check) -> CheckResult:
    start = time.perf_counter()
    try:
        deviation, tolerance, detail = check()
    except AtsException as exc:
        logger.warning("check %s raised: %s", name, exc.detail)
        return CheckResult(
            name=name,
            passed=False,
            deviation=math.inf,
            tolerance=0.0,
            seconds=time.perf_counter() - start,
            detail=exc.detail,
        )
    seconds = time.perf_counter() - start
    logger.debug("check %s: deviation %.3e (tolerance %.1e) in %.2fs", name, deviation, tolerance, seconds)
    return CheckResult(
        name=name,
        passed=bool(deviation <= tolerance),
        deviation=float(deviation),
        tolerance=tolerance,
        seconds=seconds,
        detail=detail,
    )


def run_checks(level: CheckLevel = CheckLevel.QUICK) -> list[CheckResult]:
    checks = dict(QUICK_CHECKS)
    if level is CheckLevel.FULL:
        checks.update(FULL_CHECKS)
    return [run_check(name, check) for name, check in checks.items()]
