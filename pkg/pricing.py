"""Gaussian mixtures H_t = κt + μΛ_t + σW_{Λ_t} and European option pricing.

The stock follows log S_T = log F - log m + H_T with forward F = S₀e^{(r-q)T}
and m = E e^{H_T}, so the call finishes in the money when
H_T > log(K/F) + log m. Both in-the-money probabilities are Fourier inverses
of the mixture transform; P* is taken under the pricing measure and P̆ under
the share measure, whose characteristic function is φ(u - i)/m.
"""

import logging
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError
from scipy.optimize import minimize

from .dist import contour_kernel
from .exceptions import AtsException, CalibrationError, DataFormatError, DomainError, QuadratureError
from .models.params import AtsParams
from .models.pricing import (
    CalibrationResult,
    MarketContext,
    MixtureParams,
    OptionPrice,
    OptionQuote,
    QuoteReport,
    strip_bounds,
)
from .models.quad import QuadConfig
from .moments import stats, ts_stats
from .params import check_branch, laplace_exponent_ats, laplace_exponent_ts
from .quad import integrate_finite, integrate_octaves
from .utils import WORKERS

logger = logging.getLogger(__name__)

DAYS_PER_YEAR = 365.0
PENALTY = 1e3
# probabilities may leave [0, 1] by this much before it counts as a failure
PROBABILITY_NOISE = 1e-6
# price shortfall below the no-arbitrage bound tolerated as quadrature noise, relative to spot
PRICE_NOISE = 1e-8
FOURIER_CFG = QuadConfig(abs_tol=1e-13, rel_tol=1e-11)

# (a, b, mu, sigma)
DEFAULT_SEEDS = (
    (1.0, 5.0, 0.0, 0.5),
    (2.0, 10.0, -0.1, 0.8),
    (0.5, 2.0, 0.1, 0.3),
    (4.0, 20.0, 0.0, 1.0),
)


def mixture_exponent(mp: MixtureParams, u):
    """log E e^{-uH_t} = -κtu + E_Λ(μu - σ²u²/2), with E_Λ the ATS (or TS) exponent."""
    uc = np.asarray(u, dtype=complex)
    real = uc.imag == 0
    if np.any(real):
        lo, hi = strip_bounds(mp.base.b, mp.mu, mp.sigma)
        outside = real & ((uc.real <= lo) | (uc.real >= hi))
        if np.any(outside):
            raise DomainError(f"u={complex(uc[outside].flat[0]).real:g} lies outside the strip ({lo:.6g}, {hi:.6g})")
    z = mp.mu * uc - 0.5 * mp.sigma**2 * uc * uc
    check_branch(z, mp.base.b)
    exponent = laplace_exponent_ats if mp.averaging else laplace_exponent_ts
    out = -mp.kappa * mp.base.t * uc + np.asarray(exponent(mp.base, z))
    return complex(out) if np.ndim(u) == 0 else out


def laplace_mixture(mp: MixtureParams, u):
    out = np.exp(np.asarray(mixture_exponent(mp, u)))
    return complex(out) if np.ndim(u) == 0 else out


def characteristic_function(mp: MixtureParams, v):
    """φ(v) = E e^{ivH_t} = laplace_mixture(-iv) for real v."""
    return laplace_mixture(mp, -1j * np.asarray(v, dtype=float))


def log_martingale_factor(mp: MixtureParams) -> float:
    """log m = log E e^{H_t}."""
    return float(np.real(mixture_exponent(mp, -1.0)))


def bg_index_mixture(mp: MixtureParams) -> float:
    return 2.0 * mp.base.c


def _clock_moments(mp: MixtureParams) -> tuple[float, float]:
    s = stats(mp.base) if mp.averaging else ts_stats(mp.base)
    return s.mean, s.variance


def _fourier_width(mp: MixtureParams) -> float:
    mean, var = _clock_moments(mp)
    sd = math.sqrt(mp.sigma**2 * mean + mp.mu**2 * var)
    return 5.0 / sd


def _check_probabilities(values: np.ndarray, what: str) -> np.ndarray:
    if np.any(values < -PROBABILITY_NOISE) or np.any(values > 1.0 + PROBABILITY_NOISE):
        worst = float(values[np.argmax(np.abs(values - 0.5))])
        raise QuadratureError(f"{what} left [0, 1]: {worst:.9g}", abs(worst - np.clip(worst, 0.0, 1.0)))
    return np.clip(values, 0.0, 1.0)


def itm_probabilities_batch(
    mp: MixtureParams, market: MarketContext, strikes, maturity: float, cfg: QuadConfig | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """P* and P̆ for every strike of one maturity, sharing one adaptive mesh.

    P = 1/2 + (1/π)∫₀^∞ Im(e^{iuk} φ(u))/u du with k = log(F/K) - log m, and
    φ(u - i)/m in place of φ(u) for P̆.
    """
    if not maturity > 0:
        raise DomainError("maturity must be positive")
    strikes = np.atleast_1d(np.asarray(strikes, dtype=float))
    if np.any(strikes <= 0):
        raise DomainError("strikes must be positive")
    mpT = mp.with_horizon(maturity)
    log_m = log_martingale_factor(mpT)
    k = math.log(market.forward(maturity)) - log_m - np.log(strikes)
    n = strikes.size

    def integrand(u):
        pricing = np.exp(mixture_exponent(mpT, -1j * u))
        share = np.exp(mixture_exponent(mpT, -1j * u - 1.0) - log_m)
        rot = np.exp(1j * k[:, None, None] * u[None])
        return np.concatenate([np.imag(rot * pricing) / u, np.imag(rot * share) / u])

    res = integrate_octaves(integrand, 0.0, _fourier_width(mpT), n_out=2 * n, cfg=cfg or FOURIER_CFG)
    if not res.usable:
        logger.warning("Fourier inversion at T=%.6g ended with error estimate %.3e", maturity, res.error_estimate)
    values = 0.5 + res.values / math.pi
    return _check_probabilities(values[:n], "P*"), _check_probabilities(values[n:], "P̆")


def itm_probabilities(
    mp: MixtureParams, market: MarketContext, strike: float, maturity: float, cfg: QuadConfig | None = None
) -> tuple[float, float]:
    p_star, p_breve = itm_probabilities_batch(mp, market, [strike], maturity, cfg)
    return float(p_star[0]), float(p_breve[0])


def _psi_parts(mp: MixtureParams, y: np.ndarray) -> tuple[float, np.ndarray]:
    s2 = mp.sigma**2
    return mp.mu / s2, np.sqrt(mp.mu**2 + 2.0 * mp.base.b * s2 / y) / s2


def _psi(mp: MixtureParams, x: float, y: np.ndarray) -> np.ndarray:
    """ψ(x, y) = exp((μx - |x|√(μ² + 2bσ²/y))/σ²)."""
    a_, b_ = _psi_parts(mp, y)
    return np.exp(a_ * x - abs(x) * b_)


def _psi_tail(x: float, a_: float, b_: np.ndarray) -> np.ndarray:
    """∫_x^∞ e^{a z - b|z|} dz for b > |a|."""
    if x >= 0:
        return np.exp((a_ - b_) * x) / (b_ - a_)
    return -np.expm1((a_ + b_) * x) / (a_ + b_) + 1.0 / (b_ - a_)


def _mixture_contour(mp: MixtureParams, weight, cfg: QuadConfig | None) -> float:
    """(b/π)∫₀¹ e^{L} sin Φ · weight(y) / (y^{3/2}√(μ²y + 2bσ²)) dy."""
    if not mp.averaging or mp.base.c >= 0.5:
        raise DomainError("the contour form of the mixture needs the averaged clock with c < 1/2")
    p = mp.base
    s2 = mp.sigma**2

    def integrand(y):
        log_amp, phase = contour_kernel(p, y)
        with np.errstate(under="ignore"):
            return np.exp(log_amp) * np.sin(phase) * weight(y) / (y**1.5 * np.sqrt(mp.mu**2 * y + 2.0 * p.b * s2))

    res = integrate_finite(integrand, 0.0, 1.0, cfg)
    if not res.usable:
        raise QuadratureError("mixture contour integral did not converge", res.error_estimate)
    return p.b / math.pi * res.value


def pdf_mixture(mp: MixtureParams, x, cfg: QuadConfig | None = None):
    """Density of H_t.

    Averaged clocks with c < 1/2 use the single integral over (0, 1) with the
    ψ kernel; other cases invert the characteristic function,
    f(x) = (1/π)∫₀^∞ Re(e^{-iux}φ(u)) du.
    """
    if not mp.base.t > 0:
        raise DomainError("the mixture density needs t > 0")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(xs)):
        raise DomainError("x must be finite")
    if mp.averaging and mp.base.c < 0.5:
        shift = mp.kappa * mp.base.t
        if mp.base.c == 0 and mp.base.shape <= 0.5 and np.any(xs == shift):
            raise DomainError("the density is unbounded at x = κt when c = 0 and at <= 1/2")
        out = np.array([_mixture_contour(mp, lambda y, v=v: _psi(mp, v - shift, y), cfg) for v in xs])
    else:

        def integrand(u):
            phi = np.exp(mixture_exponent(mp, -1j * u))
            return np.real(np.exp(-1j * xs[:, None, None] * u[None]) * phi)

        res = integrate_octaves(integrand, 0.0, _fourier_width(mp), n_out=xs.size, cfg=cfg or FOURIER_CFG)
        if not res.usable:
            logger.warning("Fourier density inversion ended with error estimate %.3e", res.error_estimate)
        out = res.values / math.pi
    out = np.maximum(out, 0.0)
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def itm_probabilities_density(
    mp: MixtureParams, market: MarketContext, strike: float, maturity: float, cfg: QuadConfig | None = None
) -> tuple[float, float]:
    """P* and P̆ through the closed-form ψ tails, Ψ*(x₀, y) and ∫_{x₀}^∞ e^z ψ(z, y) dz.

    x₀ = log(K/F) + log m - κT; P̆ carries the factor e^{κT}/m.
    """
    mpT = mp.with_horizon(maturity)
    log_m = log_martingale_factor(mpT)
    x0 = math.log(strike / market.forward(maturity)) + log_m - mpT.kappa * maturity

    def star(y):
        a_, b_ = _psi_parts(mpT, y)
        return _psi_tail(x0, a_, b_)

    def breve(y):
        a_, b_ = _psi_parts(mpT, y)
        return _psi_tail(x0, a_ + 1.0, b_)

    p_star = _mixture_contour(mpT, star, cfg)
    p_breve = math.exp(mpT.kappa * maturity - log_m) * _mixture_contour(mpT, breve, cfg)
    return (
        float(_check_probabilities(np.array([p_star]), "P*")[0]),
        float(_check_probabilities(np.array([p_breve]), "P̆")[0]),
    )


def _assemble(market: MarketContext, strike: float, maturity: float, p_star: float, p_breve: float) -> OptionPrice:
    share = market.spot * math.exp(-market.dividend_yield * maturity)
    cash = strike * math.exp(-market.rate * maturity)
    call = share * p_breve - cash * p_star
    bound = max(share - cash, 0.0)
    violation = call < bound - PRICE_NOISE * market.spot
    if violation:
        logger.warning("call K=%.6g T=%.6g priced %.6g below its bound %.6g", strike, maturity, call, bound)
    call = max(call, bound)
    return OptionPrice(call=call, put=call + cash - share, p_star=p_star, p_breve=p_breve, bound_violation=violation)


def price_both(
    mp: MixtureParams, market: MarketContext, strike: float, maturity: float, cfg: QuadConfig | None = None
) -> OptionPrice:
    """Call S₀e^{-qT}P̆ - Ke^{-rT}P*, floored at its lower bound, and the parity put."""
    p_star, p_breve = itm_probabilities(mp, market, strike, maturity, cfg)
    return _assemble(market, strike, maturity, p_star, p_breve)


def price_european(mp: MixtureParams, market: MarketContext, quote: OptionQuote, cfg: QuadConfig | None = None) -> float:
    price = price_both(mp, market, quote.strike, quote.maturity, cfg)
    return price.call if quote.is_call else price.put


def _price_maturity(mp, market, maturity, strikes, cfg) -> list[OptionPrice]:
    p_star, p_breve = itm_probabilities_batch(mp, market, strikes, maturity, cfg)
    return [_assemble(market, k, maturity, ps, pb) for k, ps, pb in zip(strikes, p_star, p_breve)]


def price_quotes(
    mp: MixtureParams,
    market: MarketContext,
    quotes: list[OptionQuote],
    cfg: QuadConfig | None = None,
    workers: int = WORKERS,
) -> list[float]:
    """Model prices in quote order; one Fourier pass per maturity."""
    groups: dict[float, list[int]] = defaultdict(list)
    for i, q in enumerate(quotes):
        groups[q.maturity].append(i)

    def run(item):
        maturity, idx = item
        return idx, _price_maturity(mp, market, maturity, [quotes[i].strike for i in idx], cfg)

    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, groups.items()))
    else:
        results = [run(item) for item in groups.items()]
    out = [0.0] * len(quotes)
    for idx, prices in results:
        for i, price in zip(idx, prices):
            out[i] = price.call if quotes[i].is_call else price.put
    return out


def arpe(model_prices, market_prices) -> float:
    """Average relative pricing error (1/N)Σ|model - market|/market."""
    model_prices = np.asarray(model_prices, dtype=float)
    market_prices = np.asarray(market_prices, dtype=float)
    if model_prices.shape != market_prices.shape or model_prices.size == 0:
        raise DomainError("model and market prices must be non-empty and of equal length")
    return float(np.mean(np.abs(model_prices - market_prices) / market_prices))


def _unpack(theta, c: float, kappa: float, averaging: bool) -> MixtureParams:
    log_a, log_b, mu, log_sigma = theta
    base = AtsParams(a=math.exp(log_a), b=math.exp(log_b), c=c)
    return MixtureParams(kappa=kappa, mu=float(mu), sigma=math.exp(log_sigma), base=base, averaging=averaging)


def calibrate(
    quotes: list[OptionQuote],
    market: MarketContext,
    c_fixed: float,
    init: list[tuple[float, float, float, float]] | None = None,
    kappa: float = 0.0,
    averaging: bool = True,
    max_iter: int = 600,
    cfg: QuadConfig | None = None,
) -> CalibrationResult:
    """Minimise the ARPE over (a, b, μ, σ) with c fixed.

    Nelder-Mead runs on (log a, log b, μ, log σ) from each seed; parameter sets
    with μ + σ²/2 >= b, or that fail to price, score PENALTY.
    """
    if len(quotes) < 4:
        raise DomainError("calibration needs at least 4 quotes")
    if not 0.0 <= c_fixed < 1.0:
        raise DomainError("c must lie in [0, 1)")
    market_prices = np.array([q.market_price for q in quotes])

    def objective(theta):
        try:
            mp = _unpack(theta, c_fixed, kappa, averaging)
            return arpe(price_quotes(mp, market, quotes, cfg), market_prices)
        except (ValidationError, AtsException, OverflowError) as exc:
            logger.debug("penalised %s: %s", np.round(theta, 6).tolist(), exc)
            return PENALTY

    best, seed_scores = None, []
    for seed in init or DEFAULT_SEEDS:
        a, b, mu, sigma = seed
        if min(a, b, sigma) <= 0:
            raise DomainError(f"seed {seed} must have positive a, b and sigma")
        start = np.array([math.log(a), math.log(b), mu, math.log(sigma)])
        seed_scores.append(float(objective(start)))
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"maxiter": max_iter, "xatol": 1e-9, "fatol": 1e-10, "adaptive": True},
        )
        logger.info("seed %s: ARPE %.6g after %d evaluations", seed, res.fun, res.nfev)
        if best is None or res.fun < best.fun:
            best = res
    if best.fun >= PENALTY:
        raise CalibrationError("every calibration start violated integrability or failed to price")
    mp = _unpack(best.x, c_fixed, kappa, averaging)
    model_prices = price_quotes(mp, market, quotes, cfg)
    per_quote = [
        QuoteReport(
            strike=q.strike,
            maturity=q.maturity,
            model_price=m,
            market_price=q.market_price,
            rel_err=abs(m - q.market_price) / q.market_price,
        )
        for q, m in zip(quotes, model_prices)
    ]
    return CalibrationResult(params=mp, arpe=arpe(model_prices, market_prices), per_quote=per_quote, seed_arpes=seed_scores)


def load_quotes_csv(path: Path) -> list[OptionQuote]:
    """Parse `strike,maturity_days,price,type` rows; type is C or P."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise DataFormatError(f"cannot read {path}: {exc}")
    frame.columns = [col.strip() for col in frame.columns]
    missing = {"strike", "maturity_days", "price", "type"} - set(frame.columns)
    if missing:
        raise DataFormatError(f"missing columns {sorted(missing)}", line=1)
    quotes = []
    for offset, row in enumerate(frame.itertuples(index=False)):
        line = offset + 2
        kind = row.type.strip().upper()
        if kind not in ("C", "P"):
            raise DataFormatError(f"type must be C or P, got {row.type!r}", line=line)
        try:
            quotes.append(
                OptionQuote(
                    strike=float(row.strike),
                    maturity=float(row.maturity_days) / DAYS_PER_YEAR,
                    market_price=float(row.price),
                    is_call=kind == "C",
                )
            )
        except ValueError as exc:
            detail = exc.errors()[0]["msg"] if isinstance(exc, ValidationError) else str(exc)
            raise DataFormatError(detail, line=line)
    return quotes
