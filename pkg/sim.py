"""Path simulation for X, its running average X̃, the induced subordinator Λ and H.

TS(a dt, b; c) increments come from the gamma sampler (c = 0), the
Michael-Schucany-Haas inverse Gaussian sampler (c = 1/2) or, for other c,
Kanter's positive stable draw accepted with probability e^{-b s}. Large shapes
are split into pieces so each piece keeps an acceptance rate of at least 1/e.
"""

import logging
import math

import numpy as np
import pandas as pd

from .exceptions import DomainError, QuadratureError, SamplerError
from .models.params import AtsParams
from .models.pricing import MarketContext, MixtureParams
from .models.quad import QuadConfig
from .models.sim import CpaBins, CpaConfig, PathGrid, SamplePath
from .params import gamma_neg, laplace_exponent_ats, levy_triplet_ats
from .quad import integrate_finite
from .utils import BinSpacing

logger = logging.getLogger(__name__)

MAX_REJECTION_ROUNDS = 1_000_000
# per-piece bound on σ₀ b^c, i.e. mean acceptance >= e^{-1}
MAX_LOG_REJECTION = 1.0


def _positive_stable(c: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Kanter's representation of the stable law with Laplace transform e^{-u^c}."""
    u = rng.uniform(0.0, math.pi, size)
    e = rng.exponential(1.0, size)
    a = (np.sin(c * u) ** c * np.sin((1.0 - c) * u) ** (1.0 - c) / np.sin(u)) ** (1.0 / (1.0 - c))
    return (a / e) ** ((1.0 - c) / c)


def _tempered_stable(shape: float, b: float, c: float, size: int, rng: np.random.Generator) -> np.ndarray:
    scale = (-shape * gamma_neg(c)) ** (1.0 / c)
    out = np.empty(size)
    pending = np.arange(size)
    for _ in range(MAX_REJECTION_ROUNDS):
        draws = scale * _positive_stable(c, pending.size, rng)
        accepted = rng.random(pending.size) <= np.exp(-b * draws)
        out[pending[accepted]] = draws[accepted]
        pending = pending[~accepted]
        if pending.size == 0:
            return out
    raise SamplerError(f"rejection sampler exceeded {MAX_REJECTION_ROUNDS} rounds (shape={shape}, b={b}, c={c})")


def sample_ts(p: AtsParams, dt: float, size, rng: np.random.Generator) -> np.ndarray:
    """Draws of TS(a dt, b; c); p.t is ignored in favour of dt."""
    if not dt > 0:
        raise DomainError("step dt must be positive")
    shape = p.a * dt
    n = int(np.prod(size))
    if p.c == 0:
        out = rng.gamma(shape, 1.0 / p.b, n)
    elif p.c == 0.5:
        out = rng.wald(math.sqrt(math.pi) * shape / math.sqrt(p.b), 2.0 * math.pi * shape * shape, n)
    else:
        pieces = max(1, math.ceil(-shape * gamma_neg(p.c) * p.b**p.c / MAX_LOG_REJECTION))
        if pieces > 1:
            logger.debug("splitting TS shape %.6g into %d pieces", shape, pieces)
        out = np.zeros(n)
        for _ in range(pieces):
            out += _tempered_stable(shape / pieces, p.b, p.c, n, rng)
    if not np.all(out >= 0):
        raise SamplerError("sampler produced a negative or NaN increment")
    return out.reshape(size)


def sample_ts_increment(p: AtsParams, dt: float, rng: np.random.Generator) -> float:
    return float(sample_ts(p, dt, 1, rng)[0])


def euler_matrix(p: AtsParams, grid: PathGrid, n_paths: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (n_paths, n_steps + 1) of X̂ and of its running average.

    X̂' accumulates the level at the right end of each step times dt and the
    average is X̂'/(i dt), with the average at time 0 set to 0.
    """
    if n_paths < 1:
        raise DomainError("n_paths must be at least 1")
    dt = grid.dt
    increments = sample_ts(p, dt, (n_paths, grid.n_steps), rng)
    levels = np.zeros((n_paths, grid.n_steps + 1))
    np.cumsum(increments, axis=1, out=levels[:, 1:])
    integral = np.cumsum(levels[:, 1:] * dt, axis=1)
    averages = np.zeros_like(levels)
    averages[:, 1:] = integral / grid.times[1:]
    # the exact average is nondecreasing; clear division round-off
    np.maximum.accumulate(averages, axis=1, out=averages)
    return levels, averages


def euler_paths(
    p: AtsParams, grid: PathGrid, n_paths: int, rng: np.random.Generator
) -> tuple[list[SamplePath], list[SamplePath]]:
    levels, averages = euler_matrix(p, grid, n_paths, rng)
    return _as_paths(levels, grid), _as_paths(averages, grid)


def _as_paths(values: np.ndarray, grid: PathGrid) -> list[SamplePath]:
    return [SamplePath(grid=grid, values=row) for row in values]


def cpa_bins(p: AtsParams, cfg: CpaConfig, quad_cfg: QuadConfig | None = None) -> CpaBins:
    """Per-bin Poisson intensities ∫ℓ̃ and jump sizes χ_j = (∫x²ℓ̃ / ∫ℓ̃)^{1/2}."""
    if cfg.spacing is BinSpacing.LOG:
        edges = np.geomspace(cfg.x_min, cfg.x_max, cfg.n_bins + 1)
    else:
        edges = np.linspace(cfg.x_min, cfg.x_max, cfg.n_bins + 1)
    triplet = levy_triplet_ats(p)
    quad_cfg = quad_cfg or QuadConfig(abs_tol=1e-300, rel_tol=1e-10)
    intensities = np.empty(cfg.n_bins)
    second = np.empty(cfg.n_bins)
    for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        mass = integrate_finite(triplet.levy_density, lo, hi, quad_cfg)
        energy = integrate_finite(lambda x: x * x * triplet.levy_density(x), lo, hi, quad_cfg)
        if not (mass.usable and energy.usable) or not mass.value > 0:
            error = max(mass.error_estimate, energy.error_estimate)
            raise QuadratureError(f"bin {j} [{lo:.6g}, {hi:.6g}] failed to integrate", error)
        intensities[j] = mass.value
        second[j] = energy.value
    jump_sizes = np.sqrt(second / intensities)
    small = jump_sizes < 1.0
    drift = triplet.drift - float(np.sum(jump_sizes[small] * intensities[small]))
    if cfg.monotone and drift < 0:
        logger.debug("compensated drift %.3e floored at 0", drift)
        drift = 0.0
    return CpaBins(edges=edges, intensities=intensities, jump_sizes=jump_sizes, drift=drift)


def cpa_matrix(p: AtsParams, grid: PathGrid, cfg: CpaConfig, rng: np.random.Generator, n_paths: int = 1) -> np.ndarray:
    bins = cpa_bins(p, cfg)
    dt = grid.dt
    increments = np.full((n_paths, grid.n_steps), bins.drift * dt)
    for rate, size in zip(bins.intensities, bins.jump_sizes):
        increments += size * rng.poisson(rate * dt, (n_paths, grid.n_steps))
    values = np.zeros((n_paths, grid.n_steps + 1))
    np.cumsum(increments, axis=1, out=values[:, 1:])
    return values


def cpa_lambda_paths(
    p: AtsParams, grid: PathGrid, cfg: CpaConfig, rng: np.random.Generator, n_paths: int = 1
) -> list[SamplePath]:
    """Compound Poisson approximation of Λ: drift·t + Σ_j χ_j N_j(t)."""
    return _as_paths(cpa_matrix(p, grid, cfg, rng, n_paths), grid)


def mixture_matrix(mp: MixtureParams, grid: PathGrid, cfg: CpaConfig, rng: np.random.Generator, n_paths: int = 1) -> np.ndarray:
    if not mp.averaging:
        raise DomainError("path simulation of H runs on the running-average clock only")
    clock = cpa_matrix(mp.base, grid, cfg, rng, n_paths)
    d_clock = np.diff(clock, axis=1)
    noise = rng.standard_normal(d_clock.shape)
    increments = mp.kappa * grid.dt + mp.mu * d_clock + mp.sigma * np.sqrt(np.abs(d_clock)) * noise
    values = np.zeros_like(clock)
    np.cumsum(increments, axis=1, out=values[:, 1:])
    return values


def mixture_paths(
    mp: MixtureParams, grid: PathGrid, cfg: CpaConfig, rng: np.random.Generator, n_paths: int = 1
) -> list[SamplePath]:
    """Ĥ increments κ dt + μ ΔΛ̂ + σ √|ΔΛ̂| ς on a CPA clock built from mp.base."""
    return _as_paths(mixture_matrix(mp, grid, cfg, rng, n_paths), grid)


def price_paths(
    mp: MixtureParams, market: MarketContext, grid: PathGrid, cfg: CpaConfig, rng: np.random.Generator, n_paths: int = 1
) -> np.ndarray:
    """S₀ e^{(r-q)t} e^{Ĥ_t} / E e^{H_t}: mean-corrected price paths (columns are times)."""
    h = mixture_matrix(mp, grid, cfg, rng, n_paths)
    unit = mp.base.with_horizon(1.0)
    log_mgf = mp.kappa + laplace_exponent_ats(unit, -mp.mu - 0.5 * mp.sigma**2).real
    times = grid.times
    return market.spot * np.exp((market.rate - market.dividend_yield - log_mgf) * times + h)


def matrix_frame(values: np.ndarray, times: np.ndarray) -> pd.DataFrame:
    """Long table (path, time, value) of a (n_paths, n_times) array, for CSV or JSON export."""
    n_paths, n_times = values.shape
    return pd.DataFrame(
        {"path": np.repeat(np.arange(n_paths), n_times), "time": np.tile(times, n_paths), "value": values.ravel()}
    )


def paths_frame(paths: list[SamplePath]) -> pd.DataFrame:
    if not paths:
        return pd.DataFrame(columns=["path", "time", "value"])
    return matrix_frame(np.vstack([path.values for path in paths]), paths[0].grid.times)
