"""Laplace transforms, Lévy triplets and tempering of the TS and ATS laws.

TS(at, b; c) is the marginal of the tempered stable subordinator X; ATS(at, b; c)
is the marginal of its running average X̃_t = (1/t)∫₀ᵗ X_s ds, which is also the
marginal of the induced subordinator Λ. ``c = 0`` selects the gamma / average-gamma
closed forms throughout.

All transforms accept complex scalars or numpy arrays and use the principal
branch; arguments on the cut (-inf, -b] raise :class:`DomainError`.
"""

import logging
import math

import numpy as np
from scipy.special import exp1, gamma, gammainc, gammaincc

from .exceptions import DomainError
from .models.params import AtsParams, LevyTriplet
from .quad import integrate_finite, integrate_semi_infinite
from .models.quad import QuadConfig
from .utils import Process

logger = logging.getLogger(__name__)

# |u| below this multiple of b switches the ATS exponent to its cumulant series
SERIES_RADIUS = 1e-4
SERIES_TERMS = 10


def gamma_neg(c: float) -> float:
    """Γ(-c) for c in (0, 1) via Γ(1-c)/(-c)."""
    return gamma(1.0 - c) / (-c)


def gamma_neg_shifted(c: float) -> float:
    """Γ(-c-1) = Γ(1-c)/(c(c+1)), positive on (0, 1)."""
    return gamma(1.0 - c) / (c * (c + 1.0))


def upper_gamma(s: float, z):
    """Upper incomplete gamma Γ(s, z) for s > -1 and z > 0.

    Negative orders use one upward step of Γ(s+1, z) = sΓ(s, z) + z^s e^{-z}.
    """
    z = np.asarray(z, dtype=float)
    if s > 0:
        return gammaincc(s, z) * gamma(s)
    if s == 0:
        return exp1(z)
    if s <= -1:
        raise DomainError(f"upper_gamma supports orders above -1, got {s}")
    return (upper_gamma(s + 1.0, z) - np.power(z, s) * np.exp(-z)) / s


def check_branch(u, b: float) -> None:
    u = np.asarray(u, dtype=complex)
    bad = (u.imag == 0) & (u.real <= -b)
    if np.any(bad):
        raise DomainError(f"u={complex(u[bad].flat[0])} lies on the branch cut (-inf, -{b:g}]")


def _result(values: np.ndarray, like):
    return complex(values) if np.ndim(like) == 0 else values


def _saturating_exp(exponent: np.ndarray, name: str) -> np.ndarray:
    with np.errstate(over="ignore"):
        out = np.exp(exponent)
    if not np.all(np.isfinite(out)):
        logger.warning("%s overflowed; saturating to inf", name)
    return out


def laplace_exponent_ts(p: AtsParams, u):
    """log E e^{-u X_t} = at Γ(-c)((b+u)^c - b^c); -at log(1+u/b) at c=0."""
    uc = np.asarray(u, dtype=complex)
    check_branch(uc, p.b)
    z = np.log1p(uc / p.b)
    if p.c == 0:
        out = -p.shape * z
    else:
        out = p.shape * gamma_neg(p.c) * p.b**p.c * np.expm1(p.c * z)
    return _result(out, u)


def laplace_ts(p: AtsParams, u):
    return _result(_saturating_exp(np.asarray(laplace_exponent_ts(p, u)), "TS transform"), u)


def cumulant_series_exponent(p: AtsParams, u, terms: int = SERIES_TERMS):
    """Σ_{n=1}^{terms} C(n)(-u)^n/n!, the ATS exponent near its removable singularity."""
    uc = np.asarray(u, dtype=complex)
    out = np.zeros_like(uc)
    power = np.ones_like(uc)
    for n in range(1, terms + 1):
        power = power * (-uc) / n
        cumulant = p.shape * gamma(n - p.c) / ((n + 1) * p.b ** (n - p.c))
        out = out + cumulant * power
    return _result(out, u)


def _closed_form_exponent(p: AtsParams, u: np.ndarray) -> np.ndarray:
    z = u / p.b
    lz = np.log1p(z)
    if p.c == 0:
        return p.shape * (1.0 - (1.0 + 1.0 / z) * lz)
    c1 = p.c + 1.0
    return p.shape * gamma_neg(p.c) * p.b**p.c * (np.expm1(c1 * lz) - c1 * z) / (c1 * z)


def laplace_exponent_ats(p: AtsParams, u):
    """log E e^{-u X̃_t}, evaluated directly (never as log of the transform).

    Equals at Γ(-c)(∫₀¹(b+us)^c ds - b^c); the closed form divides by u, so
    |u| < SERIES_RADIUS*b goes through the cumulant series instead.
    """
    uc = np.atleast_1d(np.asarray(u, dtype=complex))
    check_branch(uc, p.b)
    out = np.zeros_like(uc)
    small = np.abs(uc) < SERIES_RADIUS * p.b
    if small.any():
        out[small] = cumulant_series_exponent(p, uc[small])
    if (~small).any():
        out[~small] = _closed_form_exponent(p, uc[~small])
    return complex(out[0]) if np.ndim(u) == 0 else out.reshape(np.shape(u))


def laplace_ats(p: AtsParams, u):
    return _result(_saturating_exp(np.asarray(laplace_exponent_ats(p, u)), "ATS transform"), u)


def laplace_gamma(p: AtsParams, u):
    """(1 + u/b)^{-at}."""
    check_branch(u, p.b)
    return _result(np.power(1.0 + np.asarray(u, dtype=complex) / p.b, -p.shape), u)


def laplace_ig(p: AtsParams, u):
    """exp(2√π at(√b - √(b+u)))."""
    check_branch(u, p.b)
    uc = np.asarray(u, dtype=complex)
    return _result(np.exp(2.0 * math.sqrt(math.pi) * p.shape * (math.sqrt(p.b) - np.sqrt(p.b + uc))), u)


def laplace_ag(p: AtsParams, u):
    """e^{at}(1 + u/b)^{-at(1 + b/u)}."""
    check_branch(u, p.b)
    uc = np.asarray(u, dtype=complex)
    return _result(np.exp(p.shape) * np.power(1.0 + uc / p.b, -p.shape * (1.0 + p.b / uc)), u)


def laplace_aig(p: AtsParams, u):
    """exp(4√π at(b^{3/2} + (3/2)√b u - (b+u)^{3/2})/(3u))."""
    check_branch(u, p.b)
    uc = np.asarray(u, dtype=complex)
    b = p.b
    exponent = 4.0 * math.sqrt(math.pi) * p.shape * (b**1.5 + 1.5 * math.sqrt(b) * uc - (b + uc) ** 1.5) / (3.0 * uc)
    return _result(np.exp(exponent), u)


def levy_triplet_ts(p: AtsParams) -> LevyTriplet:
    """Triplet of X per unit time; drift a b^{c-1} γ(1-c, b) with the unit truncation."""
    a, b, c = p.a, p.b, p.c
    drift = a * b ** (c - 1.0) * gamma(1.0 - c) * gammainc(1.0 - c, b)

    def density(x):
        x = np.asarray(x, dtype=float)
        return a * np.exp(-b * x) * np.power(x, -c - 1.0)

    return LevyTriplet(drift=float(drift), brownian=0.0, levy_density=density)


def tempering_function(p: AtsParams, x):
    """Q̃(x) = (e^{-bx} - (bx)^{c+1}Γ(-c, bx))/(c+1); ν̃(dx) = Q̃(x) a x^{-c-1} dx."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("tempering function needs x > 0")
    bx = p.b * x
    with np.errstate(under="ignore"):
        out = (np.exp(-bx) - np.power(bx, p.c + 1.0) * upper_gamma(-p.c, bx)) / (p.c + 1.0)
    return float(out) if out.ndim == 0 else out


def levy_triplet_ats(p: AtsParams) -> LevyTriplet:
    """Triplet of Λ per unit time.

    ℓ̃(x) = (a/(c+1))(e^{-bx} x^{-c-1} - b^{c+1}Γ(-c, bx)); the drift α̃ equals
    ∫₀¹ x ℓ̃(x) dx since Λ has no continuous part.
    """
    a, b, c = p.a, p.b, p.c
    drift = (a / (2.0 * b ** (1.0 - c))) * (
        gamma(1.0 - c)
        + (upper_gamma(2.0 - c, b) - 2.0 * upper_gamma(1.0 - c, b) - b * b * upper_gamma(-c, b)) / (c + 1.0)
    )

    def density(x):
        x = np.asarray(x, dtype=float)
        return tempering_function(p, x) * a * np.power(x, -c - 1.0)

    return LevyTriplet(drift=float(drift), brownian=0.0, levy_density=density)


def levy_khintchine_exponent(triplet: LevyTriplet, u: float, t: float = 1.0, cfg: QuadConfig | None = None) -> float:
    """-α u + ∫₀¹(e^{-ux} - 1 + ux)ℓ + ∫₁^∞(e^{-ux} - 1)ℓ for real u > 0, times t."""
    cfg = cfg or QuadConfig(abs_tol=1e-12, rel_tol=1e-11)
    u = float(u)
    if u < 0:
        raise DomainError("the Lévy-Khintchine evaluator takes u >= 0")
    near = integrate_finite(lambda x: (np.expm1(-u * x) + u * x) * triplet.levy_density(x), 0.0, 1.0, cfg)
    far = integrate_semi_infinite(lambda x: np.expm1(-u * x) * triplet.levy_density(x), 1.0, cfg)
    return t * (-triplet.drift * u + near.value + far.value)


def bg_index(process: Process, p: AtsParams) -> float:
    """Blumenthal-Getoor index; X and Λ share it, and it stays below 1 so paths have finite variation."""
    return p.c
