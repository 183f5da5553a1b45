"""Density, distribution function, tails and mode of ATS(at, b; c).

The density and the survival function are proper integrals over y in (0, 1)
obtained by collapsing the Bromwich contour onto the branch cut and
substituting u = b/y:

    f(x)   = (b/π) e^{-bx} ∫₀¹ e^{L(y) - bx w(y)} sin Φ(y) / y² dy
    1-F(x) = (1/π) e^{-bx} ∫₀¹ e^{L(y) - bx w(y)} sin Φ(y) / y  dy

with w = 1/y - 1, k = at Γ(-c-1) b^c and

    L(y) = k((c+1) - y - cos(πc)(1-y)w^c),   Φ(y) = k sin(πc)(1-y)w^c

(c = 0: L = at(1 - (1-y) log w), Φ = π at (1-y)). The integrand is O(1) while
the left tail is super-exponentially small, so a contour value whose error
estimate is not small against the value itself is not trusted. ``method=auto``
then inverts along the vertical line through the real saddle of e^{sx}f̄(s)
(c >= SADDLE_MIN_C), where |f̄(s0+iv)| <= f̄(s0) rules out cancellation, and
falls back to fixed-Talbot inversion for smaller c.

Tail constants were settled against the quadrature: the right tail is
at e^{K-bx}/(b x^{c+2}) with K = at b^c Γ(1-c)/(c+1), and the inverse Gaussian
left tail carries 4π(at)²/(9x).
"""

import logging
import math
from functools import wraps

import numpy as np
from scipy.special import gammaln

from .exceptions import BracketError, DomainError, QuadratureError
from .models.dist import LimitReport, TailEstimate
from .models.params import AtsParams
from .models.quad import QuadConfig, QuadResult
from .params import gamma_neg, gamma_neg_shifted, laplace_ats, laplace_exponent_ats
from .quad import find_root, integrate_finite, integrate_semi_infinite
from .utils import TALBOT_NODES, InversionMethod, TailRegime

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329

# contour integrand considered ill-conditioned past these limits
GROWTH_LIMIT = 10.0
OSCILLATION_LIMIT = 40.0
# nominal absolute accuracy of the Talbot route, used for clamping
TALBOT_ERROR = 1e-9
# y nodes where the peak of the integrand exponent is sought
PEAK_GRID = np.concatenate([np.geomspace(1e-6, 0.5, 200), 1.0 - np.geomspace(0.5, 1e-12, 200)[1:]])
# a contour value is trusted once its error estimate is below this share of it
RESOLVED_SHARE = 1e-6
# below this c the vertical line decays too slowly for the saddle route
SADDLE_MIN_C = 0.2
SADDLE_CFG = QuadConfig(max_subdivisions=1000)
# e^{-745} underflows to zero
LOG_UNDERFLOW = -745.0


def elementwise(func):
    """Let scalar routines accept an array of x values."""

    @wraps(func)
    def wrapper(p, x, *args, **kwargs):
        if np.ndim(x) == 0:
            return func(p, float(x), *args, **kwargs)
        flat = [func(p, float(v), *args, **kwargs) for v in np.ravel(x)]
        return np.reshape(np.array(flat, dtype=float), np.shape(x))

    return wrapper


def _check_point(p: AtsParams, x: float) -> None:
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"x must be positive and finite, got {x}")
    if not p.t > 0:
        raise DomainError("the law at t = 0 is a point mass at 0; use t > 0")


def contour_kernel(p: AtsParams, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Log-amplitude L(y) and phase Φ(y) of the collapsed contour integrand."""
    w = 1.0 / y - 1.0
    if p.c == 0:
        log_amp = p.shape * (1.0 - (1.0 - y) * np.log(w))
        phase = math.pi * p.shape * (1.0 - y)
        return log_amp, phase
    k = p.shape * gamma_neg_shifted(p.c) * p.b**p.c
    wc = np.power(w, p.c)
    log_amp = k * ((p.c + 1.0) - y - math.cos(math.pi * p.c) * (1.0 - y) * wc)
    phase = k * math.sin(math.pi * p.c) * (1.0 - y) * wc
    return log_amp, phase


def _contour_integral(p: AtsParams, x: float, power: int, cfg: QuadConfig | None) -> QuadResult:
    """∫₀¹ e^{L - bx w} sin Φ / y^power dy."""
    bx = p.b * x

    def integrand(y):
        log_amp, phase = contour_kernel(p, y)
        return np.exp(log_amp - bx * (1.0 / y - 1.0)) * np.sin(phase) / y**power

    res = integrate_finite(integrand, 0.0, 1.0, cfg)
    if not res.usable:
        raise QuadratureError(f"contour integral at x={x:.6g} did not converge", res.error_estimate)
    return res


def contour_is_stable(p: AtsParams, x: float) -> bool:
    """Whether the contour integrand is well conditioned at x.

    The integrand peaks near e^{max(L - bx/y)} while the density stays O(b), so a
    large peak means cancellation (large at). For c > 0 the growth and
    oscillation of w^c are bounded as well.
    """
    log_amp, _ = contour_kernel(p, PEAK_GRID)
    if float(np.max(log_amp - p.b * x / PEAK_GRID)) > GROWTH_LIMIT:
        return False
    c = p.c
    if c == 0:
        return True
    bx = p.b * x
    k = p.shape * gamma_neg_shifted(c) * p.b**c
    cos_pc, sin_pc = math.cos(math.pi * c), math.sin(math.pi * c)
    if cos_pc < 0:
        growth = -k * cos_pc
        y_peak = (bx / (c * growth)) ** (1.0 / (1.0 - c))
        if y_peak < 1.0 and bx * (1.0 - c) / (c * y_peak) > GROWTH_LIMIT:
            return False
    w_max = 40.0 / bx
    if cos_pc > 1e-12:
        w_max = min(w_max, ((40.0 + k * (c + 1.0)) / (k * cos_pc)) ** (1.0 / c))
    return k * sin_pc * w_max**c / math.pi <= OSCILLATION_LIMIT


def invert_laplace_talbot(log_transform, x, nodes: int = TALBOT_NODES) -> np.ndarray:
    """Fixed-Talbot inversion of a transform given through its logarithm.

    f(x) ≈ (r/M)[½ e^{rx}F(r) + Σ_{k<M} Re(e^{x s_k}F(s_k)(1 + iσ_k))] with
    r = 2M/(5x), s_k = rθ_k(cot θ_k + i), σ_k = θ_k + (θ_k cot θ_k - 1)cot θ_k.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    theta = np.arange(1, nodes) * math.pi / nodes
    cot = 1.0 / np.tan(theta)
    sigma = theta + (theta * cot - 1.0) * cot
    r = 2.0 * nodes / (5.0 * x)
    s = r[:, None] * theta[None, :] * (cot[None, :] + 1j)
    with np.errstate(over="ignore", under="ignore"):
        terms = np.exp(x[:, None] * s + log_transform(s)) * (1.0 + 1j * sigma[None, :])
        head = 0.5 * np.exp(r * x + log_transform(r.astype(complex)))
    return (r / nodes) * (head.real + terms.real.sum(axis=1))


def _talbot(p: AtsParams, x: float, shift: int) -> float:
    """Invert s^shift f̄(s): shift 0 density, -1 distribution function, 1 minus the slope."""

    def log_transform(s):
        out = laplace_exponent_ats(p, s)
        return out + shift * np.log(s) if shift else out

    value = float(invert_laplace_talbot(log_transform, x)[0])
    if not math.isfinite(value):
        raise QuadratureError(f"Talbot inversion at x={x:.6g} overflowed", math.inf)
    return value


def _exponent_slope(p: AtsParams, s: float) -> float:
    """E'(s) on (-b, inf) by a central difference scaled to the distance from the branch point."""
    h = 1e-4 * (s + p.b)
    up, down = np.real(laplace_exponent_ats(p, np.array([s + h, s - h])))
    return float(up - down) / (2.0 * h)


def _exponent_curvature(p: AtsParams, s: float) -> float:
    h = 1e-3 * (s + p.b)
    below, mid, above = np.real(laplace_exponent_ats(p, np.array([s - h, s, s + h])))
    return float(below - 2.0 * mid + above) / (h * h)


def saddle_abscissa(p: AtsParams, x: float, side: int = 0) -> float:
    """Real saddle of e^{sx} f̄(s) (side 0) or of e^{sx} f̄(s)/s (side ±1).

    Side 1 searches (0, inf), where the line integral gives F(x); side -1 searches
    (-b, 0), where it gives F(x) - 1. Without a saddle on (-b, 0) the line sits
    within 1/x of the branch point.
    """
    b = p.b

    def slope(s):
        out = x + _exponent_slope(p, s)
        return out - 1.0 / s if side else out

    if side > 0:
        lo = 1e-3 * min(b, 1.0 / x)
    else:
        lo = -b * (1.0 - 1e-6)
        if slope(lo) >= 0:
            return -b * (1.0 - min(0.5, 1.0 / (b * x)))
    if side < 0:
        hi = -1e-3 * min(b, 1.0 / x)
        for _ in range(30):
            if slope(hi) > 0:
                break
            hi *= 0.1
        else:
            raise BracketError(f"no saddle below the origin for x={x:.6g}")
    else:
        hi = max(b, 1.0 / x)
        for _ in range(60):
            if slope(hi) > 0:
                break
            hi *= 4.0
        else:
            raise BracketError(f"no saddle above the origin for x={x:.6g}")
    return find_root(slope, lo, hi, tol=1e-8 * max(abs(lo), abs(hi)))


def invert_laplace_saddle(
    p: AtsParams, x: float, power: int, s0: float, cfg: QuadConfig | None = None
) -> tuple[float, float]:
    """(1/2πi)∫ e^{sx} f̄(s) s^power ds along Re s = s0, with its error estimate.

    Evaluated as e^{s0 x + E(s0)}/π ∫₀^∞ Re[e^{ivx + E(s0+iv) - E(s0)} s^power] dv.
    Since |f̄(s0+iv)| <= f̄(s0) the integrand never exceeds |s|^power, and v is
    scaled by the curvature of the exponent at s0. Power -1 is normalised by s0.
    """
    if p.c < SADDLE_MIN_C:
        raise DomainError(f"the saddle route needs c >= {SADDLE_MIN_C}, got {p.c}")
    e0 = float(np.real(laplace_exponent_ats(p, s0)))
    log_scale = s0 * x + e0
    if log_scale < LOG_UNDERFLOW:
        return 0.0, 0.0
    curvature = _exponent_curvature(p, s0) + (1.0 / (s0 * s0) if power < 0 else 0.0)
    width = 1.0 / math.sqrt(curvature) if curvature > 0 and math.isfinite(curvature) else 1.0 / (abs(s0) + p.b)

    def integrand(u):
        v = width * u
        s = s0 + 1j * v
        with np.errstate(under="ignore"):
            z = np.exp(1j * v * x + laplace_exponent_ats(p, s) - e0)
        if power < 0:
            z = z * s0 / s
        elif power > 0:
            z = z * s
        return width * np.real(z)

    res = integrate_semi_infinite(integrand, 0.0, cfg or SADDLE_CFG)
    if not res.usable or not math.isfinite(res.value):
        raise QuadratureError(f"saddle-line integral at x={x:.6g} did not converge", res.error_estimate)
    scale = math.exp(log_scale) / math.pi / (s0 if power < 0 else 1.0)
    return scale * res.value, abs(scale) * res.error_estimate


def _fallback(p: AtsParams) -> InversionMethod:
    return InversionMethod.SADDLE if p.c >= SADDLE_MIN_C else InversionMethod.TALBOT


def _resolve(p: AtsParams, x: float, method: InversionMethod) -> InversionMethod:
    if method is not InversionMethod.AUTO:
        return method
    if contour_is_stable(p, x):
        return InversionMethod.CONTOUR
    route = _fallback(p)
    logger.debug("contour integrand ill-conditioned at x=%.6g (c=%g); using %s inversion", x, p.c, route.value)
    return route


def _contour_attempt(
    p: AtsParams, x: float, power: int, cfg: QuadConfig | None, method: InversionMethod
) -> QuadResult | None:
    """Contour integral, or None when auto mode should move to another route."""
    try:
        res = _contour_integral(p, x, power, cfg)
    except QuadratureError as exc:
        if method is not InversionMethod.AUTO:
            raise
        logger.debug("contour route failed at x=%.6g: %s", x, exc.detail)
        return None
    return res


def _trusted(error: float, *values: float) -> bool:
    return error <= RESOLVED_SHARE * min(abs(v) for v in values)


def _clamp(value: float, error: float, what: str, x: float, upper: float | None = None) -> float:
    if value < 0:
        if -value <= 10.0 * error:
            return 0.0
        raise QuadratureError(f"{what} at x={x:.6g} came out negative ({value:.3e})", error)
    if upper is not None and value > upper:
        if value - upper <= 10.0 * error:
            return upper
        raise QuadratureError(f"{what} at x={x:.6g} exceeds {upper} ({value:.12g})", error)
    return value


@elementwise
def pdf(p: AtsParams, x: float, cfg: QuadConfig | None = None, method: InversionMethod = InversionMethod.AUTO) -> float:
    _check_point(p, x)
    route = _resolve(p, x, method)
    if route is InversionMethod.CONTOUR:
        res = _contour_attempt(p, x, 2, cfg, method)
        if res is not None:
            scale = p.b / math.pi * math.exp(-p.b * x)
            value, error = scale * res.value, scale * res.error_estimate
            if method is InversionMethod.CONTOUR or _trusted(error, value):
                return _clamp(value, error, "density", x)
            logger.debug("contour density %.3e at x=%.6g unresolved (error %.3e)", value, x, error)
        route = _fallback(p)
    if route is InversionMethod.TALBOT:
        return _clamp(_talbot(p, x, 0), TALBOT_ERROR, "density", x)
    value, error = invert_laplace_saddle(p, x, 0, saddle_abscissa(p, x), cfg)
    return _clamp(value, error, "density", x)


def _distribution(p: AtsParams, x: float, cfg: QuadConfig | None, method: InversionMethod) -> tuple[float, float, float]:
    """(F(x), 1 - F(x), error) from whichever route resolves the smaller of the two."""
    route = _resolve(p, x, method)
    if route is InversionMethod.CONTOUR:
        res = _contour_attempt(p, x, 1, cfg, method)
        if res is not None:
            scale = math.exp(-p.b * x) / math.pi
            upper, error = scale * res.value, scale * res.error_estimate
            if method is InversionMethod.CONTOUR or _trusted(error, upper, 1.0 - upper):
                return 1.0 - upper, upper, error
            logger.debug("contour survival %.12g at x=%.6g unresolved (error %.3e)", upper, x, error)
        route = _fallback(p)
    if route is InversionMethod.TALBOT:
        lower = _talbot(p, x, -1)
        return lower, 1.0 - lower, TALBOT_ERROR
    if x <= _mean_sd(p)[0]:
        lower, error = invert_laplace_saddle(p, x, -1, saddle_abscissa(p, x, 1), cfg)
        return lower, 1.0 - lower, error
    shortfall, error = invert_laplace_saddle(p, x, -1, saddle_abscissa(p, x, -1), cfg)
    return 1.0 + shortfall, -shortfall, error


@elementwise
def sf(p: AtsParams, x: float, cfg: QuadConfig | None = None, method: InversionMethod = InversionMethod.AUTO) -> float:
    """1 - F(x); e^{-bx} is factored out on the contour, so the deep right tail keeps its relative accuracy."""
    _check_point(p, x)
    _, upper, error = _distribution(p, x, cfg, method)
    return _clamp(upper, error, "survival function", x, upper=1.0)


@elementwise
def cdf(p: AtsParams, x: float, cfg: QuadConfig | None = None, method: InversionMethod = InversionMethod.AUTO) -> float:
    _check_point(p, x)
    lower, _, error = _distribution(p, x, cfg, method)
    return _clamp(lower, error, "distribution function", x, upper=1.0)


def quantile(p: AtsParams, q: float, cfg: QuadConfig | None = None) -> float:
    """Root of cdf(x) = q."""
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    mean, sd = _mean_sd(p)
    lo, hi = mean / 100.0, mean + 40.0 * sd
    for _ in range(6):
        if cdf(p, lo, cfg) < q:
            break
        lo /= 10.0
    return find_root(lambda x: cdf(p, x, cfg) - q, lo, hi, tol=1e-13 * max(mean, 1.0))


def _mean_sd(p: AtsParams) -> tuple[float, float]:
    mean = p.shape * math.gamma(1.0 - p.c) / (2.0 * p.b ** (1.0 - p.c))
    var = p.shape * math.gamma(2.0 - p.c) / (3.0 * p.b ** (2.0 - p.c))
    return mean, math.sqrt(var)


def slope_integral(
    p: AtsParams, x: float, cfg: QuadConfig | None = None, method: InversionMethod = InversionMethod.AUTO
) -> float:
    """A positive multiple of -f'(x): ∫₀¹ e^{L - bx w} sin Φ / y³ dy on the contour route."""
    _check_point(p, x)
    route = _resolve(p, x, method)
    if route is InversionMethod.CONTOUR:
        res = _contour_attempt(p, x, 3, cfg, method)
        if res is not None and (method is InversionMethod.CONTOUR or _trusted(res.error_estimate, res.value)):
            return res.value
        route = _fallback(p)
    if route is InversionMethod.TALBOT:
        return -_talbot(p, x, 1)
    value, _ = invert_laplace_saddle(p, x, 1, saddle_abscissa(p, x), cfg)
    return -value


def mode(p: AtsParams, cfg: QuadConfig | None = None, method: InversionMethod = InversionMethod.AUTO) -> float:
    """Unique maximiser of the (unimodal) density.

    For c = 0 and at <= 1 the density is maximal at the origin and 0.0 is
    returned. A slope that underflows to zero moves the lower end of the
    bracket up instead of down.
    """
    if not p.t > 0:
        raise DomainError("mode needs t > 0")
    if p.c == 0 and p.shape <= 1.0:
        return 0.0
    mean, _ = _mean_sd(p)
    suggested = (mean / 100.0, mean * 10.0)
    lo, hi = suggested

    def slope(x):
        return slope_integral(p, x, cfg, method)

    for _ in range(8):
        rising = slope(lo)
        if rising < 0:
            break
        lo = lo * 3.0 if rising == 0 else lo / 10.0
    else:
        raise BracketError("density is not increasing near 0", suggested_bracket=suggested)
    for _ in range(4):
        if slope(hi) > 0:
            break
        hi *= 10.0
    else:
        raise BracketError("density is not decreasing at large x", suggested_bracket=suggested)
    return find_root(slope, lo, hi, tol=1e-12 * mean)


def right_tail_constant(p: AtsParams) -> float:
    """K = at b^c Γ(1-c)/(c+1), shared by the right tails and large-order moments."""
    return p.shape * p.b**p.c * math.gamma(1.0 - p.c) / (p.c + 1.0)


def pdf_right_tail(p: AtsParams, x: float) -> TailEstimate:
    """at e^{K-bx}/(b x^{c+2}); meant for x beyond mean + 5 sd."""
    _check_point(p, x)
    log_value = math.log(p.shape) + right_tail_constant(p) - p.b * x - math.log(p.b) - (p.c + 2.0) * math.log(x)
    return TailEstimate(value=math.exp(log_value), regime=TailRegime.RIGHT)


def _left_integral(p: AtsParams, x: float, power: int, cfg: QuadConfig | None) -> float:
    """∫₀¹ exp(-k cos(πc) w^c - bx/y) sin(k sin(πc) w^c) / y^power dy."""
    k = p.shape * gamma_neg_shifted(p.c) * p.b**p.c
    cos_pc, sin_pc = math.cos(math.pi * p.c), math.sin(math.pi * p.c)
    bx = p.b * x

    def integrand(y):
        wc = np.power(1.0 / y - 1.0, p.c)
        return np.exp(-k * cos_pc * wc - bx / y) * np.sin(k * sin_pc * wc) / y**power

    res = integrate_finite(integrand, 0.0, 1.0, cfg)
    if not res.usable:
        raise QuadratureError(f"left-tail integral at x={x:.6g} did not converge", res.error_estimate)
    return res.value


def pdf_left_tail(p: AtsParams, x: float, cfg: QuadConfig | None = None) -> TailEstimate:
    """Small-x behaviour of the density; meant for x below 0.05 mean."""
    _check_point(p, x)
    at, b, c = p.shape, p.b, p.c
    if c == 0:
        if math.isclose(at, 1.0, rel_tol=1e-12):
            bx = b * x
            value = math.e * b * (1.0 + bx * (EULER_GAMMA - 2.0 + math.log(bx)))
            return TailEstimate(value=max(value, 0.0), regime=TailRegime.LEFT, leading_order_only=False)
        log_value = at * (1.0 + math.log(b)) + (at - 1.0) * math.log(x) - gammaln(at)
        return TailEstimate(value=math.exp(log_value), regime=TailRegime.LEFT)
    if c == 0.5:
        log_value = (
            math.log(2.0 * at / 3.0)
            - 1.5 * math.log(x)
            + 2.0 * at * math.sqrt(math.pi * b)
            - 3.0 * b * x
            - 4.0 * math.pi * at * at / (9.0 * x)
        )
        return TailEstimate(value=math.exp(log_value), regime=TailRegime.LEFT)
    const = -at * b**c * gamma_neg(c)
    value = b / math.pi * math.exp(const) * _left_integral(p, x, 2, cfg)
    return TailEstimate(value=max(value, 0.0), regime=TailRegime.LEFT)


def cdf_tails(p: AtsParams, x: float, regime: TailRegime, cfg: QuadConfig | None = None) -> TailEstimate:
    """Tail estimates of the distribution function.

    RIGHT approximates 1 - F(x) by at e^{K-bx}/(b² x^{c+2}); LEFT approximates
    F(x) itself.
    """
    _check_point(p, x)
    at, b, c = p.shape, p.b, p.c
    if regime is TailRegime.RIGHT:
        return TailEstimate(value=pdf_right_tail(p, x).value / b, regime=regime)
    if c == 0:
        if math.isclose(at, 1.0, rel_tol=1e-12):
            bx = b * x
            value = math.e * (bx + 0.5 * bx * bx * (EULER_GAMMA - 2.0 + math.log(bx)) - 0.25 * bx * bx)
            return TailEstimate(value=max(value, 0.0), regime=regime, leading_order_only=False)
        log_value = at * (1.0 + math.log(b * x)) - gammaln(at + 1.0)
        return TailEstimate(value=math.exp(log_value), regime=regime)
    const = -at * b**c * gamma_neg(c)
    value = math.exp(c * at * b**c * gamma_neg_shifted(c)) - math.exp(const) / math.pi * _left_integral(p, x, 1, cfg)
    return TailEstimate(value=max(value, 0.0), regime=regime)


def limit_checks(p: AtsParams, u_grid: np.ndarray | None = None) -> LimitReport:
    """Max deviations of the a→0, b→0 and c→0 limits of the exponent on a u-grid."""
    u = np.linspace(0.1, 5.0, 50) if u_grid is None else np.asarray(u_grid, dtype=float)
    thin = p.replace(a=1e-8)
    activity = float(np.max(np.abs(laplace_exponent_ats(thin, u))))
    stable = None
    if p.c > 0:
        flat = p.replace(b=1e-8)
        target = -p.shape * np.power(u, p.c) * gamma_neg_shifted(p.c)
        stable = float(np.max(np.abs(laplace_exponent_ats(flat, u) - target)))
    gamma_lim = float(np.max(np.abs(laplace_ats(p.replace(c=1e-6), u) - laplace_ats(p.replace(c=0.0), u))))
    return LimitReport(activity_limit=activity, stable_limit=stable, gamma_limit=gamma_lim)


def logpdf_ts(p: AtsParams, x):
    """Closed-form log density of TS(at, b; c) for c = 0 (gamma) and c = 1/2 (inverse Gaussian).

    The IG form at x^{-3/2} exp(-(√b x - √π at)²/x) is the first-passage
    density with δ = √(2π) at, γ = √(2b) and has unit mass as written.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("x must be positive")
    at, b = p.shape, p.b
    if p.c == 0:
        return at * math.log(b) - gammaln(at) + (at - 1.0) * np.log(x) - b * x
    if p.c == 0.5:
        return math.log(at) - 1.5 * np.log(x) - (math.sqrt(b) * x - math.sqrt(math.pi) * at) ** 2 / x
    raise DomainError("closed-form TS densities exist for c = 0 and c = 1/2 only")


def pdf_ts(p: AtsParams, x):
    return np.exp(logpdf_ts(p, x))
