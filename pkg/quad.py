"""Adaptive Gauss-Kronrod quadrature and bracketing root finding.

Integrands are vectorised: ``f`` receives a numpy array of nodes and returns an
array of the same shape (scalar integrands) or of shape ``(m,) + x.shape``
(vector integrands, see :func:`integrate_vector`). Panels are refined by
bisecting the one with the worst error estimate; the error heuristic and the
round-off floor follow QUADPACK's ``qk`` family.
"""

import heapq
import itertools
import logging
import math
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .exceptions import BracketError, DomainError, QuadratureError
from .models.quad import QuadConfig, QuadResult, VectorQuadResult
from .utils import RuleOrder

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)
TINY = float(np.finfo(float).tiny)

Integrand = Callable[[np.ndarray], np.ndarray]

# QUADPACK abscissae (descending, centre last) and weights
_GK15 = (
    (
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ),
    (
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ),
    (
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ),
)

_GK21 = (
    (
        0.995657163025808080735527280689003,
        0.973906528517171720077964012084452,
        0.930157491355708226001207180059508,
        0.865063366688984510732096688423493,
        0.780817726586416897063717578345042,
        0.679409568299024406234327365114874,
        0.562757134668604683339000099272694,
        0.433395394129247190799265943165784,
        0.294392862701460198131126603103866,
        0.148874338981631210884826001129720,
        0.000000000000000000000000000000000,
    ),
    (
        0.011694638867371874278064396062192,
        0.032558162307964727478818972459390,
        0.054755896574351996031381300244580,
        0.075039674810919952767043140916190,
        0.093125454583697605535065465083366,
        0.109387158802297641899210590325805,
        0.123491976262065851077208649893850,
        0.134709217311473325928054001771707,
        0.142775938577060080797094273138717,
        0.147739104901338491374841515972068,
        0.149445554002916905664936468389821,
    ),
    (
        0.066671344308688137593568809893332,
        0.149451349150580593145776339657697,
        0.219086362515982043995534934228163,
        0.269266719309996355091226921569469,
        0.295524224714752870173892994651338,
    ),
)


def _symmetric_rule(xgk, wgk, wg) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    half = np.asarray(xgk[:-1])
    kw_half = np.asarray(wgk[:-1])
    gw_half = np.zeros(half.size)
    n_pairs = half[1::2].size
    gw_half[1::2] = wg[:n_pairs]
    centre_gauss = wg[n_pairs] if len(wg) > n_pairs else 0.0
    nodes = np.concatenate([-half, [0.0], half[::-1]])
    kronrod = np.concatenate([kw_half, [wgk[-1]], kw_half[::-1]])
    gauss = np.concatenate([gw_half, [centre_gauss], gw_half[::-1]])
    return nodes, kronrod, gauss


def _kronrod_jacobi(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Laurie's algorithm for the Jacobi-Kronrod matrix of the Legendre weight."""
    size = int(math.ceil(3 * n / 2)) + 1
    k = np.arange(size, dtype=float)
    a0 = np.zeros(size)
    b0 = np.where(k == 0, 2.0, k * k / np.maximum(4.0 * k * k - 1.0, 1.0))

    a = np.zeros(2 * n + 1)
    b = np.zeros(2 * n + 1)
    a[: n * 3 // 2 + 1] = a0[: n * 3 // 2 + 1]
    b[:size] = b0
    s = np.zeros(n // 2 + 2)
    t = np.zeros(n // 2 + 2)
    t[1] = b[n + 1]
    for m in range(n - 1):
        u = 0.0
        for kk in range((m + 1) // 2, -1, -1):
            ll = m - kk
            u += (a[kk + n + 1] - a[ll]) * t[kk + 1] + b[kk + n + 1] * s[kk] - b[ll + 1] * s[kk + 1]
            s[kk + 1] = u
        s, t = t, s
    for j in range(n // 2, -1, -1):
        s[j + 1] = s[j]
    for m in range(n - 1, 2 * n - 2):
        u = 0.0
        j = 0
        for kk in range(m + 1 - n, (m - 1) // 2 + 1):
            ll = m - kk
            j = n - 1 - ll
            u += -(a[kk + n + 1] - a[ll]) * t[j + 1] - b[kk + n + 1] * s[j + 1] + b[ll + 1] * s[j + 2]
            s[j + 1] = u
        kk = (m + 1) // 2
        if m % 2 == 0:
            a[kk + n + 1] = a[kk] + (s[j + 1] - b[kk + n + 1] * s[j + 2]) / t[j + 2]
        else:
            b[kk + n + 1] = s[j + 1] / s[j + 2]
        s, t = t, s
    a[2 * n] = a[n - 1] - b[2 * n] * s[1] / t[1]
    return a, b


def _gauss_kronrod_rule(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a, b = _kronrod_jacobi(n)
    nodes, vectors = eigh_tridiagonal(a, np.sqrt(b[1:]))
    weights = b[0] * vectors[0, :] ** 2
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    gauss_nodes, gauss_weights = np.polynomial.legendre.leggauss(n)
    nodes[1::2] = gauss_nodes
    gauss = np.zeros_like(weights)
    gauss[1::2] = gauss_weights
    return nodes, weights, gauss


@lru_cache(maxsize=None)
def gauss_kronrod_rule(order: RuleOrder) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes on [-1, 1] with Kronrod and embedded Gauss weights (zero off the Gauss nodes)."""
    if order is RuleOrder.GK15:
        return _symmetric_rule(*_GK15)
    if order is RuleOrder.GK21:
        return _symmetric_rule(*_GK21)
    return _gauss_kronrod_rule(30)


def _evaluate(f: Integrand, panels: list[tuple[float, float]], rule, n_out: int | None):
    nodes, kronrod, gauss = rule
    lo = np.array([p[0] for p in panels])
    hi = np.array([p[1] for p in panels])
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * nodes[None, :]
    with np.errstate(over="ignore", under="ignore"):
        fx = np.asarray(f(x), dtype=float)
    if n_out is None:
        fx = np.broadcast_to(fx, x.shape)[None, ...]
    elif fx.shape != (n_out,) + x.shape:
        fx = np.broadcast_to(fx, (n_out,) + x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[np.any(~np.isfinite(fx), axis=0)]
        raise QuadratureError(f"integrand is not finite at x={bad.flat[0]:.6g}")

    resk = fx @ kronrod
    resg = fx @ gauss
    mean = 0.5 * resk
    resabs = (np.abs(fx) @ kronrod) * np.abs(half)
    resasc = (np.abs(fx - mean[..., None]) @ kronrod) * np.abs(half)
    err = np.abs((resk - resg) * half)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = np.where(resabs > TINY / (50 * EPS), 50 * EPS * resabs, 0.0)
    err = np.maximum(err, floor)
    values = resk * half
    # per panel: component values, worst component error, whether that error is only the floor
    out = []
    for i in range(len(panels)):
        worst = int(np.argmax(err[:, i]))
        out.append((values[:, i], float(err[worst, i]), bool(err[worst, i] <= floor[worst, i])))
    return out


def _adaptive(f: Integrand, lo: float, hi: float, cfg: QuadConfig, n_out: int | None):
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise DomainError(f"integration limits must be finite with lo < hi, got [{lo}, {hi}]")
    rule = gauss_kronrod_rule(cfg.rule_order)
    counter = itertools.count()
    (value, err, at_floor), = _evaluate(f, [(lo, hi)], rule, n_out)
    heap = [(-err, next(counter), lo, hi, value, err, at_floor)]
    total = value.copy()
    total_err = err
    bisections = 0
    converged = roundoff = False
    while True:
        if total_err <= cfg.tolerance(float(np.max(np.abs(total)))):
            converged = True
            break
        worst = heap[0]
        _, _, p_lo, p_hi, p_val, p_err, p_floor = worst
        mid = 0.5 * (p_lo + p_hi)
        if p_floor or not p_lo < mid < p_hi:
            roundoff = True
            break
        if bisections >= cfg.max_subdivisions:
            break
        heapq.heappop(heap)
        left, right = _evaluate(f, [(p_lo, mid), (mid, p_hi)], rule, n_out)
        for (a, b), (val, e, fl) in (((p_lo, mid), left), ((mid, p_hi), right)):
            heapq.heappush(heap, (-e, next(counter), a, b, val, e, fl))
        total = total - p_val + left[0] + right[0]
        total_err = total_err - p_err + left[1] + right[1]
        bisections += 1

    # resum from the panels to shed drift from the running updates
    values = np.array([[math.fsum(col) for col in zip(*(h[4] for h in heap))]]).ravel()
    total_err = math.fsum(h[5] for h in heap)
    if not converged:
        level = logging.DEBUG if roundoff else logging.WARNING
        reason = "round-off floor" if roundoff else f"subdivision cap {cfg.max_subdivisions}"
        logger.log(level, "quadrature on [%.6g, %.6g] stopped at %s, error estimate %.3e", lo, hi, reason, total_err)
    return values, total_err, bisections, converged, roundoff


def integrate_finite(f: Integrand, lo: float, hi: float, cfg: QuadConfig | None = None) -> QuadResult:
    """Integrate a vectorised real function over [lo, hi].

    Only interior Kronrod nodes are sampled, so integrable endpoint
    singularities are allowed. Running out of subdivisions is reported through
    ``converged=False``; a NaN or infinite integrand value raises.
    """
    cfg = cfg or QuadConfig()
    values, err, used, converged, roundoff = _adaptive(f, float(lo), float(hi), cfg, None)
    return QuadResult(
        value=float(values[0]),
        error_estimate=err,
        subdivisions_used=used,
        converged=converged,
        roundoff_limited=roundoff,
    )


def integrate_vector(f: Integrand, lo: float, hi: float, n_out: int, cfg: QuadConfig | None = None) -> VectorQuadResult:
    """Integrate ``n_out`` integrands sharing one adaptive mesh (error is the worst component)."""
    cfg = cfg or QuadConfig()
    values, err, used, converged, roundoff = _adaptive(f, float(lo), float(hi), cfg, n_out)
    return VectorQuadResult(
        values=values, error_estimate=err, subdivisions_used=used, converged=converged, roundoff_limited=roundoff
    )


def semi_infinite_map(f: Integrand, lo: float, transform: str = "rational") -> Integrand:
    """Pull an integrand on (lo, inf) back to (0, 1).

    ``rational``: x = lo + s/(1-s). ``reciprocal``: x = lo/y, requires lo > 0.
    """
    if transform == "rational":

        def mapped(s):
            one_minus = 1.0 - s
            return f(lo + s / one_minus) / (one_minus * one_minus)

        return mapped
    if transform == "reciprocal":
        if not lo > 0:
            raise DomainError("the reciprocal map needs a positive lower limit")

        def mapped(y):
            return f(lo / y) * (lo / (y * y))

        return mapped
    raise DomainError(f"unknown transform {transform!r}")


def integrate_semi_infinite(
    f: Integrand, lo: float, cfg: QuadConfig | None = None, transform: str = "rational"
) -> QuadResult:
    return integrate_finite(semi_infinite_map(f, float(lo), transform), 0.0, 1.0, cfg)


def integrate_octaves(
    f: Integrand,
    lo: float,
    first_width: float,
    n_out: int | None = None,
    cfg: QuadConfig | None = None,
    rel_tol: float = 1e-10,
    max_octaves: int = 60,
) -> VectorQuadResult:
    """Integrate a slowly decaying (oscillatory) integrand over (lo, inf).

    The upper limit doubles octave by octave until two consecutive octaves
    contribute less than ``rel_tol`` relative to the running total.
    """
    cfg = cfg or QuadConfig()
    if not first_width > 0:
        raise DomainError("first octave width must be positive")
    a, b = float(lo), float(lo) + first_width
    total = None
    err = 0.0
    used = 0
    quiet = 0
    converged = True
    roundoff = False
    for _ in range(max_octaves):
        if n_out is None:
            part = integrate_finite(f, a, b, cfg)
            values = np.array([part.value])
        else:
            part = integrate_vector(f, a, b, n_out, cfg)
            values = part.values
        total = values if total is None else total + values
        err += part.error_estimate
        used += part.subdivisions_used
        converged &= part.usable
        roundoff |= part.roundoff_limited
        scale = max(float(np.max(np.abs(total))), cfg.abs_tol)
        quiet = quiet + 1 if float(np.max(np.abs(values))) <= rel_tol * scale else 0
        if quiet >= 2:
            break
        a, b = b, lo + 2.0 * (b - lo)
    else:
        converged = False
        logger.warning("octave integration from %.6g did not settle after %d octaves", lo, max_octaves)
    return VectorQuadResult(
        values=total, error_estimate=err, subdivisions_used=used, converged=converged, roundoff_limited=roundoff
    )


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Brent's method on a sign-changing bracket [lo, hi]."""
    f_lo, f_hi = float(f(lo)), float(f(hi))
    if f_lo == 0.0:
        return float(lo)
    if f_hi == 0.0:
        return float(hi)
    if math.isnan(f_lo) or math.isnan(f_hi) or math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        width = hi - lo
        raise BracketError(
            f"no sign change on [{lo:.6g}, {hi:.6g}] (f={f_lo:.3e}, {f_hi:.3e})",
            suggested_bracket=(max(lo - width, lo / 10 if lo > 0 else lo - width), hi + width),
        )
    root, info = brentq(f, lo, hi, xtol=tol, rtol=4 * EPS, maxiter=500, full_output=True, disp=False)
    if not info.converged:
        raise BracketError(f"root finding on [{lo:.6g}, {hi:.6g}] did not converge: {info.flag}")
    return float(root)
