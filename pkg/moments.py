"""Cumulants, moments and summary statistics of ATS(at, b; c)."""

import logging
import math
from fractions import Fraction

from scipy.special import gamma, gammaln

from .dist import right_tail_constant
from .exceptions import DomainError
from .models.moments import SummaryStats
from .models.params import AtsParams

logger = logging.getLogger(__name__)

# ATS statistic over TS statistic: mean, variance, skewness, excess kurtosis
TS_RATIOS: dict[str, float] = {
    "mean": 0.5,
    "variance": 1.0 / 3.0,
    "skewness": 3.0 * math.sqrt(3.0) / 4.0,
    "excess_kurtosis": 9.0 / 5.0,
}

MOMENT_TABLE_SHAPES = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))
# smallest order the large-order moment estimate is meant for
LARGE_ORDER = 15


def cumulant(p: AtsParams, n: int) -> float:
    """C(n) = at Γ(n-c)/((n+1) b^{n-c}); C(0) = 0."""
    if n < 0:
        raise DomainError("cumulant order must be nonnegative")
    if n == 0:
        return 0.0
    return p.shape * gamma(n - p.c) / ((n + 1) * p.b ** (n - p.c))


def moment(p: AtsParams, n: int) -> float:
    """M(n) = Σ_{k<n} binom(n-1, k) C(k+1) M(n-1-k), M(0) = 1."""
    if n < 0:
        raise DomainError("moment order must be nonnegative")
    cumulants = [cumulant(p, k) for k in range(n + 1)]
    moments = [1.0]
    for m in range(1, n + 1):
        moments.append(math.fsum(math.comb(m - 1, k) * cumulants[k + 1] * moments[m - 1 - k] for k in range(m)))
    return moments[n]


def moment_exact(a: Fraction, b: Fraction, n: int, t: Fraction = Fraction(1)) -> Fraction:
    """Rational moments of the average-gamma law (c = 0): C(k) = at (k-1)!/((k+1) b^k)."""
    a, b, t = Fraction(a), Fraction(b), Fraction(t)
    cumulants = [Fraction(0)] + [a * t * math.factorial(k - 1) / ((k + 1) * b**k) for k in range(1, n + 1)]
    moments = [Fraction(1)]
    for m in range(1, n + 1):
        moments.append(sum(math.comb(m - 1, k) * cumulants[k + 1] * moments[m - 1 - k] for k in range(m)))
    return moments[n]


def moment_table(max_order: int = 5) -> list[dict]:
    """Moments M(0..max_order) for a in {1/2, 1, 3/2, 2}, b = t = 1, c in {0, 1/2}.

    c = 0 rows hold Fractions, c = 1/2 rows floats.
    """
    rows = []
    for c in (0.0, 0.5):
        for a in MOMENT_TABLE_SHAPES:
            if c == 0:
                values = [moment_exact(a, Fraction(1), n) for n in range(max_order + 1)]
            else:
                p = AtsParams(a=float(a), b=1.0, c=c)
                values = [moment(p, n) for n in range(max_order + 1)]
            rows.append({"a": a, "c": c, "moments": values})
    return rows


def stats(p: AtsParams) -> SummaryStats:
    if not p.t > 0:
        raise DomainError("statistics need t > 0")
    c2 = cumulant(p, 2)
    return SummaryStats(
        mean=cumulant(p, 1),
        variance=c2,
        skewness=cumulant(p, 3) / c2**1.5,
        excess_kurtosis=cumulant(p, 4) / c2**2,
    )


def ts_stats(p: AtsParams) -> SummaryStats:
    """Statistics of the TS marginal X_t, whose cumulants are at Γ(n-c)/b^{n-c}."""
    if not p.t > 0:
        raise DomainError("statistics need t > 0")

    def ts_cumulant(n: int) -> float:
        return p.shape * gamma(n - p.c) / p.b ** (n - p.c)

    c2 = ts_cumulant(2)
    return SummaryStats(
        mean=ts_cumulant(1),
        variance=c2,
        skewness=ts_cumulant(3) / c2**1.5,
        excess_kurtosis=ts_cumulant(4) / c2**2,
    )


def covariance_running_average(p: AtsParams, t: float, v: float) -> float:
    """cov(X̃_t, X̃_v) = aΓ(2-c)(3(t∨v) - t∧v)/(6b^{2-c}) · (t∧v)/(t∨v)."""
    if not (t > 0 and v > 0):
        raise DomainError("covariance needs positive times")
    lo, hi = min(t, v), max(t, v)
    return p.a * gamma(2.0 - p.c) * (3.0 * hi - lo) / (6.0 * p.b ** (2.0 - p.c)) * (lo / hi)


def covariance_lambda(p: AtsParams, t: float, v: float) -> float:
    """cov(Λ_t, Λ_v) = aΓ(2-c)(t∧v)/(3b^{2-c})."""
    if not (t > 0 and v > 0):
        raise DomainError("covariance needs positive times")
    return p.a * gamma(2.0 - p.c) * min(t, v) / (3.0 * p.b ** (2.0 - p.c))


def moment_large_order(p: AtsParams, n: int) -> float:
    """at e^K Γ(n-c-1)/b^{n-c}, the leading term of M(n) as n grows.

    The next term of the right tail makes the relative error decay like 1/n, so
    small orders only get the magnitude right. Orders below LARGE_ORDER are
    accepted but logged.
    """
    if n < 2:
        raise DomainError("the large-order estimate needs n >= 2")
    if n < LARGE_ORDER:
        logger.debug("large-order moment estimate used at n=%d < %d; expect a coarse value", n, LARGE_ORDER)
    log_value = math.log(p.shape) + right_tail_constant(p) + gammaln(n - p.c - 1.0) - (n - p.c) * math.log(p.b)
    return math.exp(log_value)
