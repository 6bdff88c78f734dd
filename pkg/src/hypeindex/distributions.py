"""Scalar distribution kernels used by the statistical tests.

Self-contained double-precision implementations: inverse normal CDF
(Wichura's AS 241), regularized incomplete beta (Lentz continued fraction),
Student-t tail probabilities, and the Kolmogorov limiting distribution.
"""
from __future__ import annotations

import math

from .errors import NumericalError, UsageError

_SQRT2 = math.sqrt(2.0)


def norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


def norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / _SQRT2)


def log_norm_cdf(z: float) -> float:
    """log Phi(z), stable in the deep lower tail."""
    if z > -20.0:
        return math.log(0.5 * math.erfc(-z / _SQRT2))
    # asymptotic expansion of the Mills ratio for z << 0
    t = -z
    series = 1.0
    term = 1.0
    for k in range(1, 11):
        term *= -(2 * k - 1) / (t * t)
        series += term
    return -0.5 * t * t - 0.5 * math.log(2.0 * math.pi) - math.log(t) + math.log(series)


def inv_norm_cdf(p: float) -> float:
    """Inverse normal CDF, Wichura's algorithm AS 241 (PPND16)."""
    if not 0.0 < p < 1.0:
        raise UsageError(f"inverse normal CDF needs p in (0, 1), got {p}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
               + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
               + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
               + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
               + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
               + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
               + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
               + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
               + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
               + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
               + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
               + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
               + 2.05319162663775882187e0) * r + 1.0)
    else:
        r -= 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
               + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
               + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
               + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
               + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
               + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
               + 5.99832206555887937690e-1) * r + 1.0)
    value = num / den
    return -value if q < 0.0 else value


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Lentz's modified continued fraction for the incomplete beta integral."""
    tiny = 1e-300
    max_iter = 500
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 3e-16:
            return h
    raise NumericalError("incomplete beta continued fraction did not converge")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0.0 or b <= 0.0:
        raise UsageError("incomplete beta needs a > 0 and b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # choose the side where the continued fraction converges fast
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: float) -> float:
    """Two-sided Student-t tail probability P(|T_df| >= |t|)."""
    if df <= 0:
        raise UsageError("degrees of freedom must be positive")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return reg_inc_beta(df / 2.0, 0.5, x)


def chi2_sf_2df(x: float) -> float:
    """Chi-square survival function with 2 degrees of freedom: exp(-x/2)."""
    if x < 0:
        raise UsageError("chi-square statistic must be nonnegative")
    return math.exp(-x / 2.0)


def kolmogorov_sf(t: float) -> float:
    """Survival function of the Kolmogorov limiting distribution."""
    # below 0.2 the CDF is under 1e-12 and the alternating series converges
    # too slowly to be worth summing
    if t < 0.2:
        return 1.0
    total = 0.0
    for k in range(1, 200):
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * t * t)
        total += term
        if abs(term) < 1e-16 * max(abs(total), 1e-12):
            break
    return min(max(total, 0.0), 1.0)
