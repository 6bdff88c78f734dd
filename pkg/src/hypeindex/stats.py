"""Statistical toolkit: percent change, rolling statistics, correlation,
OLS regression with inference, power-law fits, normality battery, and
log-return volatility.
"""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import ExternalSeries
from .distributions import (
    chi2_sf_2df,
    inv_norm_cdf,
    kolmogorov_sf,
    log_norm_cdf,
    norm_cdf,
    norm_sf,
    t_sf_two_sided,
)
from .errors import AlignmentError, NumericalError, UsageError
from .indices import HypeSeries

# Anderson-Darling case-4 critical values (mean and variance estimated),
# asymptotic points at the 15/10/5/2.5/1 percent levels; finite-n values
# divide by 1 + 4/n - 25/n^2.
_AD_SIGNIFICANCE = (15.0, 10.0, 5.0, 2.5, 1.0)
_AD_ASYMPTOTIC = (0.576, 0.656, 0.787, 0.918, 1.092)


@dataclass(frozen=True)
class RegressionFit:
    """Ordinary least squares y = slope*x + intercept with t-based inference."""

    slope: float
    intercept: float
    r_squared: float
    p_slope: float
    p_intercept: float
    n: int

    def as_dict(self) -> dict[str, float]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "p_slope": self.p_slope,
            "p_intercept": self.p_intercept,
            "n": self.n,
        }


@dataclass(frozen=True)
class PowerFit:
    """Power-law fit y = coefficient * x^exponent via log-log least squares."""

    coefficient: float
    exponent: float
    r_squared_log: float
    n: int

    def as_dict(self) -> dict[str, float]:
        return {
            "coefficient": self.coefficient,
            "exponent": self.exponent,
            "r_squared_log": self.r_squared_log,
            "n": self.n,
        }


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float

    def as_dict(self) -> dict[str, float]:
        return {"statistic": self.statistic, "p_value": self.p_value}


@dataclass(frozen=True)
class AndersonDarlingResult:
    """AD statistic with its significance-level/critical-value table."""

    statistic: float
    significance_levels: tuple[float, ...]
    critical_values: tuple[float, ...]

    def critical_value(self, significance_pct: float) -> float:
        try:
            i = self.significance_levels.index(significance_pct)
        except ValueError:
            raise UsageError(
                f"no critical value tabulated at {significance_pct}%"
            ) from None
        return self.critical_values[i]

    def as_dict(self) -> dict[str, object]:
        return {
            "statistic": self.statistic,
            "significance_levels": list(self.significance_levels),
            "critical_values": list(self.critical_values),
        }


@dataclass(frozen=True)
class NormalityReport:
    n: int
    shapiro_wilk: TestResult
    dagostino_k2: TestResult
    jarque_bera: TestResult
    anderson_darling: AndersonDarlingResult
    kolmogorov_smirnov: TestResult

    def as_dict(self) -> dict[str, object]:
        return {
            "n": self.n,
            "shapiro_wilk": self.shapiro_wilk.as_dict(),
            "dagostino_k2": self.dagostino_k2.as_dict(),
            "jarque_bera": self.jarque_bera.as_dict(),
            "anderson_darling": self.anderson_darling.as_dict(),
            "kolmogorov_smirnov": self.kolmogorov_smirnov.as_dict(),
        }


def _series_arrays(series: HypeSeries | ExternalSeries) -> tuple[tuple[dt.date, ...], np.ndarray, str]:
    label = getattr(series, "entity", None) or getattr(series, "name")
    return series.dates, np.asarray(series.values, dtype=np.float64), label


def pct_change(series: HypeSeries) -> HypeSeries:
    """Relative day-over-day change; output starts at the second date."""
    dates, values, label = _series_arrays(series)
    if len(values) < 2:
        raise UsageError(f"series {label}: need at least 2 observations for percent change")
    prev = values[:-1]
    zero = prev == 0
    if zero.any():
        day = dates[int(np.argmax(zero))]
        raise NumericalError(f"series {label}: zero value on {day} cannot be a denominator")
    return HypeSeries(label, "pct_change", dates[1:], np.diff(values) / prev)


def rolling_mean_std(
    series: HypeSeries | ExternalSeries, window: int
) -> tuple[HypeSeries, HypeSeries]:
    """Trailing rolling mean and sample standard deviation.

    The mean warms up on the partial prefix; the std starts once two
    observations exist and also uses partial windows until full.
    """
    if window < 2:
        raise UsageError("rolling std needs window >= 2")
    dates, values, label = _series_arrays(series)
    if len(values) < 2:
        raise UsageError(f"series {label}: need at least 2 observations for a rolling std")
    means = np.empty(len(values))
    stds = np.empty(len(values) - 1)
    for t in range(len(values)):
        chunk = values[max(0, t - window + 1): t + 1]
        means[t] = chunk.mean()
        if t >= 1:
            stds[t - 1] = chunk.std(ddof=1)
    mean_series = HypeSeries(label, "smoothed", dates, means)
    std_series = HypeSeries(label, "smoothed", dates[1:], stds)
    return mean_series, std_series


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    ssx = float(xc @ xc)
    ssy = float(yc @ yc)
    if ssx == 0.0 or ssy == 0.0:
        raise NumericalError("correlation undefined for a constant input")
    return float(xc @ yc / math.sqrt(ssx * ssy))


def pearson_corr(a: HypeSeries | ExternalSeries, b: HypeSeries | ExternalSeries) -> float:
    """Sample Pearson correlation over the common-date intersection."""
    dates_a, values_a, label_a = _series_arrays(a)
    dates_b, values_b, label_b = _series_arrays(b)
    common = sorted(set(dates_a) & set(dates_b))
    if len(common) < 3:
        raise AlignmentError(
            f"series {label_a} and {label_b} share {len(common)} dates; need >= 3"
        )
    index_a = {d: i for i, d in enumerate(dates_a)}
    index_b = {d: i for i, d in enumerate(dates_b)}
    xa = values_a[[index_a[d] for d in common]]
    xb = values_b[[index_b[d] for d in common]]
    return _pearson(xa, xb)


def linear_fit(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> RegressionFit:
    """OLS with two-sided t-distribution p-values (n-2 degrees of freedom)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise UsageError("linear fit needs two equal-length 1-D samples")
    n = len(x)
    if n < 3:
        raise UsageError("linear fit needs n >= 3")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise NumericalError("singular design: x sample is constant")
    sxy = float(xc @ yc)
    syy = float(yc @ yc)
    slope = sxy / sxx
    intercept = float(y.mean() - slope * x.mean())
    sse = max(syy - slope * sxy, 0.0)
    r_squared = 1.0 if syy == 0.0 else 1.0 - sse / syy
    df = n - 2
    sigma2 = sse / df
    se_slope = math.sqrt(sigma2 / sxx)
    se_intercept = math.sqrt(sigma2 * (1.0 / n + x.mean() ** 2 / sxx))
    p_slope = _coef_p_value(slope, se_slope, df)
    p_intercept = _coef_p_value(intercept, se_intercept, df)
    return RegressionFit(slope, intercept, r_squared, p_slope, p_intercept, n)


def _coef_p_value(coef: float, se: float, df: int) -> float:
    if se == 0.0:
        return 1.0 if coef == 0.0 else 0.0
    return t_sf_two_sided(coef / se, df)


def power_fit(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> PowerFit:
    """Fit y = c * x^k by OLS in log-log space; exact transform of linear_fit."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if (x <= 0).any() or (y <= 0).any():
        raise NumericalError("power fit needs strictly positive x and y samples")
    fit = linear_fit(np.log(x), np.log(y))
    return PowerFit(math.exp(fit.intercept), fit.slope, fit.r_squared, fit.n)


def _validated_sample(sample: Sequence[float] | np.ndarray, min_n: int, test: str) -> np.ndarray:
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise UsageError(f"{test} needs a 1-D sample")
    if len(x) < min_n:
        raise UsageError(f"{test} needs n >= {min_n}, got {len(x)}")
    if np.ptp(x) == 0.0:
        raise NumericalError(f"{test} is undefined for a zero-variance sample")
    return x


def shapiro_wilk(sample: Sequence[float] | np.ndarray) -> TestResult:
    """Shapiro-Wilk W with Royston's approximation (AS R94, n >= 12 branch)."""
    x = np.sort(_validated_sample(sample, 12, "Shapiro-Wilk"))
    n = len(x)
    m = np.array([inv_norm_cdf((i - 0.375) / (n + 0.25)) for i in range(1, n + 1)])
    mm = float(m @ m)
    c_last = m[-1] / math.sqrt(mm)
    c_second = m[-2] / math.sqrt(mm)
    u = 1.0 / math.sqrt(n)
    a_last = (c_last + 0.221157 * u - 0.147981 * u ** 2 - 2.071190 * u ** 3
              + 4.434685 * u ** 4 - 2.706056 * u ** 5)
    a_second = (c_second + 0.042981 * u - 0.293762 * u ** 2 - 1.752461 * u ** 3
                + 5.682633 * u ** 4 - 3.582633 * u ** 5)
    phi = (mm - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
        1.0 - 2.0 * a_last ** 2 - 2.0 * a_second ** 2
    )
    a = m / math.sqrt(phi)
    a[-1], a[-2] = a_last, a_second
    a[0], a[1] = -a_last, -a_second
    # W is the squared sample correlation of the weights with the order
    # statistics; centering both sides keeps a large data mean from coupling
    # to rounding asymmetry in the scores
    ac = a - a.mean()
    xc = x - x.mean()
    w = float(ac @ xc) ** 2 / (float(xc @ xc) * float(ac @ ac))
    w = min(w, 1.0)
    ln_n = math.log(n)
    mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n ** 2 + 0.0038915 * ln_n ** 3
    sigma = math.exp(-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n ** 2)
    if w == 1.0:
        return TestResult(w, 1.0)
    z = (math.log1p(-w) - mu) / sigma
    return TestResult(w, norm_sf(z))


def _central_moments(x: np.ndarray) -> tuple[float, float, float]:
    d = x - x.mean()
    return float(np.mean(d ** 2)), float(np.mean(d ** 3)), float(np.mean(d ** 4))


def _skew_z(x: np.ndarray) -> float:
    """D'Agostino's skewness normal deviate (1970 transformation)."""
    n = len(x)
    m2, m3, _ = _central_moments(x)
    b1 = m3 / m2 ** 1.5
    y = b1 * math.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = (3.0 * (n ** 2 + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
             / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0)))
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    y /= alpha
    return delta * math.log(y + math.sqrt(y * y + 1.0))


def _kurtosis_z(x: np.ndarray) -> float:
    """Anscombe-Glynn kurtosis normal deviate."""
    n = len(x)
    m2, _, m4 = _central_moments(x)
    b2 = m4 / m2 ** 2
    mean_b2 = 3.0 * (n - 1.0) / (n + 1.0)
    var_b2 = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) ** 2 * (n + 3.0) * (n + 5.0))
    std_x = (b2 - mean_b2) / math.sqrt(var_b2)
    root_beta1 = (6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
                  * math.sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0))))
    a = 6.0 + 8.0 / root_beta1 * (2.0 / root_beta1 + math.sqrt(1.0 + 4.0 / root_beta1 ** 2))
    term1 = 1.0 - 2.0 / (9.0 * a)
    denom = 1.0 + std_x * math.sqrt(2.0 / (a - 4.0))
    term2 = math.copysign(abs((1.0 - 2.0 / a) / denom) ** (1.0 / 3.0), denom)
    return (term1 - term2) / math.sqrt(2.0 / (9.0 * a))


def dagostino_k2(sample: Sequence[float] | np.ndarray) -> TestResult:
    """D'Agostino-Pearson omnibus K^2 against chi-square with 2 df."""
    x = _validated_sample(sample, 20, "D'Agostino-Pearson")
    k2 = _skew_z(x) ** 2 + _kurtosis_z(x) ** 2
    return TestResult(k2, chi2_sf_2df(k2))


def jarque_bera(sample: Sequence[float] | np.ndarray) -> TestResult:
    """Jarque-Bera n/6 * (S^2 + (K-3)^2/4) with biased moment estimators."""
    x = _validated_sample(sample, 4, "Jarque-Bera")
    n = len(x)
    m2, m3, m4 = _central_moments(x)
    skew = m3 / m2 ** 1.5
    kurt = m4 / m2 ** 2
    jb = n / 6.0 * (skew ** 2 + (kurt - 3.0) ** 2 / 4.0)
    return TestResult(jb, chi2_sf_2df(jb))


def anderson_darling(sample: Sequence[float] | np.ndarray) -> AndersonDarlingResult:
    """Anderson-Darling A^2 with mean and variance estimated from the sample.

    No p-value: the statistic is reported against its significance-level
    critical values, which include the 1 percent level.
    """
    x = np.sort(_validated_sample(sample, 8, "Anderson-Darling"))
    n = len(x)
    y = (x - x.mean()) / x.std(ddof=1)
    log_cdf = np.array([log_norm_cdf(v) for v in y])
    log_sf = np.array([log_norm_cdf(-v) for v in y])
    i = np.arange(1, n + 1)
    a2 = -n - float(np.sum((2 * i - 1.0) * (log_cdf + log_sf[::-1]))) / n
    scale = 1.0 + 4.0 / n - 25.0 / (n * n)
    critical = tuple(round(v / scale, 3) for v in _AD_ASYMPTOTIC)
    return AndersonDarlingResult(a2, _AD_SIGNIFICANCE, critical)


def kolmogorov_smirnov(sample: Sequence[float] | np.ndarray) -> TestResult:
    """One-sample KS against a normal with sample-estimated mean and std.

    Uses the asymptotic Kolmogorov p-value with no small-sample (Lilliefors)
    correction for estimated parameters, so p is anti-conservative.
    """
    x = np.sort(_validated_sample(sample, 2, "Kolmogorov-Smirnov"))
    n = len(x)
    mu = x.mean()
    sd = x.std(ddof=1)
    cdf = np.array([norm_cdf((v - mu) / sd) for v in x])
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - cdf)), float(np.max(cdf - (i - 1.0) / n)))
    return TestResult(d, kolmogorov_sf(math.sqrt(n) * d))


def normality_suite(sample: Sequence[float] | np.ndarray) -> NormalityReport:
    """Run the five-test normality battery on one sample (n >= 20)."""
    x = _validated_sample(sample, 20, "normality suite")
    return NormalityReport(
        n=len(x),
        shapiro_wilk=shapiro_wilk(x),
        dagostino_k2=dagostino_k2(x),
        jarque_bera=jarque_bera(x),
        anderson_darling=anderson_darling(x),
        kolmogorov_smirnov=kolmogorov_smirnov(x),
    )


def log_return_rolling_std(
    prices: HypeSeries | ExternalSeries, window: int = 5
) -> HypeSeries:
    """Trailing sample std of daily log returns over full windows only."""
    dates, values, label = _series_arrays(prices)
    if window < 2:
        raise UsageError("log-return rolling std needs window >= 2")
    if (values <= 0).any():
        day = dates[int(np.argmax(values <= 0))]
        raise NumericalError(f"series {label}: nonpositive price on {day}")
    if len(values) < window + 1:
        raise UsageError(
            f"series {label}: need at least window+1={window + 1} prices, got {len(values)}"
        )
    returns = np.log(values[1:] / values[:-1])
    out = np.array([
        returns[j - window + 1: j + 1].std(ddof=1)
        for j in range(window - 1, len(returns))
    ])
    return HypeSeries(label, "smoothed", dates[window:], out)
