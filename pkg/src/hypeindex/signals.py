"""Attention-based market signals: neutrality, momentum, event flags, and
alignment with external series.
"""
from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass

import numpy as np

from .data import ExternalSeries, _freeze
from .errors import AlignmentError, UsageError
from .indices import HypeSeries, trailing_mean
from .stats import _pearson, _series_arrays

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NeutralityState:
    """Empirical hype neutrality: sample-mean baseline plus deviations."""

    entity: str
    baseline: float
    dates: tuple[dt.date, ...]
    deviations: np.ndarray

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.deviations):
            raise UsageError("dates and deviations must share one length")
        object.__setattr__(self, "deviations", _freeze(np.asarray(self.deviations, dtype=np.float64)))


@dataclass(frozen=True)
class MomentumSeries:
    """Rolling slope of the deviation-from-neutrality series, per trading day."""

    entity: str
    window: int
    dates: tuple[dt.date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.values):
            raise UsageError("dates and values must share one length")
        object.__setattr__(self, "values", _freeze(np.asarray(self.values, dtype=np.float64)))


@dataclass(frozen=True)
class EventFlag:
    date: dt.date
    entity: str
    z_score: float
    direction: str

    def __post_init__(self) -> None:
        if self.direction not in ("peak", "trough"):
            raise UsageError(f"direction must be 'peak' or 'trough', got {self.direction!r}")


@dataclass(frozen=True)
class ComparisonTable:
    """Smoothed levels and changes of a hype series and an external series on
    their common dates, plus the correlation of the smoothed change columns."""

    hype_entity: str
    external_name: str
    dates: tuple[dt.date, ...]
    hype_level: np.ndarray
    hype_change: np.ndarray
    external_level: np.ndarray
    external_change: np.ndarray
    change_correlation: float

    def rows(self) -> list[tuple[dt.date, float, float, float, float]]:
        return [
            (d, float(hl), float(hc), float(el), float(ec))
            for d, hl, hc, el, ec in zip(
                self.dates, self.hype_level, self.hype_change,
                self.external_level, self.external_change,
            )
        ]


def hype_neutrality(series: HypeSeries) -> NeutralityState:
    """Baseline = sample mean of the series; deviations are value - baseline."""
    if len(series) == 0:
        raise UsageError("neutrality of an empty series is undefined")
    baseline = float(series.values.mean())
    return NeutralityState(series.entity, baseline, series.dates, series.values - baseline)


def hype_momentum(neutrality: NeutralityState, window: int = 7) -> MomentumSeries:
    """Trailing OLS slope of the deviation series against the day index.

    Values exist only where a full window is available.
    """
    if window < 2:
        raise UsageError("momentum window must be >= 2")
    d = neutrality.deviations
    if len(d) < window:
        raise UsageError(
            f"series {neutrality.entity}: need at least window={window} observations"
        )
    t = np.arange(window, dtype=np.float64)
    tc = t - t.mean()
    denom = float(tc @ tc)
    slopes = np.array([
        float(tc @ d[j - window + 1: j + 1]) / denom
        for j in range(window - 1, len(d))
    ])
    return MomentumSeries(neutrality.entity, window, neutrality.dates[window - 1:], slopes)


def detect_events(
    series: HypeSeries,
    z_threshold: float = 2.5,
    baseline_window: int = 21,
) -> list[EventFlag]:
    """Flag dates whose value sits z_threshold trailing stds from the trailing mean.

    The trailing window covers the last baseline_window observations
    including the current one; dates with zero trailing std are skipped
    with a diagnostic.
    """
    if z_threshold <= 0:
        raise UsageError("z threshold must be positive")
    if baseline_window < 2:
        raise UsageError("baseline window must be >= 2")
    if len(series) <= baseline_window:
        raise UsageError(
            f"series {series.entity}: need more than baseline_window={baseline_window} observations"
        )
    flags = []
    skipped = 0
    values = series.values
    for t in range(baseline_window - 1, len(values)):
        window = values[t - baseline_window + 1: t + 1]
        std = window.std(ddof=1)
        if std == 0.0:
            skipped += 1
            continue
        z = (values[t] - window.mean()) / std
        if abs(z) >= z_threshold:
            flags.append(EventFlag(
                series.dates[t], series.entity, float(z),
                "peak" if z > 0 else "trough",
            ))
    if skipped:
        logger.debug(
            "detect_events(%s): skipped %d date(s) with zero trailing std",
            series.entity, skipped,
        )
    return flags


def compare_external(
    hype: HypeSeries | ExternalSeries,
    external: ExternalSeries | HypeSeries,
    window: int = 7,
) -> ComparisonTable:
    """Align two series on common dates, smooth levels and day-over-day
    changes with the trailing rolling mean, and correlate the smoothed
    change columns.
    """
    if window < 1:
        raise UsageError("smoothing window must be >= 1")
    dates_h, values_h, label_h = _series_arrays(hype)
    dates_e, values_e, label_e = _series_arrays(external)
    common = sorted(set(dates_h) & set(dates_e))
    if not common:
        raise AlignmentError(f"series {label_h} and {label_e} share no dates")
    if len(common) < max(window, 4):
        raise AlignmentError(
            f"series {label_h} and {label_e} share {len(common)} dates; "
            f"need >= {max(window, 4)}"
        )
    index_h = {d: i for i, d in enumerate(dates_h)}
    index_e = {d: i for i, d in enumerate(dates_e)}
    h = values_h[[index_h[d] for d in common]]
    e = values_e[[index_e[d] for d in common]]
    h_level = trailing_mean(h, window)
    e_level = trailing_mean(e, window)
    h_change = trailing_mean(np.diff(h), window)
    e_change = trailing_mean(np.diff(e), window)
    correlation = _pearson(h_change, e_change)
    return ComparisonTable(
        hype_entity=label_h,
        external_name=label_e,
        dates=tuple(common[1:]),
        hype_level=h_level[1:],
        hype_change=h_change,
        external_level=e_level[1:],
        external_change=e_change,
        change_correlation=correlation,
    )
