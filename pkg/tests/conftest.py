"""Shared fixtures and small builders for the test suite."""
from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from hypeindex import CountPanel, HypeSeries, Ticker, TradingCalendar


def make_dates(n: int, start: dt.date = dt.date(2024, 1, 2)) -> tuple[dt.date, ...]:
    """n consecutive weekdays starting at or after start."""
    days = []
    day = start
    while len(days) < n:
        if day.weekday() < 5:
            days.append(day)
        day += dt.timedelta(days=1)
    return tuple(days)


def make_series(values, kind: str = "cap_adjusted", entity: str = "X",
                start: dt.date = dt.date(2024, 1, 2)) -> HypeSeries:
    values = np.asarray(values, dtype=float)
    return HypeSeries(entity, kind, make_dates(len(values), start), values)


def make_count_panel(counts, start: dt.date = dt.date(2024, 1, 2)) -> CountPanel:
    counts = np.asarray(counts, dtype=np.int64)
    calendar = TradingCalendar(make_dates(counts.shape[0], start))
    tickers = tuple(Ticker(f"T{j:02d}", "N") for j in range(counts.shape[1]))
    return CountPanel(calendar, tickers, counts)


@pytest.fixture
def calendar10() -> TradingCalendar:
    return TradingCalendar(make_dates(10))
