"""Core data containers: tickers, calendars, panels, sector maps, external series.

All containers are immutable after construction and safe to share across
threads; numpy arrays are marked read-only.
"""
from __future__ import annotations

import datetime as dt
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import AlignmentError, DataValidationError

GICS_SECTORS = (
    "Communication",
    "Consumer Discretionary",
    "Consumer Staples",
    "Energy",
    "Financials",
    "Health Care",
    "Industrials",
    "Information Technology",
    "Materials",
    "Real Estate",
    "Utilities",
)


@dataclass(frozen=True, order=True)
class Ticker:
    """Exchange-qualified instrument identifier, rendered ``symbol.suffix``."""

    symbol: str
    exchange_suffix: str

    def __post_init__(self) -> None:
        if not self.symbol or not self.exchange_suffix:
            raise DataValidationError(
                f"ticker needs nonempty symbol and suffix, got "
                f"{self.symbol!r}.{self.exchange_suffix!r}"
            )

    @classmethod
    def parse(cls, text: str) -> "Ticker":
        """Parse ``symbol.suffix``; the suffix is everything after the last dot."""
        symbol, sep, suffix = text.rpartition(".")
        if not sep or not symbol or not suffix:
            raise DataValidationError(f"malformed ticker {text!r}, expected symbol.suffix")
        return cls(symbol, suffix)

    def __str__(self) -> str:
        return f"{self.symbol}.{self.exchange_suffix}"


def as_ticker(value: "Ticker | str") -> Ticker:
    return value if isinstance(value, Ticker) else Ticker.parse(value)


@dataclass(frozen=True)
class HeadlineRecord:
    """One news mention event: a story tagged to one ticker on one date."""

    date: dt.date
    ticker: Ticker
    story_id: str | None = None


@dataclass(frozen=True)
class TradingCalendar:
    """Strictly increasing, nonempty sequence of trading dates."""

    dates: tuple[dt.date, ...]

    def __post_init__(self) -> None:
        if not self.dates:
            raise DataValidationError("trading calendar must be nonempty")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise DataValidationError(
                    f"calendar dates must be strictly increasing: {prev} then {cur}"
                )

    def __len__(self) -> int:
        return len(self.dates)

    def __iter__(self) -> Iterator[dt.date]:
        return iter(self.dates)

    def __contains__(self, day: dt.date) -> bool:
        i = bisect_left(self.dates, day)
        return i < len(self.dates) and self.dates[i] == day

    @property
    def start(self) -> dt.date:
        return self.dates[0]

    @property
    def end(self) -> dt.date:
        return self.dates[-1]

    def index(self, day: dt.date) -> int:
        i = bisect_left(self.dates, day)
        if i == len(self.dates) or self.dates[i] != day:
            raise AlignmentError(f"{day.isoformat()} is not a trading date of this calendar")
        return i

    def roll_forward(self, day: dt.date) -> dt.date | None:
        """Next trading date >= day, or None when day falls after the calendar."""
        i = bisect_left(self.dates, day)
        return self.dates[i] if i < len(self.dates) else None

    def restrict(self, start: dt.date | None = None, end: dt.date | None = None) -> "TradingCalendar":
        kept = tuple(
            d for d in self.dates
            if (start is None or d >= start) and (end is None or d <= end)
        )
        if not kept:
            raise DataValidationError("no trading dates remain in the requested range")
        return TradingCalendar(kept)


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.flags.writeable = False
    return array


def _check_panel_shape(calendar: TradingCalendar, tickers: Sequence[Ticker], cells: np.ndarray, what: str) -> None:
    if cells.shape != (len(calendar), len(tickers)):
        raise DataValidationError(
            f"{what} panel must be rectangular {len(calendar)}x{len(tickers)}, got {cells.shape}"
        )
    if len(set(tickers)) != len(tickers):
        raise DataValidationError(f"{what} panel has duplicate tickers")


@dataclass(frozen=True, eq=False)
class CountPanel:
    """Daily news mention counts, one row per trading date, one column per ticker."""

    calendar: TradingCalendar
    tickers: tuple[Ticker, ...]
    counts: np.ndarray
    _column_index: Mapping[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        _check_panel_shape(self.calendar, self.tickers, counts, "count")
        if (counts < 0).any():
            raise DataValidationError("news counts must be nonnegative")
        object.__setattr__(self, "counts", _freeze(counts))
        object.__setattr__(
            self, "_column_index", {str(t): j for j, t in enumerate(self.tickers)}
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CountPanel):
            return NotImplemented
        return (self.calendar == other.calendar and self.tickers == other.tickers
                and np.array_equal(self.counts, other.counts))

    def column(self, ticker: Ticker | str) -> np.ndarray:
        key = str(ticker)
        if key not in self._column_index:
            raise AlignmentError(f"ticker {key} not present in panel")
        return self.counts[:, self._column_index[key]]

    def total_by_date(self) -> np.ndarray:
        return self.counts.sum(axis=1)


@dataclass(frozen=True, eq=False)
class ValuePanel:
    """Daily market capitalizations (USD), strictly positive, rectangular."""

    calendar: TradingCalendar
    tickers: tuple[Ticker, ...]
    values: np.ndarray
    _column_index: Mapping[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        _check_panel_shape(self.calendar, self.tickers, values, "value")
        if not np.isfinite(values).all() or (values <= 0).any():
            raise DataValidationError("market caps must be finite and strictly positive")
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(
            self, "_column_index", {str(t): j for j, t in enumerate(self.tickers)}
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValuePanel):
            return NotImplemented
        return (self.calendar == other.calendar and self.tickers == other.tickers
                and np.array_equal(self.values, other.values))

    def column(self, ticker: Ticker | str) -> np.ndarray:
        key = str(ticker)
        if key not in self._column_index:
            raise AlignmentError(f"ticker {key} not present in panel")
        return self.values[:, self._column_index[key]]

    def restrict(
        self,
        tickers: Sequence[Ticker | str] | None = None,
        start: dt.date | None = None,
        end: dt.date | None = None,
    ) -> "ValuePanel":
        """Sub-panel over the given tickers and date range (order preserved)."""
        calendar = self.calendar.restrict(start, end)
        rows = [self.calendar.index(d) for d in calendar]
        if tickers is None:
            kept = list(self.tickers)
        else:
            kept = [as_ticker(t) for t in tickers]
        missing = [str(t) for t in kept if str(t) not in self._column_index]
        if missing:
            raise AlignmentError(
                f"tickers missing from market-cap panel: {', '.join(missing)}"
            )
        cols = [self._column_index[str(t)] for t in kept]
        return ValuePanel(calendar, tuple(kept), self.values[np.ix_(rows, cols)])


@dataclass(frozen=True)
class SectorMap:
    """Ticker-to-sector assignment over the closed GICS sector vocabulary."""

    assignments: Mapping[str, str]

    def __post_init__(self) -> None:
        if not self.assignments:
            raise DataValidationError("sector map must be nonempty")
        unknown = sorted({s for s in self.assignments.values() if s not in GICS_SECTORS})
        if unknown:
            raise DataValidationError(
                f"unknown sector name(s) {', '.join(unknown)}; "
                f"allowed: {', '.join(GICS_SECTORS)}"
            )
        object.__setattr__(self, "assignments", dict(self.assignments))

    def sector_of(self, ticker: Ticker | str) -> str:
        key = str(ticker)
        try:
            return self.assignments[key]
        except KeyError:
            raise DataValidationError(f"ticker {key} has no sector assignment") from None

    def __contains__(self, ticker: Ticker | str) -> bool:
        return str(ticker) in self.assignments

    @property
    def tickers(self) -> tuple[str, ...]:
        return tuple(self.assignments)

    @property
    def sectors(self) -> tuple[str, ...]:
        """Sectors present in the map, in GICS vocabulary order."""
        present = set(self.assignments.values())
        return tuple(s for s in GICS_SECTORS if s in present)

    def members(self, sector: str) -> tuple[str, ...]:
        return tuple(t for t, s in self.assignments.items() if s == sector)

    def counts(self) -> dict[str, int]:
        """Number of mapped tickers per sector, in GICS vocabulary order."""
        out: dict[str, int] = {}
        for sector in self.sectors:
            out[sector] = len(self.members(sector))
        return out


@dataclass(frozen=True, eq=False)
class ExternalSeries:
    """A named external daily series (VIX, GPR, sentiment, prices...)."""

    name: str
    dates: tuple[dt.date, ...]
    values: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExternalSeries):
            return NotImplemented
        return (self.name == other.name and self.dates == other.dates
                and np.array_equal(self.values, other.values))

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if not self.name:
            raise DataValidationError("external series needs a name")
        if len(self.dates) != len(values):
            raise DataValidationError("external series dates and values differ in length")
        if not self.dates:
            raise DataValidationError("external series must be nonempty")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise DataValidationError(
                    f"external series {self.name}: dates must be strictly increasing "
                    f"({prev} then {cur})"
                )
        if not np.isfinite(values).all():
            raise DataValidationError(f"external series {self.name} has non-finite values")
        object.__setattr__(self, "values", _freeze(values))

    def __len__(self) -> int:
        return len(self.dates)
