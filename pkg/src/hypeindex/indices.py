"""Hype index family: news-share indices, cap weights, cap-adjusted indices,
normalization, and smoothing.

All operations are pure functions of immutable inputs.
"""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping

import numpy as np

from .data import CountPanel, SectorMap, TradingCalendar, ValuePanel, _freeze
from .errors import AlignmentError, DataValidationError, NumericalError, UsageError

SERIES_KINDS = ("raw", "normalized", "cap_adjusted", "pct_change", "smoothed")

_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class HypeSeries:
    """A dated value series for one entity (ticker or sector) with a kind tag.

    Kind invariants: raw values lie in [0, 1]; normalized and cap_adjusted
    values are nonnegative.
    """

    entity: str
    kind: str
    dates: tuple[dt.date, ...]
    values: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HypeSeries):
            return NotImplemented
        return (self.entity == other.entity and self.kind == other.kind
                and self.dates == other.dates
                and np.array_equal(self.values, other.values))

    def __post_init__(self) -> None:
        if self.kind not in SERIES_KINDS:
            raise UsageError(f"unknown series kind {self.kind!r}; expected one of {SERIES_KINDS}")
        if not self.entity:
            raise DataValidationError("series entity must be nonempty")
        values = np.asarray(self.values, dtype=np.float64)
        if len(self.dates) != len(values):
            raise DataValidationError(
                f"series {self.entity}: {len(self.dates)} dates vs {len(values)} values"
            )
        if not self.dates:
            raise DataValidationError(f"series {self.entity} must be nonempty")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise DataValidationError(
                    f"series {self.entity}: dates must be strictly increasing ({prev} then {cur})"
                )
        if not np.isfinite(values).all():
            raise DataValidationError(f"series {self.entity} has non-finite values")
        if self.kind == "raw" and ((values < -_EPS).any() or (values > 1 + _EPS).any()):
            raise DataValidationError(f"raw series {self.entity} has values outside [0, 1]")
        if self.kind in ("normalized", "cap_adjusted") and (values < -_EPS).any():
            raise DataValidationError(f"{self.kind} series {self.entity} has negative values")
        object.__setattr__(self, "values", _freeze(values))

    def __len__(self) -> int:
        return len(self.dates)

    def as_dict(self) -> dict[dt.date, float]:
        return dict(zip(self.dates, self.values.tolist()))

    def replace(self, *, kind: str | None = None, values: np.ndarray | None = None,
                dates: tuple[dt.date, ...] | None = None) -> "HypeSeries":
        return HypeSeries(
            self.entity,
            self.kind if kind is None else kind,
            self.dates if dates is None else dates,
            self.values if values is None else values,
        )


@dataclass(frozen=True, eq=False)
class WeightPanel:
    """Per-date entity weights; every date's weights sum to 1 within 1e-12."""

    calendar: TradingCalendar
    entities: tuple[str, ...]
    weights: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightPanel):
            return NotImplemented
        return (self.calendar == other.calendar and self.entities == other.entities
                and np.array_equal(self.weights, other.weights))

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (len(self.calendar), len(self.entities)):
            raise DataValidationError(
                f"weight panel must be {len(self.calendar)}x{len(self.entities)}, got {weights.shape}"
            )
        if (weights < -_EPS).any() or (weights > 1 + _EPS).any():
            raise DataValidationError("weights must lie in [0, 1]")
        sums = weights.sum(axis=1)
        bad = np.abs(sums - 1.0) > _EPS
        if bad.any():
            day = self.calendar.dates[int(np.argmax(bad))]
            raise DataValidationError(f"weights on {day} sum to {sums[bad][0]!r}, not 1")
        object.__setattr__(self, "weights", _freeze(weights))

    def column(self, entity: str) -> np.ndarray:
        try:
            j = self.entities.index(entity)
        except ValueError:
            raise AlignmentError(f"entity {entity} not present in weight panel") from None
        return self.weights[:, j]

    def series(self, entity: str) -> "HypeSeries":
        # weights are shares, so the raw-kind bounds apply
        return HypeSeries(entity, "raw", self.calendar.dates, self.column(entity))


def trailing_mean(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing rolling mean; the first window-1 slots use the partial prefix."""
    if window < 1:
        raise UsageError("window must be >= 1")
    values = np.asarray(values, dtype=np.float64)
    return np.array([
        values[max(0, t - window + 1): t + 1].mean() for t in range(len(values))
    ])


def hype_index(counts: CountPanel) -> dict[str, HypeSeries]:
    """Per-ticker share of total daily mentions; each date's shares sum to 1."""
    totals = counts.total_by_date()
    if (totals == 0).any():
        day = counts.calendar.dates[int(np.argmax(totals == 0))]
        raise NumericalError(
            f"no news for any universe ticker on {day}; hype index undefined that date"
        )
    shares = counts.counts / totals[:, None]
    return {
        str(ticker): HypeSeries(str(ticker), "raw", counts.calendar.dates, shares[:, j])
        for j, ticker in enumerate(counts.tickers)
    }


def _aligned_matrix(series_set: Mapping[str, HypeSeries]) -> tuple[tuple[dt.date, ...], np.ndarray]:
    if not series_set:
        raise UsageError("need at least one series")
    items = list(series_set.values())
    dates = items[0].dates
    for s in items[1:]:
        if s.dates != dates:
            raise AlignmentError(
                f"series {s.entity} dates do not match series {items[0].entity}"
            )
    return dates, np.column_stack([s.values for s in items])


def sector_hype_index(
    ticker_series: Mapping[str, HypeSeries], sectors: SectorMap
) -> dict[str, HypeSeries]:
    """Sum member-ticker hype shares per sector; sector shares again sum to 1."""
    for entity in ticker_series:
        if entity not in sectors:
            raise DataValidationError(f"ticker {entity} has no sector assignment")
    dates, _ = _aligned_matrix(ticker_series)
    out: dict[str, HypeSeries] = {}
    for sector in sectors.sectors:
        members = [t for t in ticker_series if sectors.sector_of(t) == sector]
        if not members:
            continue
        total = np.sum([ticker_series[t].values for t in members], axis=0)
        out[sector] = HypeSeries(sector, "raw", dates, total)
    return out


def market_cap_weight(
    caps: ValuePanel, level: str = "ticker", sectors: SectorMap | None = None
) -> WeightPanel:
    """Market-cap weights per date, at ticker level or aggregated to sectors."""
    if level not in ("ticker", "sector"):
        raise UsageError(f"level must be 'ticker' or 'sector', got {level!r}")
    totals = caps.values.sum(axis=1)
    weights = caps.values / totals[:, None]
    if level == "ticker":
        return WeightPanel(caps.calendar, tuple(str(t) for t in caps.tickers), weights)
    if sectors is None:
        raise UsageError("sector-level weights require a sector map")
    names = []
    columns = []
    for sector in sectors.sectors:
        member_cols = [j for j, t in enumerate(caps.tickers) if str(t) in sectors and sectors.sector_of(t) == sector]
        if not member_cols:
            continue
        names.append(sector)
        columns.append(weights[:, member_cols].sum(axis=1))
    unmapped = [str(t) for t in caps.tickers if str(t) not in sectors]
    if unmapped:
        raise DataValidationError(
            f"tickers without sector assignment: {', '.join(unmapped)}"
        )
    return WeightPanel(caps.calendar, tuple(names), np.column_stack(columns))


def cap_hype_index(hype: HypeSeries, weights: WeightPanel) -> HypeSeries:
    """Attention share divided by market-cap weight; 1 means proportional."""
    if hype.kind != "raw":
        raise UsageError(f"cap adjustment expects a raw series, got kind {hype.kind!r}")
    w = weights.column(hype.entity)
    try:
        rows = [weights.calendar.index(d) for d in hype.dates]
    except AlignmentError:
        missing = next(d for d in hype.dates if d not in weights.calendar)
        raise AlignmentError(
            f"series {hype.entity}: date {missing} missing from weight panel"
        ) from None
    w = w[rows]
    if (w <= 0).any():
        day = hype.dates[int(np.argmax(w <= 0))]
        raise NumericalError(f"zero market-cap weight for {hype.entity} on {day}")
    return HypeSeries(hype.entity, "cap_adjusted", hype.dates, hype.values / w)


def normalize(series_set: Mapping[str, HypeSeries], mode: str = "daily") -> dict[str, HypeSeries]:
    """Rescale a set of aligned series so an average equals 1.

    daily    divide each date's values by that date's cross-entity mean
    overall  divide everything by the grand mean over all entities and dates
    """
    if mode not in ("daily", "overall"):
        raise UsageError(f"normalize mode must be 'daily' or 'overall', got {mode!r}")
    dates, matrix = _aligned_matrix(series_set)
    if mode == "daily":
        means = matrix.mean(axis=1)
        if (means <= 0).any():
            day = dates[int(np.argmax(means <= 0))]
            raise NumericalError(f"cross-entity mean is not positive on {day}")
        scaled = matrix / means[:, None]
    else:
        grand = matrix.mean()
        if grand <= 0:
            raise NumericalError("grand mean of the panel is not positive")
        scaled = matrix / grand
    return {
        entity: HypeSeries(entity, "normalized", dates, scaled[:, j])
        for j, entity in enumerate(series_set)
    }


def smooth(series: HypeSeries, window: int = 7) -> HypeSeries:
    """Trailing rolling mean; the first window-1 dates use the partial prefix."""
    if window < 1:
        raise UsageError("smoothing window must be >= 1")
    return series.replace(kind="smoothed", values=trailing_mean(series.values, window))


def write_series_csv(
    series_list: Iterable[HypeSeries], path: str | Path | IO[str]
) -> None:
    """Write series as ``entity,kind,date,value`` rows, 12 significant digits."""
    if isinstance(path, (str, Path)):
        fh = open(path, "w", encoding="utf-8", newline="")
        owned = True
    else:
        fh, owned = path, False
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["entity", "kind", "date", "value"])
        for series in series_list:
            for day, value in zip(series.dates, series.values):
                writer.writerow([series.entity, series.kind, day.isoformat(), format(value, ".12g")])
    finally:
        if owned:
            fh.close()


def read_series_csv(source: str | Path | IO[str]) -> list[HypeSeries]:
    """Read an ``entity,kind,date,value`` export back into series objects."""
    if isinstance(source, (str, Path)):
        fh = open(source, "r", encoding="utf-8", newline="")
        owned = True
    else:
        fh, owned = source, False
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataValidationError("series CSV is empty") from None
        if [c.strip() for c in header] != ["entity", "kind", "date", "value"]:
            raise DataValidationError(
                f"series CSV header must be entity,kind,date,value, got {','.join(header)}"
            )
        grouped: dict[tuple[str, str], tuple[list[dt.date], list[float]]] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise DataValidationError(f"series CSV line {line_no}: expected 4 fields")
            entity, kind, date_text, value_text = row
            try:
                day = dt.date.fromisoformat(date_text.strip())
                value = float(value_text)
            except ValueError:
                raise DataValidationError(f"series CSV line {line_no}: malformed row") from None
            dates, values = grouped.setdefault((entity, kind), ([], []))
            dates.append(day)
            values.append(value)
        return [
            HypeSeries(entity, kind, tuple(dates), np.array(values))
            for (entity, kind), (dates, values) in grouped.items()
        ]
    finally:
        if owned:
            fh.close()
