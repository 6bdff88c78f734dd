"""Readers and writers for the file interchange formats, plus count aggregation.

Formats:
    headlines   CSV ``date,ticker,story_id`` (story_id optional) or JSONL with
                the same field names
    market caps CSV ``date,ticker,market_cap``
    sector map  CSV ``ticker,sector``
    external    CSV ``date,value``
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .data import (
    CountPanel,
    ExternalSeries,
    HeadlineRecord,
    SectorMap,
    Ticker,
    TradingCalendar,
    ValuePanel,
    as_ticker,
)
from .errors import DataValidationError, SchemaError, UsageError

_MAX_LISTED_GAPS = 5


@dataclass(frozen=True)
class AggregationDiagnostics:
    """Bookkeeping for aggregate_counts; conserves the input record count."""

    total_records: int
    counted: int
    skipped_outside_universe: int
    dropped_after_calendar: int
    rolled_forward: int

    def as_dict(self) -> dict[str, int]:
        return {
            "total_records": self.total_records,
            "counted": self.counted,
            "skipped_outside_universe": self.skipped_outside_universe,
            "dropped_after_calendar": self.dropped_after_calendar,
            "rolled_forward": self.rolled_forward,
        }


def _open_text(source: str | Path | IO[bytes] | IO[str]) -> tuple[IO[str], bool]:
    """Return a text stream for source and whether the caller must close it."""
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream: decode as UTF-8
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def _parse_date(text: str, where: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise DataValidationError(f"{where}: malformed date {text!r}") from None


def _header_indices(header: Sequence[str], required: Sequence[str], what: str) -> dict[str, int]:
    cols = [c.strip() for c in header]
    missing = [c for c in required if c not in cols]
    if missing:
        raise SchemaError(
            f"{what}: missing column(s) {', '.join(missing)}; header was {','.join(cols)}"
        )
    return {c: cols.index(c) for c in cols}


def parse_headlines(
    source: str | Path | IO[bytes] | IO[str], format: str = "csv"
) -> list[HeadlineRecord]:
    """Parse headline mention records from CSV or JSONL, preserving row order."""
    if format not in ("csv", "jsonl"):
        raise UsageError(f"unsupported headlines format {format!r}; use csv or jsonl")
    stream, owned = _open_text(source)
    try:
        if format == "csv":
            return _parse_headlines_csv(stream)
        return _parse_headlines_jsonl(stream)
    except UnicodeDecodeError as exc:
        raise DataValidationError(f"headlines source is not valid UTF-8: {exc}") from None
    finally:
        if owned:
            stream.close()


def _parse_headlines_csv(stream: IO[str]) -> list[HeadlineRecord]:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("headlines CSV is empty; expected header date,ticker[,story_id]")
    idx = _header_indices(header, ("date", "ticker"), "headlines CSV")
    records = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        where = f"line {line_no}"
        if len(row) < len(header):
            raise DataValidationError(f"headlines CSV {where}: expected {len(header)} fields")
        day = _parse_date(row[idx["date"]], f"headlines CSV {where}")
        ticker = Ticker.parse(row[idx["ticker"]].strip())
        story = None
        if "story_id" in idx:
            raw = row[idx["story_id"]].strip()
            story = raw or None
        records.append(HeadlineRecord(day, ticker, story))
    return records


def _parse_headlines_jsonl(stream: IO[str]) -> list[HeadlineRecord]:
    records = []
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        where = f"line {line_no}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataValidationError(f"headlines JSONL {where}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise DataValidationError(f"headlines JSONL {where}: expected an object")
        if "ticker" not in obj:
            raise SchemaError(f"headlines JSONL {where}: missing 'ticker' field")
        if "date" not in obj:
            raise SchemaError(f"headlines JSONL {where}: missing 'date' field")
        day = _parse_date(str(obj["date"]), f"headlines JSONL {where}")
        ticker = Ticker.parse(str(obj["ticker"]))
        story = obj.get("story_id")
        records.append(HeadlineRecord(day, ticker, str(story) if story else None))
    return records


def write_headlines_csv(records: Iterable[HeadlineRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "ticker", "story_id"])
        for rec in records:
            writer.writerow([rec.date.isoformat(), str(rec.ticker), rec.story_id or ""])


def aggregate_counts(
    records: Iterable[HeadlineRecord],
    calendar: TradingCalendar,
    universe: Sequence[Ticker | str],
) -> tuple[CountPanel, AggregationDiagnostics]:
    """Build the daily mention-count panel over the universe.

    A story tagged to k tickers arrives as k records and contributes one
    mention to each. Records dated off-calendar roll forward to the next
    trading date; records after the last trading date are dropped and
    records outside the universe are skipped, both tallied in the
    diagnostics rather than raised.
    """
    tickers = tuple(as_ticker(t) for t in universe)
    if not tickers:
        raise UsageError("universe must be nonempty")
    if len(set(tickers)) != len(tickers):
        raise UsageError("universe contains duplicate tickers")
    column = {str(t): j for j, t in enumerate(tickers)}
    counts = np.zeros((len(calendar), len(tickers)), dtype=np.int64)
    total = skipped = dropped = rolled = 0
    for rec in records:
        total += 1
        j = column.get(str(rec.ticker))
        if j is None:
            skipped += 1
            continue
        day = calendar.roll_forward(rec.date)
        if day is None:
            dropped += 1
            continue
        if day != rec.date:
            rolled += 1
        counts[calendar.index(day), j] += 1
    panel = CountPanel(calendar, tickers, counts)
    diag = AggregationDiagnostics(
        total_records=total,
        counted=int(counts.sum()),
        skipped_outside_universe=skipped,
        dropped_after_calendar=dropped,
        rolled_forward=rolled,
    )
    return panel, diag


def parse_value_panel(source: str | Path | IO[bytes] | IO[str], format: str = "csv") -> ValuePanel:
    """Parse a rectangular market-cap panel from ``date,ticker,market_cap`` CSV."""
    if format != "csv":
        raise UsageError(f"unsupported market-cap format {format!r}; use csv")
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("market-cap CSV is empty; expected header date,ticker,market_cap")
        idx = _header_indices(header, ("date", "ticker", "market_cap"), "market-cap CSV")
        cells: dict[tuple[dt.date, str], float] = {}
        tickers: list[Ticker] = []
        seen: set[str] = set()
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            where = f"market-cap CSV line {line_no}"
            day = _parse_date(row[idx["date"]], where)
            ticker = Ticker.parse(row[idx["ticker"]].strip())
            try:
                cap = float(row[idx["market_cap"]])
            except ValueError:
                raise DataValidationError(
                    f"{where}: malformed market_cap {row[idx['market_cap']]!r}"
                ) from None
            if not np.isfinite(cap) or cap <= 0:
                raise DataValidationError(f"{where}: market_cap must be > 0, got {cap}")
            key = (day, str(ticker))
            if key in cells:
                raise DataValidationError(f"{where}: duplicate cell for {day} {ticker}")
            cells[key] = cap
            if str(ticker) not in seen:
                seen.add(str(ticker))
                tickers.append(ticker)
        if not cells:
            raise DataValidationError("market-cap CSV has no data rows")
        calendar = TradingCalendar(tuple(sorted({d for d, _ in cells})))
        gaps = [
            (d, t)
            for d in calendar
            for t in (str(tk) for tk in tickers)
            if (d, t) not in cells
        ]
        if gaps:
            listed = ", ".join(f"({d.isoformat()},{t})" for d, t in gaps[:_MAX_LISTED_GAPS])
            more = "" if len(gaps) <= _MAX_LISTED_GAPS else f" and {len(gaps) - _MAX_LISTED_GAPS} more"
            raise DataValidationError(f"market-cap panel has {len(gaps)} gap(s): {listed}{more}")
        values = np.array(
            [[cells[(d, str(t))] for t in tickers] for d in calendar], dtype=np.float64
        )
        return ValuePanel(calendar, tuple(tickers), values)
    finally:
        if owned:
            stream.close()


def write_value_panel_csv(panel: ValuePanel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "ticker", "market_cap"])
        for i, day in enumerate(panel.calendar):
            for j, ticker in enumerate(panel.tickers):
                writer.writerow([day.isoformat(), str(ticker), format(panel.values[i, j], ".12g")])


def parse_sector_map(source: str | Path | IO[bytes] | IO[str]) -> SectorMap:
    """Parse a ``ticker,sector`` CSV into a SectorMap; duplicates are rejected."""
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("sector CSV is empty; expected header ticker,sector")
        idx = _header_indices(header, ("ticker", "sector"), "sector CSV")
        assignments: dict[str, str] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            ticker = Ticker.parse(row[idx["ticker"]].strip())
            sector = row[idx["sector"]].strip()
            key = str(ticker)
            if key in assignments:
                raise DataValidationError(f"sector CSV line {line_no}: duplicate ticker {key}")
            assignments[key] = sector
        return SectorMap(assignments)
    finally:
        if owned:
            stream.close()


def write_sector_map_csv(sectors: SectorMap, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["ticker", "sector"])
        for ticker in sectors.tickers:
            writer.writerow([ticker, sectors.sector_of(ticker)])


def parse_external_series(source: str | Path | IO[bytes] | IO[str], name: str) -> ExternalSeries:
    """Parse a ``date,value`` CSV; dates must already be strictly increasing."""
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"external CSV {name!r} is empty; expected header date,value")
        idx = _header_indices(header, ("date", "value"), f"external CSV {name!r}")
        dates: list[dt.date] = []
        values: list[float] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            where = f"external CSV {name!r} line {line_no}"
            day = _parse_date(row[idx["date"]], where)
            try:
                value = float(row[idx["value"]])
            except ValueError:
                raise DataValidationError(
                    f"{where}: malformed value {row[idx['value']]!r}"
                ) from None
            if dates and day <= dates[-1]:
                raise DataValidationError(
                    f"{where}: dates must be strictly increasing ({dates[-1]} then {day})"
                )
            dates.append(day)
            values.append(value)
        return ExternalSeries(name, tuple(dates), np.array(values, dtype=np.float64))
    finally:
        if owned:
            stream.close()


def write_external_series_csv(series: ExternalSeries, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "value"])
        for day, value in zip(series.dates, series.values):
            writer.writerow([day.isoformat(), format(value, ".12g")])


def read_universe(source: str | Path | IO[bytes] | IO[str]) -> tuple[Ticker, ...]:
    """Read a plain-text universe file: one ticker per line, ``#`` comments."""
    stream, owned = _open_text(source)
    try:
        tickers = []
        for line in stream:
            text = line.split("#", 1)[0].strip()
            if text:
                tickers.append(Ticker.parse(text))
        if len(set(tickers)) != len(tickers):
            raise DataValidationError("universe file contains duplicate tickers")
        return tuple(tickers)
    finally:
        if owned:
            stream.close()
