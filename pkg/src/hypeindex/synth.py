"""Deterministic synthetic fixture generation: headline rows, market-cap
random walks, and a sector map, reproducible byte-for-byte from a seed.
"""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import GICS_SECTORS, Ticker, TradingCalendar
from .errors import UsageError


@dataclass(frozen=True)
class Shock:
    """Multiply one ticker's news intensity on one date."""

    date: dt.date
    ticker: str
    multiplier: float


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    n_tickers: int
    n_days: int
    n_sectors: int = 3
    base_intensity: float | tuple[float, ...] = 40.0
    cap_start: float = 5e9
    cap_daily_vol: float = 0.01
    start: dt.date = dt.date(2024, 1, 2)
    shocks: tuple[Shock, ...] = ()

    def intensities(self) -> tuple[float, ...]:
        if isinstance(self.base_intensity, (int, float)):
            lam = (float(self.base_intensity),) * self.n_tickers
        else:
            lam = tuple(float(v) for v in self.base_intensity)
        if len(lam) != self.n_tickers:
            raise UsageError(
                f"base_intensity needs {self.n_tickers} entries, got {len(lam)}"
            )
        if any(v <= 0 for v in lam):
            raise UsageError("base intensities must be positive")
        return lam

    def validate(self) -> None:
        if self.n_tickers < 1 or self.n_days < 1:
            raise UsageError("need at least one ticker and one day")
        if not 1 <= self.n_sectors <= len(GICS_SECTORS):
            raise UsageError(f"n_sectors must be in 1..{len(GICS_SECTORS)}")
        if self.cap_start <= 0 or self.cap_daily_vol < 0:
            raise UsageError("cap_start must be positive and cap_daily_vol nonnegative")
        self.intensities()


@dataclass(frozen=True)
class SyntheticDataset:
    headlines: Path
    market_caps: Path
    sectors: Path
    calendar: TradingCalendar
    tickers: tuple[Ticker, ...]


def business_days(start: dt.date, count: int) -> TradingCalendar:
    """The next `count` weekdays starting at or after `start`."""
    if count < 1:
        raise UsageError("need at least one day")
    days = []
    day = start
    while len(days) < count:
        if day.weekday() < 5:
            days.append(day)
        day += dt.timedelta(days=1)
    return TradingCalendar(tuple(days))


def _ticker_names(n: int) -> tuple[Ticker, ...]:
    width = max(2, len(str(n - 1)))
    return tuple(Ticker(f"T{i:0{width}d}", "N") for i in range(n))


def generate_synthetic(spec: SynthSpec, out_dir: str | Path) -> SyntheticDataset:
    """Write headlines.csv, market_caps.csv, and sectors.csv under out_dir.

    Counts are Poisson draws around each ticker's intensity (times any
    scheduled shock multiplier), rendered as one headline row per mention;
    caps follow per-ticker geometric random walks. Identical specs yield
    byte-identical files.
    """
    spec.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    calendar = business_days(spec.start, spec.n_days)
    tickers = _ticker_names(spec.n_tickers)
    intensities = spec.intensities()
    shock_lookup = {(s.date, s.ticker): s.multiplier for s in spec.shocks}
    rng = np.random.default_rng(spec.seed)

    # caps first, then counts: the draw order is part of the determinism contract
    caps = np.empty((spec.n_days, spec.n_tickers))
    for j in range(spec.n_tickers):
        steps = rng.normal(0.0, spec.cap_daily_vol, spec.n_days)
        caps[:, j] = spec.cap_start * (1.0 + j) * np.exp(np.cumsum(steps))

    counts = np.empty((spec.n_days, spec.n_tickers), dtype=np.int64)
    for i, day in enumerate(calendar):
        for j, ticker in enumerate(tickers):
            lam = intensities[j] * shock_lookup.get((day, str(ticker)), 1.0)
            counts[i, j] = rng.poisson(lam)

    headlines_path = out_dir / "headlines.csv"
    with open(headlines_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "ticker", "story_id"])
        story = 0
        for i, day in enumerate(calendar):
            for j, ticker in enumerate(tickers):
                for _ in range(int(counts[i, j])):
                    story += 1
                    writer.writerow([day.isoformat(), str(ticker), f"s{story:08d}"])

    caps_path = out_dir / "market_caps.csv"
    with open(caps_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "ticker", "market_cap"])
        for i, day in enumerate(calendar):
            for j, ticker in enumerate(tickers):
                writer.writerow([day.isoformat(), str(ticker), f"{caps[i, j]:.2f}"])

    sectors_path = out_dir / "sectors.csv"
    with open(sectors_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["ticker", "sector"])
        for j, ticker in enumerate(tickers):
            writer.writerow([str(ticker), GICS_SECTORS[j % spec.n_sectors]])

    return SyntheticDataset(headlines_path, caps_path, sectors_path, calendar, tickers)
