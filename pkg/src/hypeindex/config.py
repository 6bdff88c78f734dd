"""Run configuration: TOML loading plus flag-style overrides.

The file format is a flat ``[run]`` table with ``[[external]]`` arrays:

    [run]
    headlines = ["headlines.csv"]
    market_caps = "market_caps.csv"
    sectors = "sectors.csv"
    start = 2024-01-02
    end = 2024-03-26
    normalize = "daily"
    window = 7
    method = "kmeans1d"
    z_threshold = 2.5
    baseline_window = 21
    out = "out"
    format = "csv"

    [[external]]
    name = "VIX"
    path = "vix.csv"

Relative paths resolve against the config file's directory.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import DataValidationError, UsageError

_RUN_KEYS = {
    "headlines", "market_caps", "sectors", "universe", "start", "end",
    "normalize", "window", "method", "cutpoints", "z_threshold",
    "baseline_window", "out", "format",
}


@dataclass(frozen=True)
class ExternalSource:
    name: str
    path: Path


@dataclass(frozen=True)
class RunConfig:
    headlines: tuple[Path, ...] = ()
    market_caps: Path | None = None
    sectors: Path | None = None
    universe: Path | None = None
    externals: tuple[ExternalSource, ...] = ()
    start: dt.date | None = None
    end: dt.date | None = None
    normalize_mode: str = "daily"
    window: int = 7
    method: str = "kmeans1d"
    cutpoints: tuple[float, ...] | None = None
    z_threshold: float = 2.5
    baseline_window: int = 21
    out_dir: Path = field(default_factory=lambda: Path("out"))
    output_format: str = "csv"

    def validate(self) -> None:
        if not self.headlines:
            raise UsageError("config needs at least one headlines path")
        if self.market_caps is None:
            raise UsageError("config needs a market_caps path")
        if self.sectors is None:
            raise UsageError("config needs a sectors path")
        if self.start is not None and self.end is not None and self.end < self.start:
            raise UsageError(f"end {self.end} is before start {self.start}")
        if self.normalize_mode not in ("daily", "overall"):
            raise UsageError(f"normalize must be 'daily' or 'overall', got {self.normalize_mode!r}")
        if self.method not in ("thresholds", "kmeans1d"):
            raise UsageError(f"method must be 'thresholds' or 'kmeans1d', got {self.method!r}")
        if self.method == "thresholds" and not self.cutpoints:
            raise UsageError("thresholds method needs cutpoints")
        if self.window < 1:
            raise UsageError("window must be >= 1")
        if self.z_threshold <= 0:
            raise UsageError("z_threshold must be positive")
        if self.baseline_window < 2:
            raise UsageError("baseline_window must be >= 2")
        if self.output_format not in ("csv", "json"):
            raise UsageError(f"format must be 'csv' or 'json', got {self.output_format!r}")


def _as_date(value: Any, key: str) -> dt.date:
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError:
        raise UsageError(f"config key {key}: malformed date {value!r}") from None


def _as_paths(value: Any, base: Path) -> tuple[Path, ...]:
    if isinstance(value, (str, Path)):
        value = [value]
    if not isinstance(value, Sequence):
        raise UsageError(f"expected a path or list of paths, got {value!r}")
    return tuple((base / str(v)).resolve() if not Path(str(v)).is_absolute() else Path(str(v))
                 for v in value)


def load_config(path: str | Path) -> RunConfig:
    """Parse a TOML run configuration."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise DataValidationError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config file {path}: invalid TOML ({exc})") from None
    base = path.resolve().parent
    run = raw.get("run", {})
    unknown = set(run) - _RUN_KEYS
    if unknown:
        raise UsageError(f"unknown [run] key(s): {', '.join(sorted(unknown))}")
    externals = []
    for entry in raw.get("external", []):
        if "name" not in entry or "path" not in entry:
            raise UsageError("each [[external]] entry needs name and path")
        externals.append(ExternalSource(str(entry["name"]), _as_paths(entry["path"], base)[0]))
    cutpoints = run.get("cutpoints")
    return RunConfig(
        headlines=_as_paths(run["headlines"], base) if "headlines" in run else (),
        market_caps=_as_paths(run["market_caps"], base)[0] if "market_caps" in run else None,
        sectors=_as_paths(run["sectors"], base)[0] if "sectors" in run else None,
        universe=_as_paths(run["universe"], base)[0] if "universe" in run else None,
        externals=tuple(externals),
        start=_as_date(run["start"], "start") if "start" in run else None,
        end=_as_date(run["end"], "end") if "end" in run else None,
        normalize_mode=str(run.get("normalize", "daily")),
        window=int(run.get("window", 7)),
        method=str(run.get("method", "kmeans1d")),
        cutpoints=tuple(float(c) for c in cutpoints) if cutpoints else None,
        z_threshold=float(run.get("z_threshold", 2.5)),
        baseline_window=int(run.get("baseline_window", 21)),
        out_dir=_as_paths(run["out"], base)[0] if "out" in run else Path("out"),
        output_format=str(run.get("format", "csv")),
    )


def apply_overrides(config: RunConfig, **overrides: Any) -> RunConfig:
    """Return a copy of config with the non-None overrides applied."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **updates)
