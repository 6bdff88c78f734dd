"""One-shot batch orchestration: parse inputs, compute index families,
classify, run the stats battery, emit signals, and write the report bundle.

All outputs are deterministic functions of the inputs and the config: no
wall-clock values, no unseeded randomness, numeric output at 12 significant
digits.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from . import clusters, indices, signals, stats
from .config import RunConfig
from .data import SectorMap, Ticker, ValuePanel
from .errors import DataValidationError, HypeIndexError, UsageError
from .ingest import (
    AggregationDiagnostics,
    aggregate_counts,
    parse_external_series,
    parse_headlines,
    parse_sector_map,
    parse_value_panel,
    read_universe,
    write_external_series_csv,
    write_headlines_csv,
    write_sector_map_csv,
    write_value_panel_csv,
)

ALL_PARTS = ("ingest", "compute", "classify", "stats", "signals")


@dataclass
class ReportBundle:
    out_dir: Path
    files: list[Path]
    diagnostics: AggregationDiagnostics


def _round_floats(obj: Any) -> Any:
    """Round every float in a JSON payload to 12 significant digits."""
    if isinstance(obj, float):
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _write_json(path: Path, payload: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_round_floats(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_rows(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _guarded(parser: Callable[..., Any], path: Path, *args: Any) -> Any:
    try:
        return parser(path, *args)
    except FileNotFoundError:
        raise DataValidationError(f"input file not found: {path}") from None


class PipelineState:
    """Parsed inputs and computed index families shared by the output parts."""

    def __init__(self, config: RunConfig):
        config.validate()
        self.config = config
        self.sectors: SectorMap = _guarded(parse_sector_map, config.sectors)
        if config.universe is not None:
            self.universe = _guarded(read_universe, config.universe)
        else:
            self.universe = tuple(Ticker.parse(t) for t in self.sectors.tickers)
        caps_full: ValuePanel = _guarded(parse_value_panel, config.market_caps)
        self.caps = caps_full.restrict(self.universe, config.start, config.end)
        self.calendar = self.caps.calendar
        self.records = []
        for path in config.headlines:
            fmt = "jsonl" if str(path).endswith(".jsonl") else "csv"
            self.records.extend(_guarded(parse_headlines, path, fmt))
        self.counts, self.diagnostics = aggregate_counts(
            self.records, self.calendar, self.universe
        )
        self.externals = [
            _guarded(parse_external_series, src.path, src.name)
            for src in config.externals
        ]

        self.ticker_raw = indices.hype_index(self.counts)
        self.sector_raw = indices.sector_hype_index(self.ticker_raw, self.sectors)
        ticker_weights = indices.market_cap_weight(self.caps, "ticker")
        sector_weights = indices.market_cap_weight(self.caps, "sector", self.sectors)
        self.series: dict[str, dict[str, dict[str, indices.HypeSeries]]] = {}
        for level, raw, weights in (
            ("ticker", self.ticker_raw, ticker_weights),
            ("sector", self.sector_raw, sector_weights),
        ):
            cap_adjusted = {
                entity: indices.cap_hype_index(series, weights)
                for entity, series in raw.items()
            }
            self.series[level] = {
                "raw": raw,
                "normalized": indices.normalize(raw, config.normalize_mode),
                "cap_adjusted": cap_adjusted,
                "smoothed": {
                    entity: indices.smooth(series, config.window)
                    for entity, series in cap_adjusted.items()
                },
            }

    def market_cap_adjusted(self) -> indices.HypeSeries:
        """Unweighted mean of the sector cap-adjusted series, as one series."""
        sector_cap = self.series["sector"]["cap_adjusted"]
        matrix = np.column_stack([s.values for s in sector_cap.values()])
        return indices.HypeSeries(
            "market", "cap_adjusted", self.calendar.dates, matrix.mean(axis=1)
        )


def run_pipeline(config: RunConfig, parts: tuple[str, ...] = ALL_PARTS) -> ReportBundle:
    """Execute the requested parts and write their outputs under out_dir."""
    for part in parts:
        if part not in ALL_PARTS:
            raise UsageError(f"unknown pipeline part {part!r}; expected one of {ALL_PARTS}")
    state = PipelineState(config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []
    if "ingest" in parts:
        files.extend(_emit_ingest(state, out_dir))
    if "compute" in parts:
        files.extend(_emit_series(state, out_dir))
    if "classify" in parts:
        files.extend(_emit_classification(state, out_dir))
    if "stats" in parts:
        files.extend(_emit_stats(state, out_dir))
    if "signals" in parts:
        files.extend(_emit_signals(state, out_dir))
    manifest = out_dir / "manifest.json"
    _write_json(manifest, {"files": sorted(f.name for f in files)})
    files.append(manifest)
    return ReportBundle(out_dir, files, state.diagnostics)


def _emit_ingest(state: PipelineState, out_dir: Path) -> list[Path]:
    """Canonicalized copies of the validated inputs plus ingest diagnostics."""
    files = []
    path = out_dir / "headlines.csv"
    write_headlines_csv(state.records, path)
    files.append(path)
    path = out_dir / "market_caps.csv"
    write_value_panel_csv(state.caps, path)
    files.append(path)
    path = out_dir / "sectors.csv"
    write_sector_map_csv(state.sectors, path)
    files.append(path)
    for series in state.externals:
        path = out_dir / f"external_{series.name}.csv"
        write_external_series_csv(series, path)
        files.append(path)
    path = out_dir / "ingest_diagnostics.json"
    _write_json(path, {
        "aggregation": state.diagnostics.as_dict(),
        "universe_size": len(state.universe),
        "trading_days": len(state.calendar),
        "sector_counts": state.sectors.counts(),
    })
    files.append(path)
    return files


def _series_rows(series_map: Mapping[str, indices.HypeSeries]) -> list[dict[str, Any]]:
    return [
        {"entity": s.entity, "kind": s.kind, "date": d.isoformat(), "value": float(v)}
        for s in series_map.values()
        for d, v in zip(s.dates, s.values)
    ]


def _emit_series(state: PipelineState, out_dir: Path) -> list[Path]:
    files = []
    as_json = state.config.output_format == "json"
    for level, kinds in state.series.items():
        for kind, series_map in kinds.items():
            if as_json:
                path = out_dir / f"{level}_{kind}.json"
                _write_json(path, _series_rows(series_map))
            else:
                path = out_dir / f"{level}_{kind}.csv"
                indices.write_series_csv(series_map.values(), path)
            files.append(path)
    return files


def _emit_classification(state: PipelineState, out_dir: Path) -> list[Path]:
    files = []
    config = state.config
    for level in state.series:
        averages = {
            entity: clusters.period_average(series)
            for entity, series in state.series[level]["cap_adjusted"].items()
        }
        assignment = clusters.classify(
            averages, k=3, method=config.method, cutpoints=config.cutpoints
        )
        if config.output_format == "json":
            path = out_dir / f"classification_{level}.json"
            _write_json(path, {
                "method": assignment.method,
                "groups": [
                    {
                        "label": g.label,
                        "members": list(g.members),
                        "group_mean": g.group_mean,
                    }
                    for g in assignment.groups
                ],
            })
        else:
            path = out_dir / f"classification_{level}.csv"
            rows = [
                [entity, group.label, format(averages[entity], ".12g")]
                for group in assignment.groups
                for entity in group.members
            ]
            _write_rows(path, ["entity", "group_label", "period_average"], rows)
        files.append(path)
    return files


def _normality_block(series: indices.HypeSeries) -> dict[str, Any]:
    out: dict[str, Any] = {}
    try:
        out["level"] = stats.normality_suite(series.values).as_dict()
    except HypeIndexError as exc:
        out["level"] = {"error": str(exc)}
    try:
        changes = stats.pct_change(series)
        out["pct_change"] = stats.normality_suite(changes.values).as_dict()
    except HypeIndexError as exc:
        out["pct_change"] = {"error": str(exc)}
    return out


def _emit_stats(state: PipelineState, out_dir: Path) -> list[Path]:
    payload: dict[str, Any] = {"correlation_raw_vs_cap_adjusted": {}, "normality": {}}
    for level in state.series:
        raw = state.series[level]["raw"]
        cap = state.series[level]["cap_adjusted"]
        correlations = {}
        for entity in raw:
            try:
                correlations[entity] = stats.pearson_corr(raw[entity], cap[entity])
            except HypeIndexError as exc:
                correlations[entity] = {"error": str(exc)}
        payload["correlation_raw_vs_cap_adjusted"][level] = correlations
        payload["normality"][level] = {
            entity: _normality_block(series) for entity, series in cap.items()
        }

    # pooled ticker-day news weight vs market weight, plus the sector-average
    # scaling fits
    ticker_weights = indices.market_cap_weight(state.caps, "ticker")
    x_days = []
    y_days = []
    for entity, series in state.series["ticker"]["raw"].items():
        x_days.extend(ticker_weights.column(entity).tolist())
        y_days.extend(series.values.tolist())
    regressions: dict[str, Any] = {}
    try:
        regressions["linear_ticker_days"] = stats.linear_fit(x_days, y_days).as_dict()
    except HypeIndexError as exc:
        regressions["linear_ticker_days"] = {"error": str(exc)}
    sector_weights = indices.market_cap_weight(state.caps, "sector", state.sectors)
    x_sector = []
    y_sector = []
    for entity, series in state.series["sector"]["raw"].items():
        x_sector.append(float(sector_weights.column(entity).mean()))
        y_sector.append(float(series.values.mean()))
    try:
        regressions["linear_sector_averages"] = stats.linear_fit(x_sector, y_sector).as_dict()
    except HypeIndexError as exc:
        regressions["linear_sector_averages"] = {"error": str(exc)}
    try:
        regressions["power_sector_averages"] = stats.power_fit(x_sector, y_sector).as_dict()
    except HypeIndexError as exc:
        regressions["power_sector_averages"] = {"error": str(exc)}
    payload["news_weight_vs_market_weight"] = regressions

    path = out_dir / "stats.json"
    _write_json(path, payload)
    return [path]


def _emit_signals(state: PipelineState, out_dir: Path) -> list[Path]:
    files = []
    config = state.config
    as_json = config.output_format == "json"
    summary: dict[str, Any] = {"events": {}, "external_change_correlations": {}}
    for level in state.series:
        flags: list[signals.EventFlag] = []
        cap = state.series[level]["cap_adjusted"]
        if len(state.calendar) > config.baseline_window:
            for series in cap.values():
                flags.extend(signals.detect_events(
                    series, config.z_threshold, config.baseline_window
                ))
            summary["events"][level] = len(flags)
        else:
            summary["events"][level] = (
                f"skipped: {len(state.calendar)} dates <= baseline window "
                f"{config.baseline_window}"
            )
        flags.sort(key=lambda f: (f.date, f.entity))
        if as_json:
            path = out_dir / f"events_{level}.json"
            _write_json(path, [
                {
                    "date": f.date.isoformat(),
                    "entity": f.entity,
                    "z_score": f.z_score,
                    "direction": f.direction,
                }
                for f in flags
            ])
        else:
            path = out_dir / f"events_{level}.csv"
            rows = [
                [f.date.isoformat(), f.entity, format(f.z_score, ".12g"), f.direction]
                for f in flags
            ]
            _write_rows(path, ["date", "entity", "z_score", "direction"], rows)
        files.append(path)

    market = state.market_cap_adjusted()
    for external in state.externals:
        table = signals.compare_external(market, external, config.window)
        summary["external_change_correlations"][external.name] = table.change_correlation
        if as_json:
            path = out_dir / f"comparison_{external.name}.json"
            _write_json(path, [
                {
                    "date": d.isoformat(),
                    "hype_smoothed": hl,
                    "hype_change_smoothed": hc,
                    "external_smoothed": el,
                    "external_change_smoothed": ec,
                }
                for d, hl, hc, el, ec in table.rows()
            ])
        else:
            path = out_dir / f"comparison_{external.name}.csv"
            rows = [
                [
                    d.isoformat(),
                    format(hl, ".12g"),
                    format(hc, ".12g"),
                    format(el, ".12g"),
                    format(ec, ".12g"),
                ]
                for d, hl, hc, el, ec in table.rows()
            ]
            _write_rows(path, [
                "date", "hype_smoothed", "hype_change_smoothed",
                "external_smoothed", "external_change_smoothed",
            ], rows)
        files.append(path)

    path = out_dir / "signals_summary.json"
    _write_json(path, summary)
    files.append(path)
    return files
