"""CLI, pipeline bundle, synthetic generation, and config handling."""
from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from hypeindex import (
    RunConfig,
    SynthSpec,
    UsageError,
    generate_synthetic,
    load_config,
    parse_headlines,
    parse_sector_map,
    parse_value_panel,
    read_series_csv,
    run_pipeline,
)
from hypeindex.cli import main
from hypeindex.config import apply_overrides
from hypeindex.synth import Shock, business_days

FIXTURE_INTENSITY = (120.0,) * 9 + (8.0,)
SHOCK_DATE = dt.date(2024, 2, 27)


def fixture_spec(seed: int = 22, shocks: tuple = ()) -> SynthSpec:
    return SynthSpec(
        seed=seed, n_tickers=10, n_days=60, n_sectors=3,
        base_intensity=FIXTURE_INTENSITY, shocks=shocks,
    )


def write_vix(path: Path, n: int = 60) -> None:
    calendar = business_days(dt.date(2024, 1, 2), n)
    rng = np.random.default_rng(99)
    vix = np.abs(14.0 + np.cumsum(rng.normal(0.0, 0.6, n))) + 5.0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "value"])
        for day, value in zip(calendar.dates, vix):
            writer.writerow([day.isoformat(), f"{value:.4f}"])


def make_config(tmp_path: Path, **kwargs) -> RunConfig:
    data = generate_synthetic(fixture_spec(), tmp_path / "fixture")
    config = RunConfig(
        headlines=(data.headlines,),
        market_caps=data.market_caps,
        sectors=data.sectors,
        out_dir=tmp_path / "out",
    )
    return apply_overrides(config, **kwargs)


class TestSynth:
    def test_same_seed_byte_identical(self, tmp_path):
        first = generate_synthetic(fixture_spec(), tmp_path / "a")
        second = generate_synthetic(fixture_spec(), tmp_path / "b")
        for left, right in (
            (first.headlines, second.headlines),
            (first.market_caps, second.market_caps),
            (first.sectors, second.sectors),
        ):
            assert left.read_bytes() == right.read_bytes()

    def test_different_seed_differs(self, tmp_path):
        first = generate_synthetic(fixture_spec(seed=1), tmp_path / "a")
        second = generate_synthetic(fixture_spec(seed=2), tmp_path / "b")
        assert first.headlines.read_bytes() != second.headlines.read_bytes()

    def test_outputs_reparse(self, tmp_path):
        data = generate_synthetic(fixture_spec(), tmp_path / "fx")
        records = parse_headlines(data.headlines)
        caps = parse_value_panel(data.market_caps)
        sectors = parse_sector_map(data.sectors)
        assert len(caps.calendar) == 60
        assert len(caps.tickers) == 10
        assert len(sectors.tickers) == 10
        assert records, "expected headline rows"

    def test_single_ticker_universe_all_shares_one(self, tmp_path):
        from hypeindex import aggregate_counts, hype_index
        spec = SynthSpec(seed=5, n_tickers=1, n_days=30, n_sectors=1, base_intensity=50.0)
        data = generate_synthetic(spec, tmp_path / "solo")
        records = parse_headlines(data.headlines)
        caps = parse_value_panel(data.market_caps)
        counts, _ = aggregate_counts(records, caps.calendar, data.tickers)
        series = hype_index(counts)
        only = series[str(data.tickers[0])]
        assert np.abs(only.values - 1.0).max() == 0.0

    def test_invalid_specs(self, tmp_path):
        with pytest.raises(UsageError):
            generate_synthetic(SynthSpec(seed=1, n_tickers=0, n_days=5), tmp_path)
        with pytest.raises(UsageError):
            generate_synthetic(SynthSpec(seed=1, n_tickers=2, n_days=0), tmp_path)
        with pytest.raises(UsageError):
            generate_synthetic(
                SynthSpec(seed=1, n_tickers=2, n_days=5, base_intensity=(1.0,)), tmp_path
            )

    def test_shock_multiplies_intensity(self, tmp_path):
        shocked = fixture_spec(shocks=(Shock(SHOCK_DATE, "T09.N", 10.0),))
        data = generate_synthetic(shocked, tmp_path / "shk")
        records = parse_headlines(data.headlines)
        from hypeindex import aggregate_counts
        counts, _ = aggregate_counts(records, data.calendar, data.tickers)
        column = counts.column("T09.N")
        row = data.calendar.index(SHOCK_DATE)
        others = np.delete(column, row)
        assert column[row] > 4 * others.mean()


class TestPipeline:
    def test_report_bundle_and_invariants(self, tmp_path):
        config = make_config(tmp_path)
        bundle = run_pipeline(config)
        names = {p.name for p in bundle.files}
        assert {"ticker_raw.csv", "sector_raw.csv", "stats.json",
                "classification_sector.csv", "events_ticker.csv",
                "manifest.json"} <= names
        raw = {s.entity: s for s in read_series_csv(config.out_dir / "ticker_raw.csv")}
        matrix = np.column_stack([s.values for s in raw.values()])
        assert np.abs(matrix.sum(axis=1) - 1.0).max() <= 1e-11  # 12-digit rendering

    def test_outputs_reparse_under_ingest_readers(self, tmp_path):
        config = make_config(tmp_path)
        run_pipeline(config)
        out = config.out_dir
        assert parse_headlines(out / "headlines.csv")
        assert parse_value_panel(out / "market_caps.csv").tickers
        assert parse_sector_map(out / "sectors.csv").tickers
        for name in ("ticker_raw", "ticker_normalized", "ticker_cap_adjusted",
                     "ticker_smoothed", "sector_raw", "sector_normalized",
                     "sector_cap_adjusted", "sector_smoothed"):
            assert read_series_csv(out / f"{name}.csv")
        manifest = json.loads((out / "manifest.json").read_text())
        listed = set(manifest["files"])
        written = {p.name for p in out.iterdir()} - {"manifest.json"}
        assert listed == written

    def test_json_format_variant(self, tmp_path):
        config = make_config(tmp_path, output_format="json")
        run_pipeline(config)
        out = config.out_dir
        rows = json.loads((out / "ticker_raw.json").read_text())
        assert {"entity", "kind", "date", "value"} == set(rows[0])
        classification = json.loads((out / "classification_sector.json").read_text())
        assert {"label", "members", "group_mean"} == set(classification["groups"][0])
        events = json.loads((out / "events_ticker.json").read_text())
        assert isinstance(events, list)

    def test_classify_part_with_thresholds(self, tmp_path):
        config = make_config(
            tmp_path, method="thresholds", cutpoints=(1.05, 0.95),
        )
        run_pipeline(config, ("classify",))
        rows = (config.out_dir / "classification_sector.csv").read_text().splitlines()
        assert rows[0] == "entity,group_label,period_average"
        assert len(rows) == 4

    def test_external_comparison_emitted(self, tmp_path):
        vix_path = tmp_path / "vix.csv"
        write_vix(vix_path)
        from hypeindex.config import ExternalSource
        config = make_config(tmp_path, externals=(ExternalSource("VIX", vix_path),))
        run_pipeline(config, ("signals",))
        lines = (config.out_dir / "comparison_VIX.csv").read_text().splitlines()
        assert lines[0] == ("date,hype_smoothed,hype_change_smoothed,"
                            "external_smoothed,external_change_smoothed")
        assert len(lines) == 60  # header + 59 dated rows
        summary = json.loads((config.out_dir / "signals_summary.json").read_text())
        assert "VIX" in summary["external_change_correlations"]

    def test_start_end_restrict_calendar(self, tmp_path):
        config = make_config(tmp_path, start=dt.date(2024, 1, 15), end=dt.date(2024, 2, 15))
        run_pipeline(config, ("ingest",))
        caps = parse_value_panel(config.out_dir / "market_caps.csv")
        assert caps.calendar.start >= dt.date(2024, 1, 15)
        assert caps.calendar.end <= dt.date(2024, 2, 15)

    def test_universe_file_excludes_instruments_by_omission(self, tmp_path):
        # headlines for tickers outside the universe are skipped with
        # diagnostics; shares still sum to one over the kept tickers
        universe = tmp_path / "universe.txt"
        universe.write_text("".join(f"T{j:02d}.N\n" for j in range(9)))  # drop T09
        config = make_config(tmp_path, universe=universe)
        bundle = run_pipeline(config, ("compute",))
        assert bundle.diagnostics.skipped_outside_universe > 0
        raw = read_series_csv(config.out_dir / "ticker_raw.csv")
        assert {s.entity for s in raw} == {f"T{j:02d}.N" for j in range(9)}
        matrix = np.column_stack([s.values for s in raw])
        assert np.abs(matrix.sum(axis=1) - 1.0).max() <= 1e-11


class TestConfigFile:
    def _write(self, tmp_path: Path, body: str) -> Path:
        path = tmp_path / "run.toml"
        path.write_text(body)
        return path

    def test_load_and_resolve_paths(self, tmp_path):
        path = self._write(tmp_path, (
            "[run]\n"
            'headlines = ["h.csv"]\n'
            'market_caps = "m.csv"\n'
            'sectors = "s.csv"\n'
            "start = 2024-01-02\n"
            'normalize = "overall"\n'
            "window = 5\n"
            'out = "bundle"\n'
            "\n[[external]]\n"
            'name = "VIX"\n'
            'path = "vix.csv"\n'
        ))
        config = load_config(path)
        assert config.headlines == (tmp_path / "h.csv",)
        assert config.market_caps == tmp_path / "m.csv"
        assert config.start == dt.date(2024, 1, 2)
        assert config.normalize_mode == "overall"
        assert config.window == 5
        assert config.externals[0].name == "VIX"
        assert config.out_dir == tmp_path / "bundle"

    def test_unknown_key_rejected(self, tmp_path):
        path = self._write(tmp_path, "[run]\nwind = 7\n")
        with pytest.raises(UsageError, match="wind"):
            load_config(path)

    def test_flag_overrides_beat_config(self, tmp_path):
        config = load_config(self._write(tmp_path, "[run]\nwindow = 5\n"))
        overridden = apply_overrides(config, window=9)
        assert overridden.window == 9

    def test_validation(self):
        config = RunConfig(
            headlines=(Path("h"),), market_caps=Path("m"), sectors=Path("s"),
            start=dt.date(2024, 2, 1), end=dt.date(2024, 1, 1),
        )
        with pytest.raises(UsageError, match="before start"):
            config.validate()
        with pytest.raises(UsageError, match="headlines"):
            RunConfig().validate()


def _bundle_digest(out_dir: Path) -> dict[str, str]:
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(out_dir.iterdir())
    }


class TestCliCommands:
    def _fixture_args(self, tmp_path: Path, out: str) -> list[str]:
        data = generate_synthetic(fixture_spec(), tmp_path / "fixture")
        return [
            "--headlines", str(data.headlines),
            "--market-caps", str(data.market_caps),
            "--sectors", str(data.sectors),
            "--out", str(tmp_path / out),
        ]

    def test_report_exit_zero(self, tmp_path, capsys):
        code = main(["report"] + self._fixture_args(tmp_path, "out"))
        assert code == 0
        assert "wrote" in capsys.readouterr().out

    def test_report_byte_identical_across_runs(self, tmp_path):
        args = self._fixture_args(tmp_path, "out1")
        assert main(["report"] + args) == 0
        digest_one = _bundle_digest(tmp_path / "out1")
        args[-1] = str(tmp_path / "out2")
        assert main(["report"] + args) == 0
        digest_two = _bundle_digest(tmp_path / "out2")
        assert digest_one == digest_two

    def test_json_report_byte_identical_across_runs(self, tmp_path):
        args = self._fixture_args(tmp_path, "out1") + ["--format", "json"]
        assert main(["report"] + args) == 0
        digest_one = _bundle_digest(tmp_path / "out1")
        args[args.index(str(tmp_path / "out1"))] = str(tmp_path / "out2")
        assert main(["report"] + args) == 0
        assert digest_one == _bundle_digest(tmp_path / "out2")

    def test_ingest_subcommand_writes_canonical_copies(self, tmp_path):
        args = self._fixture_args(tmp_path, "out")
        assert main(["ingest"] + args) == 0
        out = tmp_path / "out"
        diagnostics = json.loads((out / "ingest_diagnostics.json").read_text())
        assert diagnostics["aggregation"]["total_records"] > 0
        assert diagnostics["universe_size"] == 10
        assert parse_value_panel(out / "market_caps.csv").tickers

    def test_missing_market_cap_file_exits_2(self, tmp_path, capsys):
        args = self._fixture_args(tmp_path, "out")
        args[args.index("--market-caps") + 1] = str(tmp_path / "nope.csv")
        code = main(["report"] + args)
        assert code == 2
        assert capsys.readouterr().err.startswith("error: data:")

    def test_end_before_start_exits_1(self, tmp_path, capsys):
        args = self._fixture_args(tmp_path, "out")
        code = main(["report", "--start", "2024-03-01", "--end", "2024-01-05"] + args)
        assert code == 1
        assert capsys.readouterr().err.startswith("error: usage:")

    def test_zero_news_date_exits_3(self, tmp_path, capsys):
        data = generate_synthetic(fixture_spec(), tmp_path / "fixture")
        # drop every headline on one trading date to force a zero denominator
        lines = data.headlines.read_text().splitlines()
        kept = [lines[0]] + [l for l in lines[1:] if not l.startswith("2024-01-10")]
        trimmed = tmp_path / "trimmed.csv"
        trimmed.write_text("\n".join(kept) + "\n")
        code = main([
            "compute",
            "--headlines", str(trimmed),
            "--market-caps", str(data.market_caps),
            "--sectors", str(data.sectors),
            "--out", str(tmp_path / "out"),
        ])
        assert code == 3
        assert "2024-01-10" in capsys.readouterr().err

    def test_unknown_flag_exits_1(self, capsys):
        assert main(["report", "--frobnicate"]) == 1
        assert capsys.readouterr().err.startswith("error: usage:")

    def test_bad_cutpoints_exit_1(self, tmp_path, capsys):
        args = self._fixture_args(tmp_path, "out")
        code = main(["classify", "--method", "thresholds", "--cutpoints", "a,b"] + args)
        assert code == 1

    def test_synth_subcommand(self, tmp_path):
        out = tmp_path / "fx"
        code = main([
            "synth", "--seed", "22", "--tickers", "10", "--days", "60",
            "--sectors", "3",
            "--intensity", "120,120,120,120,120,120,120,120,120,8",
            "--shock", "2024-02-27:T09.N:10",
            "--out", str(out),
        ])
        assert code == 0
        direct = generate_synthetic(
            fixture_spec(shocks=(Shock(SHOCK_DATE, "T09.N", 10.0),)), tmp_path / "direct"
        )
        assert (out / "headlines.csv").read_bytes() == direct.headlines.read_bytes()

    def test_stats_subcommand_emits_json_report(self, tmp_path):
        args = self._fixture_args(tmp_path, "out")
        assert main(["stats"] + args) == 0
        payload = json.loads((tmp_path / "out" / "stats.json").read_text())
        fit = payload["news_weight_vs_market_weight"]["linear_ticker_days"]
        assert {"slope", "intercept", "r_squared", "p_slope", "p_intercept", "n"} == set(fit)
        sector_block = payload["normality"]["sector"]
        for entity in sector_block.values():
            assert {"statistic", "p_value"} <= set(entity["level"]["shapiro_wilk"])
