"""Command-line interface.

Subcommands: ingest, compute, classify, stats, signals, report, synth.
Exit codes: 0 success, 1 usage error, 2 data validation error,
3 numerical failure. Errors go to stderr as one machine-parsable line:
``error: <category>: <message>``.
"""
from __future__ import annotations

import argparse
import datetime as dt
import sys
from pathlib import Path

from .config import ExternalSource, RunConfig, apply_overrides, load_config
from .errors import HypeIndexError, UsageError
from .pipeline import ALL_PARTS, run_pipeline
from .synth import Shock, SynthSpec, generate_synthetic

_EXIT_CODES = {"usage": 1, "data": 2, "numeric": 3}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise UsageError(f"malformed date {text!r}, expected YYYY-MM-DD") from None


def _parse_cutpoints(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"malformed cutpoints {text!r}, expected a,b") from None


def _parse_external(text: str) -> ExternalSource:
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise UsageError(f"malformed external {text!r}, expected NAME=PATH")
    return ExternalSource(name, Path(path))


def _parse_shock(text: str) -> Shock:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"malformed shock {text!r}, expected DATE:TICKER:MULTIPLIER")
    try:
        multiplier = float(parts[2])
    except ValueError:
        raise UsageError(f"malformed shock multiplier {parts[2]!r}") from None
    return Shock(_parse_date(parts[0]), parts[1], multiplier)


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="TOML run configuration")
    sub.add_argument("--headlines", action="append", type=Path, help="headlines CSV/JSONL (repeatable)")
    sub.add_argument("--market-caps", type=Path, help="market-cap CSV")
    sub.add_argument("--sectors", type=Path, help="sector-map CSV")
    sub.add_argument("--universe", type=Path, help="universe listing, one ticker per line")
    sub.add_argument("--external", action="append", metavar="NAME=PATH", help="external series (repeatable)")
    sub.add_argument("--start", help="first trading date YYYY-MM-DD")
    sub.add_argument("--end", help="last trading date YYYY-MM-DD")
    sub.add_argument("--normalize", choices=("daily", "overall"), help="normalization mode")
    sub.add_argument("--window", type=int, help="smoothing window (trading days)")
    sub.add_argument("--method", choices=("thresholds", "kmeans1d"), help="classification method")
    sub.add_argument("--cutpoints", help="comma-separated decreasing cutpoints for thresholds")
    sub.add_argument("--z-threshold", type=float, help="event flag threshold in trailing stds")
    sub.add_argument("--baseline-window", type=int, help="event baseline window (trading days)")
    sub.add_argument("--format", choices=("csv", "json"), help="output format")
    sub.add_argument("--out", type=Path, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hypeindex", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ingest", "validate inputs and write canonicalized copies"),
        ("compute", "compute raw/normalized/cap-adjusted/smoothed series"),
        ("classify", "classify entities into hype groups"),
        ("stats", "emit the statistics report"),
        ("signals", "emit event flags and external comparisons"),
        ("report", "run everything and write the full bundle"),
    ):
        sub = commands.add_parser(name, help=help_text)
        _add_run_flags(sub)
    synth = commands.add_parser("synth", help="generate a deterministic synthetic fixture")
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--tickers", type=int, default=10)
    synth.add_argument("--days", type=int, default=60)
    synth.add_argument("--sectors", type=int, default=3, dest="n_sectors")
    synth.add_argument("--intensity", default="40", help="scalar or comma list per ticker")
    synth.add_argument("--shock", action="append", metavar="DATE:TICKER:MULT", help="repeatable")
    synth.add_argument("--start", default="2024-01-02", help="first calendar date")
    synth.add_argument("--out", type=Path, required=True)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    return apply_overrides(
        config,
        headlines=tuple(args.headlines) if args.headlines else None,
        market_caps=args.market_caps,
        sectors=args.sectors,
        universe=args.universe,
        externals=tuple(_parse_external(e) for e in args.external) if args.external else None,
        start=_parse_date(args.start) if args.start else None,
        end=_parse_date(args.end) if args.end else None,
        normalize_mode=args.normalize,
        window=args.window,
        method=args.method,
        cutpoints=_parse_cutpoints(args.cutpoints) if args.cutpoints else None,
        z_threshold=args.z_threshold,
        baseline_window=args.baseline_window,
        output_format=args.format,
        out_dir=args.out,
    )


def _run_synth(args: argparse.Namespace) -> None:
    text = args.intensity
    intensity: float | tuple[float, ...]
    try:
        if "," in text:
            intensity = tuple(float(part) for part in text.split(","))
        else:
            intensity = float(text)
    except ValueError:
        raise UsageError(f"malformed intensity {text!r}") from None
    spec = SynthSpec(
        seed=args.seed,
        n_tickers=args.tickers,
        n_days=args.days,
        n_sectors=args.n_sectors,
        base_intensity=intensity,
        start=_parse_date(args.start),
        shocks=tuple(_parse_shock(s) for s in (args.shock or ())),
    )
    dataset = generate_synthetic(spec, args.out)
    print(f"wrote {dataset.headlines}")
    print(f"wrote {dataset.market_caps}")
    print(f"wrote {dataset.sectors}")


_COMMAND_PARTS = {
    "ingest": ("ingest",),
    "compute": ("compute",),
    "classify": ("classify",),
    "stats": ("stats",),
    "signals": ("signals",),
    "report": ALL_PARTS,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "synth":
            _run_synth(args)
        else:
            bundle = run_pipeline(_config_from_args(args), _COMMAND_PARTS[args.command])
            for path in bundle.files:
                print(f"wrote {path}")
        return 0
    except HypeIndexError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return _EXIT_CODES[exc.category]
    except OSError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return _EXIT_CODES["data"]


if __name__ == "__main__":
    sys.exit(main())
