"""Acceptance gate: one test per release criterion, each printing PASS/FAIL.

Run under pytest (`pytest tests/test_acceptance.py -v`) or standalone
(`python tests/test_acceptance.py`) for the line-per-criterion summary.

Frozen oracle values were computed once with scipy 1.15.3 / numpy
normal-equation solves and are inlined; the library never imports scipy.
"""
from __future__ import annotations

import datetime as dt
import hashlib
import time
from pathlib import Path

import numpy as np
import pytest

import hypeindex as hx
from hypeindex.cli import main as cli_main
from hypeindex.synth import Shock

# ----------------------------------------------------------------------
# shared fixtures and constants
# ----------------------------------------------------------------------

FIXTURE_INTENSITY = (120.0,) * 9 + (8.0,)
SHOCK_DATE = dt.date(2024, 2, 27)
SHOCK_TICKER = "T09.N"
FIXTURE_SEED = 22

RAW_SECTOR_AVERAGES = {
    "Financials": 0.19395,
    "Information Technology": 0.19313,
    "Communication": 0.12236,
    "Consumer Discretionary": 0.11554,
    "Health Care": 0.11534,
    "Industrials": 0.10253,
    "Consumer Staples": 0.09190,
    "Energy": 0.02678,
    "Utilities": 0.01842,
    "Real Estate": 0.01371,
    "Materials": 0.00633,
}
RAW_MEMBERSHIPS = [
    ("Over-Hyped", ["Financials", "Information Technology"]),
    ("Neutral-Hyped", ["Communication", "Consumer Discretionary", "Health Care",
                       "Industrials", "Consumer Staples"]),
    ("Under-Hyped", ["Energy", "Utilities", "Real Estate", "Materials"]),
]
CAP_SECTOR_AVERAGES = {
    "Real Estate": 3.12139,
    "Industrials": 2.24106,
    "Utilities": 1.89307,
    "Financials": 1.59245,
    "Consumer Staples": 1.42312,
    "Health Care": 1.10236,
    "Consumer Discretionary": 1.02629,
    "Communication": 0.97654,
    "Energy": 0.97382,
    "Materials": 0.82895,
    "Information Technology": 0.51633,
}
CAP_MEMBERSHIPS = [
    ("Relatively Hyped", ["Real Estate", "Industrials", "Utilities"]),
    ("Moderately Hyped", ["Financials", "Consumer Staples"]),
    ("Less Prominent", ["Health Care", "Consumer Discretionary", "Communication",
                        "Energy", "Materials", "Information Technology"]),
]


def _fixture_spec(shocks: tuple = ()) -> hx.SynthSpec:
    return hx.SynthSpec(
        seed=FIXTURE_SEED, n_tickers=10, n_days=60, n_sectors=3,
        base_intensity=FIXTURE_INTENSITY, shocks=shocks,
    )


def _compute_families(root: Path, shocks: tuple = ()):
    data = hx.generate_synthetic(_fixture_spec(shocks), root)
    records = hx.parse_headlines(data.headlines)
    caps = hx.parse_value_panel(data.market_caps)
    sectors = hx.parse_sector_map(data.sectors)
    counts, _ = hx.aggregate_counts(records, caps.calendar, data.tickers)
    ticker_raw = hx.hype_index(counts)
    sector_raw = hx.sector_hype_index(ticker_raw, sectors)
    ticker_weights = hx.market_cap_weight(caps, "ticker")
    ticker_cap = {e: hx.cap_hype_index(s, ticker_weights) for e, s in ticker_raw.items()}
    return ticker_raw, sector_raw, ticker_weights, ticker_cap


def _criterion(number: int, description: str):
    """Print one PASS/FAIL line per criterion around the assertion block."""
    class _Reporter:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            verdict = "PASS" if exc_type is None else "FAIL"
            print(f"{verdict} criterion {number}: {description}")
            return False

    return _Reporter()


# ----------------------------------------------------------------------
# criteria
# ----------------------------------------------------------------------

def test_criterion_1_sum_to_one_invariants(tmp_path):
    with _criterion(1, "sum-to-one invariants on the 10x60 fixture within 1e-12, < 1 s"):
        started = time.perf_counter()  # generation, parsing, indices, and audit
        ticker_raw, sector_raw, ticker_weights, ticker_cap = _compute_families(tmp_path)
        ticker_matrix = np.column_stack([s.values for s in ticker_raw.values()])
        sector_matrix = np.column_stack([s.values for s in sector_raw.values()])
        weights = np.column_stack([ticker_weights.column(e) for e in ticker_raw])
        adjusted = np.column_stack([ticker_cap[e].values for e in ticker_raw])
        ticker_dev = np.abs(ticker_matrix.sum(axis=1) - 1.0).max()
        sector_dev = np.abs(sector_matrix.sum(axis=1) - 1.0).max()
        weighted_dev = np.abs((weights * adjusted).sum(axis=1) - 1.0).max()
        elapsed = time.perf_counter() - started
        assert ticker_matrix.shape == (60, 10)
        assert ticker_dev <= 1e-12, f"ticker sums deviate by {ticker_dev}"
        assert sector_dev <= 1e-12, f"sector sums deviate by {sector_dev}"
        assert weighted_dev <= 1e-12, f"cap-weighted mean deviates by {weighted_dev}"
        assert elapsed < 1.0, f"fixture audit took {elapsed:.3f}s"


def test_criterion_2_cluster_average_reproduction():
    with _criterion(2, "cluster averages match the published sector tables"):
        cap_assignment = hx.ClusterAssignment.from_memberships(
            CAP_MEMBERSHIPS, CAP_SECTOR_AVERAGES)
        cap_means = hx.cluster_averages(cap_assignment, CAP_SECTOR_AVERAGES)
        assert abs(cap_means["Relatively Hyped"] - 2.41851) <= 5e-4
        assert abs(cap_means["Moderately Hyped"] - 1.50779) <= 5e-4
        assert abs(cap_means["Less Prominent"] - 0.90438) <= 5e-4
        raw_assignment = hx.ClusterAssignment.from_memberships(
            RAW_MEMBERSHIPS, RAW_SECTOR_AVERAGES)
        raw_means = hx.cluster_averages(raw_assignment, RAW_SECTOR_AVERAGES)
        assert abs(raw_means["Over-Hyped"] - 0.19354) <= 5e-3
        assert abs(raw_means["Neutral-Hyped"] - 0.11352) <= 5e-3
        assert abs(raw_means["Under-Hyped"] - 0.01681) <= 5e-3


def test_criterion_3_threshold_classification_membership():
    with _criterion(3, "thresholds (1.8, 1.3) reproduce the cap-adjusted grouping"):
        assignment = hx.classify(
            CAP_SECTOR_AVERAGES, k=3, method="thresholds", cutpoints=(1.8, 1.3),
            labels=hx.CAP_ADJUSTED_LABELS,
        )
        got = {g.label: set(g.members) for g in assignment.groups}
        expected = {label: set(members) for label, members in CAP_MEMBERSHIPS}
        assert got == expected


def test_criterion_4_regression_kernel():
    with _criterion(4, "OLS kernel: exact recovery and oracle-matched inference"):
        x = np.linspace(0.0, 1.0, 200)
        fit = hx.linear_fit(x, 0.2166 * x + 0.0078)
        assert abs(fit.slope - 0.2166) <= 1e-12
        assert abs(fit.intercept - 0.0078) <= 1e-12
        assert abs(fit.r_squared - 1.0) <= 1e-12

        rng = np.random.default_rng(7)
        xs = rng.uniform(0.0, 1.0, 40)
        ys = 0.2166 * xs + 0.0078 + rng.normal(0.0, 0.05, 40)
        noisy = hx.linear_fit(xs, ys)
        design = np.column_stack([np.ones_like(xs), xs])
        beta = np.linalg.solve(design.T @ design, design.T @ ys)
        assert abs(noisy.intercept - beta[0]) <= 1e-10
        assert abs(noisy.slope - beta[1]) <= 1e-10
        # frozen oracle: scipy.stats.t.sf on this exact seeded sample
        assert abs(noisy.p_slope - 1.3730770170792091e-15) <= 1e-8
        assert abs(noisy.p_intercept - 0.07079964880590287) <= 1e-8


def test_criterion_5_power_fit_kernel():
    with _criterion(5, "power-fit kernel recovers y = 2.28 x^1.41 exactly"):
        x = np.linspace(0.05, 9.0, 150)
        fit = hx.power_fit(x, 2.28 * x ** 1.41)
        assert abs(fit.coefficient - 2.28) <= 1e-9
        assert abs(fit.exponent - 1.41) <= 1e-9
        assert abs(fit.r_squared_log - 1.0) <= 1e-9


def test_criterion_6_normality_battery():
    with _criterion(6, "normality battery matches the frozen reference oracle"):
        sample = np.random.default_rng(20240805).standard_normal(500)
        report = hx.normality_suite(sample)
        # frozen oracle: scipy 1.15.3 shapiro/normaltest/jarque_bera/anderson/
        # kstest(method='asymp') on this exact sample
        expected = {
            "shapiro_wilk": (0.9947252153290671, 0.08402348494761813),
            "dagostino_k2": (3.8787318926911265, 0.14379509468454355),
            "jarque_bera": (3.724291332994507, 0.15533896691373728),
            "kolmogorov_smirnov": (0.0381602276642532, 0.46033686294490295),
        }
        for name, (stat, p) in expected.items():
            result = getattr(report, name)
            assert abs(result.statistic - stat) / stat <= 1e-8, name
            assert abs(result.p_value - p) <= 1e-6, name
        assert abs(report.anderson_darling.statistic - 0.5866087950042811) <= 1e-8

        # 1% AD critical value equals 1.079 at the documented 326-day span
        paper_scale = hx.anderson_darling(np.random.default_rng(3).standard_normal(326))
        assert 1.0 in paper_scale.significance_levels
        assert abs(paper_scale.critical_value(1.0) - 1.079) <= 5e-4

        a = 3.4519675234711618  # symmetric sample with kurtosis exactly 3
        flat = np.tile(np.array([-a, -1.0, 0.0, 0.0, 0.0, 1.0, a]), 3)
        jb = hx.jarque_bera(flat)
        assert abs(jb.statistic) <= 1e-24
        assert jb.p_value == 1.0


def test_criterion_7_signal_round_trip(tmp_path):
    with _criterion(7, "one 10x shock yields exactly one flag; control run is clean"):
        shock = (Shock(SHOCK_DATE, SHOCK_TICKER, 10.0),)
        *_, shocked_cap = _compute_families(tmp_path / "shocked", shock)
        flags = []
        for series in shocked_cap.values():
            flags.extend(hx.detect_events(series, z_threshold=2.5, baseline_window=21))
        assert len(flags) == 1, f"expected 1 flag, got {flags}"
        assert flags[0].date == SHOCK_DATE
        assert flags[0].entity == SHOCK_TICKER
        assert flags[0].direction == "peak"

        *_, control_cap = _compute_families(tmp_path / "control")
        control_flags = []
        for series in control_cap.values():
            control_flags.extend(hx.detect_events(series, z_threshold=2.5, baseline_window=21))
        assert control_flags == [], f"control run flagged {control_flags}"


def test_criterion_8_report_determinism(tmp_path):
    import contextlib
    import io

    with _criterion(8, "two report invocations produce byte-identical bundles"):
        data = hx.generate_synthetic(_fixture_spec(), tmp_path / "fixture")
        digests = []
        for run in ("one", "two"):
            out = tmp_path / run
            with contextlib.redirect_stdout(io.StringIO()):
                code = cli_main([
                    "report",
                    "--headlines", str(data.headlines),
                    "--market-caps", str(data.market_caps),
                    "--sectors", str(data.sectors),
                    "--out", str(out),
                ])
            assert code == 0
            digests.append({
                p.name: hashlib.sha256(p.read_bytes()).hexdigest()
                for p in sorted(out.iterdir())
            })
        assert digests[0] == digests[1]


def test_criterion_9_correlation_property_suite(tmp_path):
    with _criterion(9, "correlation properties: affine, negated, and symmetric"):
        rng = np.random.default_rng(33)
        values = rng.uniform(0.5, 2.0, 60)
        dates = hx.generate_synthetic(
            hx.SynthSpec(seed=1, n_tickers=1, n_days=60, n_sectors=1),
            tmp_path / "cal",
        ).calendar.dates
        base = hx.HypeSeries("base", "smoothed", dates, values)
        affine = hx.HypeSeries("affine", "smoothed", dates, 3.0 * values + 2.0)
        negated = hx.HypeSeries("negated", "smoothed", dates, -values)
        assert abs(hx.pearson_corr(base, affine) - 1.0) <= 1e-12
        assert abs(hx.pearson_corr(base, negated) + 1.0) <= 1e-12

        external = hx.ExternalSeries("vix", dates, rng.uniform(10.0, 30.0, 60))
        forward = hx.compare_external(base, external, 7).change_correlation
        backward = hx.compare_external(external, base, 7).change_correlation
        assert abs(forward - backward) <= 1e-12


if __name__ == "__main__":
    import sys
    import tempfile

    failures = 0
    for name, func in sorted(globals().items()):
        if not name.startswith("test_criterion"):
            continue
        try:
            if "tmp_path" in func.__code__.co_varnames[: func.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as tmp:
                    func(Path(tmp))
            else:
                func()
        except AssertionError as exc:
            failures += 1
            print(f"       -> {exc}")
    print(f"{9 - failures}/9 criteria passed")
    sys.exit(1 if failures else 0)
