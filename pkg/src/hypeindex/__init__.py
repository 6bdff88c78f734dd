"""Hype index analytics: news-attention shares and cap-adjusted indices for
equity universes, with normalization, clustering, statistical tests, and
attention-based market signals.
"""

from .clusters import (
    CAP_ADJUSTED_LABELS,
    RAW_LABELS,
    BandSeries,
    ClusterAssignment,
    ClusterGroup,
    classify,
    cluster_averages,
    cluster_band,
    period_average,
)
from .config import ExternalSource, RunConfig, load_config
from .data import (
    GICS_SECTORS,
    CountPanel,
    ExternalSeries,
    HeadlineRecord,
    SectorMap,
    Ticker,
    TradingCalendar,
    ValuePanel,
)
from .errors import (
    AlignmentError,
    DataValidationError,
    HypeIndexError,
    NumericalError,
    SchemaError,
    UsageError,
)
from .indices import (
    HypeSeries,
    WeightPanel,
    cap_hype_index,
    hype_index,
    market_cap_weight,
    normalize,
    read_series_csv,
    sector_hype_index,
    smooth,
    write_series_csv,
)
from .ingest import (
    AggregationDiagnostics,
    aggregate_counts,
    parse_external_series,
    parse_headlines,
    parse_sector_map,
    parse_value_panel,
    read_universe,
)
from .pipeline import ReportBundle, run_pipeline
from .signals import (
    ComparisonTable,
    EventFlag,
    MomentumSeries,
    NeutralityState,
    compare_external,
    detect_events,
    hype_momentum,
    hype_neutrality,
)
from .stats import (
    AndersonDarlingResult,
    NormalityReport,
    PowerFit,
    RegressionFit,
    TestResult,
    anderson_darling,
    dagostino_k2,
    jarque_bera,
    kolmogorov_smirnov,
    linear_fit,
    log_return_rolling_std,
    normality_suite,
    pct_change,
    pearson_corr,
    power_fit,
    rolling_mean_std,
    shapiro_wilk,
)
from .synth import Shock, SynthSpec, SyntheticDataset, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AggregationDiagnostics",
    "AlignmentError",
    "AndersonDarlingResult",
    "BandSeries",
    "CAP_ADJUSTED_LABELS",
    "ClusterAssignment",
    "ClusterGroup",
    "ComparisonTable",
    "CountPanel",
    "DataValidationError",
    "EventFlag",
    "ExternalSeries",
    "ExternalSource",
    "GICS_SECTORS",
    "HeadlineRecord",
    "HypeIndexError",
    "HypeSeries",
    "MomentumSeries",
    "NeutralityState",
    "NormalityReport",
    "NumericalError",
    "PowerFit",
    "RAW_LABELS",
    "RegressionFit",
    "ReportBundle",
    "RunConfig",
    "SchemaError",
    "SectorMap",
    "Shock",
    "SynthSpec",
    "SyntheticDataset",
    "TestResult",
    "Ticker",
    "TradingCalendar",
    "UsageError",
    "ValuePanel",
    "WeightPanel",
    "aggregate_counts",
    "anderson_darling",
    "cap_hype_index",
    "classify",
    "cluster_averages",
    "cluster_band",
    "compare_external",
    "dagostino_k2",
    "detect_events",
    "generate_synthetic",
    "hype_index",
    "hype_momentum",
    "hype_neutrality",
    "jarque_bera",
    "kolmogorov_smirnov",
    "linear_fit",
    "load_config",
    "log_return_rolling_std",
    "market_cap_weight",
    "normality_suite",
    "normalize",
    "parse_external_series",
    "parse_headlines",
    "parse_sector_map",
    "parse_value_panel",
    "pct_change",
    "pearson_corr",
    "period_average",
    "power_fit",
    "read_series_csv",
    "read_universe",
    "rolling_mean_std",
    "run_pipeline",
    "sector_hype_index",
    "shapiro_wilk",
    "smooth",
    "write_series_csv",
]
