"""Functional-efficiency assessment of emerging securities markets from monetary aggregates."""

__version__ = "0.1.0"

from .assessment import (  # noqa: E402
    Assessment,
    ClauseResult,
    Function,
    FunctionVerdict,
    Status,
    assess_accumulation,
    assess_all,
    assess_redistribution,
)
from .core import (  # noqa: E402
    AggregateObservation,
    ComputationError,
    Issue,
    MarketFuncError,
    PeriodPair,
    ValidationError,
    consecutive_pairs,
    format_decimal,
    parse_decimal,
    validate_observation,
)
from .indicators import (  # noqa: E402
    IndicatorSet,
    Series,
    Significance,
    TrendAssessment,
    classify_trend,
    compute_indicators,
    delta_pct,
    functional_efficiency,
    limit_max,
    market_potential,
    mu0,
    population_savings,
    synthetic_m3,
    turnover_ratio,
)
from .normalization import (  # noqa: E402
    CountryProfile,
    RawAggregateReport,
    builtin_profiles,
    load_profiles,
    normalize,
)

__all__ = [
    "AggregateObservation",
    "Assessment",
    "ClauseResult",
    "ComputationError",
    "CountryProfile",
    "Function",
    "FunctionVerdict",
    "IndicatorSet",
    "Issue",
    "MarketFuncError",
    "PeriodPair",
    "RawAggregateReport",
    "Series",
    "Significance",
    "Status",
    "TrendAssessment",
    "ValidationError",
    "assess_accumulation",
    "assess_all",
    "assess_redistribution",
    "builtin_profiles",
    "classify_trend",
    "compute_indicators",
    "consecutive_pairs",
    "delta_pct",
    "format_decimal",
    "functional_efficiency",
    "limit_max",
    "load_profiles",
    "market_potential",
    "mu0",
    "normalize",
    "parse_decimal",
    "population_savings",
    "synthetic_m3",
    "turnover_ratio",
    "validate_observation",
]
