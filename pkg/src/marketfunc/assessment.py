"""Clause-by-clause evaluation of the accumulation and redistribution functions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from decimal import Decimal

from .core import ComputationError, PeriodPair
from .indicators import (
    SIGNIFICANCE_MARGIN,
    IndicatorSet,
    Series,
    TrendAssessment,
    classify_trend,
    delta_pct,
    pair_indicators,
    trend_table,
)


class Function(str, enum.Enum):
    ACCUMULATION = "accumulation"
    REDISTRIBUTION = "redistribution"


class Requirement(str, enum.Enum):
    """What a clause demands of the observed percent change."""

    INCREASE = "increase"              # delta > 0
    DECREASE = "decrease"              # delta < 0
    OUTPACE_INFLATION = "outpace_inflation"  # delta > pi

    def holds(self, trend: TrendAssessment) -> bool:
        if self is Requirement.INCREASE:
            return trend.delta_pct > 0
        if self is Requirement.DECREASE:
            return trend.delta_pct < 0
        return trend.delta_pct > trend.pi

    @property
    def symbol(self) -> str:
        return {"increase": "↑", "decrease": "↓", "outpace_inflation": "> π"}[self.value]


class Status(str, enum.Enum):
    PERFORMED = "performed"
    NOT_PERFORMED = "not_performed"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ClauseResult:
    clause_id: str
    series: Series
    requirement: Requirement
    observed: TrendAssessment | None
    # None when the inputs for this clause are missing
    satisfied: bool | None
    note: str = ""


@dataclass(frozen=True)
class FunctionVerdict:
    function: Function
    clauses: tuple[ClauseResult, ...]
    narrative: str = field(default="", compare=False)

    @property
    def status(self) -> Status:
        if any(c.satisfied is None for c in self.clauses):
            return Status.INDETERMINATE
        return Status.PERFORMED if all(c.satisfied for c in self.clauses) else Status.NOT_PERFORMED

    @property
    def performed(self) -> bool | None:
        """True/False, or None when the verdict is indeterminate."""
        status = self.status
        return None if status is Status.INDETERMINATE else status is Status.PERFORMED

    @property
    def failing(self) -> list[str]:
        return [c.clause_id for c in self.clauses if c.satisfied is False]

    @property
    def missing(self) -> list[str]:
        return [c.clause_id for c in self.clauses if c.satisfied is None]


# (clause id, series, requirement) in evaluation order
ACCUMULATION_CLAUSES = (
    ("μ0↑", Series.MU0, Requirement.INCREASE),
    ("Q_sm↑ real", Series.Q_SM, Requirement.OUTPACE_INFLATION),
    ("S_pop↓", Series.S_POP, Requirement.DECREASE),
    ("M3↑ real", Series.M3, Requirement.OUTPACE_INFLATION),
)

REDISTRIBUTION_CLAUSES = (
    ("Δ(Q_tr/M3)↑", Series.Q_TR_OVER_M3, Requirement.INCREASE),
    ("ω_s.i.↑", Series.OMEGA_SI, Requirement.INCREASE),
    ("ω_l↑", Series.OMEGA_L, Requirement.INCREASE),
    ("K_inv↑", Series.K_INV, Requirement.INCREASE),
    ("ΔQ_tr>π", Series.Q_TR, Requirement.OUTPACE_INFLATION),
    ("ΔGDP>π", Series.GDP, Requirement.OUTPACE_INFLATION),
)


def _evaluate(
    clause_id: str,
    series: Series,
    requirement: Requirement,
    prior: IndicatorSet,
    current: IndicatorSet,
    margin: Decimal,
    *,
    allow_missing: bool,
) -> ClauseResult:
    a, b = prior.value(series), current.value(series)
    if a is None or b is None:
        which = "prior" if a is None else "current"
        if not allow_missing:
            raise ComputationError("MissingValue", f"{series.value} unavailable in {which} period")
        return ClauseResult(clause_id, series, requirement, None, None, f"{series.value} missing in {which} period")
    trend = classify_trend(series, delta_pct(a, b), current.pi, margin=margin, prior=a, current=b)
    return ClauseResult(clause_id, series, requirement, trend, requirement.holds(trend))


def _fmt(value: Decimal) -> str:
    return f"{value:+.2f}"


def _narrative(function: Function, clauses: tuple[ClauseResult, ...]) -> str:
    lines = []
    for c in clauses:
        if c.observed is None:
            lines.append(f"- {c.clause_id}: not evaluated ({c.note}).")
            continue
        t = c.observed
        verdict = "satisfied" if c.satisfied else "not satisfied"
        detail = f"change {_fmt(t.delta_pct)}% {t.direction.arrow}"
        if c.requirement is Requirement.OUTPACE_INFLATION:
            detail += f" against inflation {t.pi:.2f}%"
        lines.append(f"- {c.clause_id}: {detail}, requires {c.requirement.symbol}; {verdict}.")
    verdict = FunctionVerdict(function, clauses)
    if verdict.status is Status.PERFORMED:
        head = f"The {function.value} function is performed: every clause holds."
    elif verdict.status is Status.NOT_PERFORMED:
        head = (
            f"The {function.value} function is not performed; failing clauses: "
            + ", ".join(verdict.failing)
            + "."
        )
    else:
        head = (
            f"The {function.value} function cannot be assessed; missing inputs for: "
            + ", ".join(verdict.missing)
            + "."
        )
    return "\n".join([head, *lines])


def _verdict(
    function: Function,
    table,
    pair: PeriodPair,
    margin: Decimal,
    allow_missing: bool,
) -> FunctionVerdict:
    prior, current = pair_indicators(pair)
    clauses = tuple(
        _evaluate(cid, series, req, prior, current, margin, allow_missing=allow_missing)
        for cid, series, req in table
    )
    return FunctionVerdict(function, clauses, _narrative(function, clauses))


def assess_accumulation(pair: PeriodPair, *, margin: Decimal = SIGNIFICANCE_MARGIN) -> FunctionVerdict:
    """Four clauses: the multiplier rises, market volume and M3 outgrow inflation, savings fall."""
    return _verdict(Function.ACCUMULATION, ACCUMULATION_CLAUSES, pair, margin, allow_missing=False)


def assess_redistribution(pair: PeriodPair, *, margin: Decimal = SIGNIFICANCE_MARGIN) -> FunctionVerdict:
    """Six clauses over trading intensity, structural shares of GDP and growth against inflation.

    Missing structural indicators (omega_si, omega_l, k_inv) make the verdict
    indeterminate instead of raising.
    """
    return _verdict(Function.REDISTRIBUTION, REDISTRIBUTION_CLAUSES, pair, margin, allow_missing=True)


@dataclass(frozen=True)
class Assessment:
    pair: PeriodPair
    accumulation: FunctionVerdict
    redistribution: FunctionVerdict
    indicators: tuple[IndicatorSet, IndicatorSet]
    trends: tuple[TrendAssessment, ...]


def assess_all(pair: PeriodPair, *, margin: Decimal = SIGNIFICANCE_MARGIN) -> Assessment:
    indicators = pair_indicators(pair)
    return Assessment(
        pair=pair,
        accumulation=assess_accumulation(pair, margin=margin),
        redistribution=assess_redistribution(pair, margin=margin),
        indicators=indicators,
        trends=tuple(trend_table(*indicators, margin=margin)),
    )
