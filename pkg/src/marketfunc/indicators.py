"""Derived indicators of the money-supply methodology and year-over-year trends.

Every function here is pure and works in exact decimal arithmetic under
:data:`~marketfunc.core.WORKING_CONTEXT`. Zero denominators raise
:class:`~marketfunc.core.ComputationError`; nothing returns infinity or NaN.
"""

from __future__ import annotations

import decimal
import enum
from dataclasses import dataclass
from decimal import Decimal

from .core import (
    WARNING,
    WORKING_CONTEXT,
    AggregateObservation,
    ComputationError,
    Issue,
    PeriodPair,
)

HUNDRED = Decimal(100)
# Growth this many percentage points above inflation counts as significant.
SIGNIFICANCE_MARGIN = Decimal(10)
# Wide enough that 100 - fe is exact for any fe produced under WORKING_CONTEXT.
_EXACT = decimal.Context(prec=120)


def _div(num: Decimal, den: Decimal, code: str) -> Decimal:
    if den == 0:
        raise ComputationError(code, f"cannot divide {num} by zero")
    return WORKING_CONTEXT.divide(num, den)


def mu0(obs: AggregateObservation) -> Decimal:
    """Money multiplier M2/M0: how many units of broad money per unit of cash."""
    return _div(obs.m2, obs.m0, "DivisionByZeroM0")


def population_savings(obs: AggregateObservation) -> Decimal:
    """Cash plus term and savings deposits: ``m0 + (m2 - m1)``."""
    return obs.m0 + (obs.m2 - obs.m1)


def synthetic_m3(obs: AggregateObservation, *, use_reported: bool = True) -> Decimal:
    """M3 as published when available, otherwise M2 plus the securities-market volume.

    With ``use_reported=False`` the published figure is ignored and M3 is
    always synthesized.
    """
    if use_reported and obs.m3_reported is not None:
        return obs.m3_reported
    return obs.m2 + obs.q_sm


def turnover_ratio(obs: AggregateObservation) -> tuple[Decimal, Decimal]:
    """Return ``(ratio, raw)`` where ``raw = q_tr / q_sm`` and ``ratio = raw / 100``."""
    raw = _div(obs.q_tr, obs.q_sm, "ZeroMarketVolume")
    return WORKING_CONTEXT.divide(raw, HUNDRED), raw


def limit_max(obs: AggregateObservation) -> Decimal:
    """Ceiling of domestic funds that could circulate on the market.

    ``s_pop + q_sm + (m1 - m0)``; the terms cancel to ``m2 + q_sm``.
    """
    return population_savings(obs) + obs.q_sm + (obs.m1 - obs.m0)


def functional_efficiency(obs: AggregateObservation) -> Decimal:
    """Share of the market limit actually used, in percent.

    Computed as ``q_tr / (lim_max * k_tur)``. Since ``k_tur`` carries a
    division by 100, the quotient already reads as a percentage.
    """
    if obs.q_sm == 0:
        raise ComputationError("ZeroDenominator", "q_sm is zero, turnover ratio undefined")
    k_tur, _ = turnover_ratio(obs)
    lim = limit_max(obs)
    return _div(obs.q_tr, WORKING_CONTEXT.multiply(lim, k_tur), "ZeroDenominator")


def market_potential(fe: Decimal) -> Decimal:
    """Unused share of the market limit: ``100 - fe``. Requires ``0 <= fe <= 100``."""
    if not (0 <= fe <= HUNDRED):
        raise ComputationError("OutOfRange", f"efficiency {fe} outside [0, 100]")
    return _EXACT.subtract(HUNDRED, fe)


def delta_pct(prior: Decimal, current: Decimal) -> Decimal:
    """Percent change ``100 * (current - prior) / prior``."""
    if prior == 0:
        raise ComputationError("ZeroBase", "percent change from a zero base")
    return _div(WORKING_CONTEXT.multiply(HUNDRED, current - prior), prior, "ZeroBase")


class Series(str, enum.Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    Q_SM = "Q_sm"
    Q_TR = "Q_tr"
    S_POP = "S_pop"
    GDP = "GDP"
    MU0 = "mu0"
    OMEGA_SI = "omega_si"
    OMEGA_L = "omega_l"
    K_INV = "K_inv"
    Q_TR_OVER_M3 = "Q_tr/M3"

    @property
    def inflation_comparable(self) -> bool:
        """Nominal levels are compared with inflation; ratios only by direction."""
        return self not in _RATIO_SERIES


_RATIO_SERIES = frozenset(
    {Series.MU0, Series.OMEGA_SI, Series.OMEGA_L, Series.K_INV, Series.Q_TR_OVER_M3}
)


class Direction(str, enum.Enum):
    UP = "up"
    DOWN = "down"
    FLAT = "flat"

    @property
    def arrow(self) -> str:
        return {"up": "↑", "down": "↓", "flat": "→"}[self.value]


class Significance(str, enum.Enum):
    DECLINE = "decline"
    NOT_OUTPACING_INFLATION = "not_outpacing_inflation"
    POSITIVE_INSIGNIFICANT = "positive_insignificant"
    SIGNIFICANT_REAL_GROWTH = "significant_real_growth"
    NOT_APPLICABLE = "not_applicable"

    @property
    def strength(self) -> int:
        return _STRENGTH[self]


_STRENGTH = {
    Significance.NOT_APPLICABLE: -1,
    Significance.DECLINE: 0,
    Significance.NOT_OUTPACING_INFLATION: 1,
    Significance.POSITIVE_INSIGNIFICANT: 2,
    Significance.SIGNIFICANT_REAL_GROWTH: 3,
}


@dataclass(frozen=True)
class TrendAssessment:
    series: Series
    delta_pct: Decimal
    direction: Direction
    significance: Significance
    pi: Decimal
    prior: Decimal | None = None
    current: Decimal | None = None


def direction_of(delta: Decimal) -> Direction:
    if delta > 0:
        return Direction.UP
    if delta < 0:
        return Direction.DOWN
    return Direction.FLAT


def significance_class(
    delta: Decimal, pi: Decimal, margin: Decimal = SIGNIFICANCE_MARGIN
) -> Significance:
    # Thresholds are checked in order so the classes partition the line even
    # under deflation, where (0, pi] is empty.
    if delta <= 0:
        return Significance.DECLINE
    if delta <= pi:
        return Significance.NOT_OUTPACING_INFLATION
    if delta <= pi + margin:
        return Significance.POSITIVE_INSIGNIFICANT
    return Significance.SIGNIFICANT_REAL_GROWTH


def classify_trend(
    series: Series | str,
    delta: Decimal,
    pi: Decimal,
    *,
    margin: Decimal = SIGNIFICANCE_MARGIN,
    prior: Decimal | None = None,
    current: Decimal | None = None,
) -> TrendAssessment:
    series = Series(series)
    direction = direction_of(delta)
    if series.inflation_comparable:
        significance = significance_class(delta, pi, margin)
    else:
        significance = Significance.NOT_APPLICABLE
    return TrendAssessment(series, delta, direction, significance, pi, prior, current)


@dataclass(frozen=True)
class IndicatorSet:
    """All derived indicators for one observation.

    Fields are ``None`` where the indicator is unavailable (zero
    denominator); the reason is kept in ``warnings``. ``q_tr_over_m3`` is the
    plain quotient, as tabulated, not multiplied by 100. ``cash_share`` is
    ``100 * m0 / m2``.
    """

    country: str
    period: int
    m0: Decimal
    m1: Decimal
    m2: Decimal
    q_sm: Decimal
    q_tr: Decimal
    gdp: Decimal
    pi: Decimal
    mu0: Decimal | None
    s_pop: Decimal
    m3: Decimal
    m3_source: str
    k_tur: Decimal | None
    k_tur_raw: Decimal | None
    lim_max: Decimal
    fe_sm: Decimal | None
    smp: Decimal | None
    q_tr_over_m3: Decimal | None
    cash_share: Decimal | None = None
    omega_si: Decimal | None = None
    omega_l: Decimal | None = None
    k_inv: Decimal | None = None
    warnings: tuple[Issue, ...] = ()

    def value(self, series: Series) -> Decimal | None:
        return getattr(self, _SERIES_FIELD[series])


_SERIES_FIELD = {
    Series.M0: "m0",
    Series.M1: "m1",
    Series.M2: "m2",
    Series.M3: "m3",
    Series.Q_SM: "q_sm",
    Series.Q_TR: "q_tr",
    Series.S_POP: "s_pop",
    Series.GDP: "gdp",
    Series.MU0: "mu0",
    Series.OMEGA_SI: "omega_si",
    Series.OMEGA_L: "omega_l",
    Series.K_INV: "k_inv",
    Series.Q_TR_OVER_M3: "q_tr_over_m3",
}


def compute_indicators(obs: AggregateObservation) -> IndicatorSet:
    """Compute every indicator for ``obs``, degrading to ``None`` plus a warning on zero denominators.

    With an empty market (``q_sm = 0``) the turnover ratio is undefined but
    efficiency is reported as 0, the limit of ``100 * q_sm / m3``.
    """
    warnings = list(obs.warnings)

    def unavailable(code: str, message: str) -> None:
        warnings.append(Issue(code, message, severity=WARNING))

    try:
        mu = mu0(obs)
    except ComputationError:
        mu = None
        unavailable("DivisionByZeroM0", "m0 is zero; money multiplier unavailable")

    m3 = synthetic_m3(obs)
    m3_source = "synthetic" if obs.m3_reported is None else "reported"
    lim = limit_max(obs)

    k_tur = k_raw = fe = None
    if obs.q_sm > 0:
        k_tur, k_raw = turnover_ratio(obs)
        if lim > 0 and k_tur > 0:
            fe = functional_efficiency(obs)
        else:
            # q_tr = 0: the quotient form is 0/0, use the cancelled form
            fe = _div(WORKING_CONTEXT.multiply(HUNDRED, obs.q_sm), lim, "ZeroDenominator")
    elif lim > 0:
        fe = Decimal(0)
    else:
        unavailable("ZeroDenominator", "market limit is zero; efficiency unavailable")
    smp = market_potential(fe) if fe is not None else None

    q_tr_m3 = None
    if m3 > 0:
        q_tr_m3 = _div(obs.q_tr, m3, "ZeroDenominator")
    else:
        unavailable("ZeroDenominator", "M3 is zero; Q_tr/M3 unavailable")

    cash_share = None
    if obs.m2 > 0:
        cash_share = _div(WORKING_CONTEXT.multiply(HUNDRED, obs.m0), obs.m2, "ZeroDenominator")

    return IndicatorSet(
        country=obs.country,
        period=obs.period,
        m0=obs.m0,
        m1=obs.m1,
        m2=obs.m2,
        q_sm=obs.q_sm,
        q_tr=obs.q_tr,
        gdp=obs.gdp,
        pi=obs.pi,
        mu0=mu,
        s_pop=population_savings(obs),
        m3=m3,
        m3_source=m3_source,
        k_tur=k_tur,
        k_tur_raw=k_raw,
        lim_max=lim,
        fe_sm=fe,
        smp=smp,
        q_tr_over_m3=q_tr_m3,
        cash_share=cash_share,
        omega_si=obs.omega_si,
        omega_l=obs.omega_l,
        k_inv=obs.k_inv,
        warnings=tuple(warnings),
    )


def trend_table(
    prior: IndicatorSet, current: IndicatorSet, *, margin: Decimal = SIGNIFICANCE_MARGIN
) -> list[TrendAssessment]:
    """Year-over-year trends for every series available in both periods.

    Series with a missing value or a zero base are left out. Inflation is
    the current period's rate.
    """
    out = []
    for series in Series:
        a, b = prior.value(series), current.value(series)
        if a is None or b is None or a == 0:
            continue
        out.append(
            classify_trend(series, delta_pct(a, b), current.pi, margin=margin, prior=a, current=b)
        )
    return out


def pair_indicators(pair: PeriodPair) -> tuple[IndicatorSet, IndicatorSet]:
    return compute_indicators(pair.prior), compute_indicators(pair.current)
