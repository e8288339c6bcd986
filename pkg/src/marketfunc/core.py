"""Validated domain types: observations, period pairs and exact decimal helpers.

Money amounts are ``Decimal`` values in billions of national currency;
percentages are ``Decimal`` values in percent. Nothing in this package
touches binary floats on the computation path.
"""

from __future__ import annotations

import decimal
import numbers
import re
from dataclasses import dataclass, field, fields
from decimal import Decimal
from typing import Any, Mapping

# Working precision for every division in the package. Table values carry one
# fractional digit; 50 significant digits keeps ratio identities exact to
# far below any tolerance used downstream.
WORKING_CONTEXT = decimal.Context(prec=50, rounding=decimal.ROUND_HALF_EVEN)

ERROR = "error"
WARNING = "warning"

_GROUPING = re.compile(r"[\s  ']")
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_YEAR = re.compile(r"^\d{4}$")
_MINUS = "−"


class MarketFuncError(Exception):
    """Base class for all errors raised by this package."""


class ComputationError(MarketFuncError, ArithmeticError):
    """An indicator could not be computed (zero denominator, out of range)."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class Issue:
    """One violated invariant, with enough context to locate it."""

    code: str
    message: str
    severity: str = ERROR
    field: str | None = None
    line: int | None = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{where}{self.severity} {self.code}: {self.message}"


class ValidationError(MarketFuncError, ValueError):
    """Raised with the complete list of problems found, never just the first."""

    def __init__(self, issues: list[Issue]) -> None:
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))

    @property
    def codes(self) -> list[str]:
        return [i.code for i in self.issues]


def parse_decimal(text: Any) -> Decimal:
    """Parse a table value in either ``39 085,3`` or ``39085.3`` notation.

    Spaces (including non-breaking ones) and apostrophes are treated as digit
    grouping. A single comma with no dot is a decimal separator. Raises
    ``ValueError`` on anything else, including NaN and infinities.
    """
    if isinstance(text, Decimal):
        value = text
    elif isinstance(text, numbers.Integral) and not isinstance(text, bool):
        value = Decimal(int(text))
    elif isinstance(text, float):
        # repr() gives the shortest round-tripping string, so 0.1 stays 0.1
        value = Decimal(repr(text))
    elif isinstance(text, str):
        s = _GROUPING.sub("", text.strip()).replace(_MINUS, "-")
        if "," in s:
            if "." in s or s.count(",") > 1:
                raise ValueError(f"ambiguous number {text!r}")
            s = s.replace(",", ".")
        if not _NUMBER.match(s):
            raise ValueError(f"not a number: {text!r}")
        value = Decimal(s)
    else:
        raise ValueError(f"not a number: {text!r}")
    if not value.is_finite():
        raise ValueError(f"not a finite number: {text!r}")
    return value


def format_decimal(value: Decimal) -> str:
    """Canonical rendering: dot decimal, no grouping, no exponent."""
    if value == 0:
        # normalises -0 and 0E-7 alike, but keeps the scale of e.g. 0.0
        return format(abs(value), "f")
    return format(value, "f")


def round_half_up(value: Decimal, places: int) -> Decimal:
    return value.quantize(Decimal(1).scaleb(-places), rounding=decimal.ROUND_HALF_UP)


def parse_period(value: Any) -> int:
    """Annual periods only: ``2017`` or ``"2017"``. Sub-annual forms are rejected."""
    if isinstance(value, numbers.Integral) and not isinstance(value, bool):
        return int(value)
    s = str(value).strip()
    if not _YEAR.match(s):
        raise ValueError(f"period must be a four-digit year, got {value!r}")
    return int(s)


_AMOUNTS = ("m0", "m1", "m2", "m3_reported", "q_sm", "q_tr", "gdp")
_OPTIONAL = ("m3_reported", "omega_si", "omega_l", "k_inv")
_NUMERIC = _AMOUNTS + ("pi", "omega_si", "omega_l", "k_inv")


def check_observation(obs: AggregateObservation | Mapping[str, Any]) -> list[Issue]:
    """Return every violated invariant of an observation (errors and warnings).

    Accepts either a constructed observation or a plain mapping of field
    values, so callers can validate before construction.
    """
    get = obs.get if isinstance(obs, Mapping) else lambda k, d=None: getattr(obs, k, d)
    issues: list[Issue] = []
    for name in _NUMERIC:
        value = get(name)
        if value is None:
            if name not in _OPTIONAL:
                issues.append(Issue("MissingValue", f"{name} is required", field=name))
            continue
        if not isinstance(value, Decimal) or not value.is_finite():
            issues.append(Issue("InvalidNumber", f"{name}={value!r} is not a finite decimal", field=name))
            continue
        if name in _AMOUNTS and value < 0:
            issues.append(Issue("NegativeAmount", f"{name}={value} is negative", field=name))

    def amount(name: str) -> Decimal | None:
        v = get(name)
        return v if isinstance(v, Decimal) and v.is_finite() else None

    m0, m1, m2, m3 = amount("m0"), amount("m1"), amount("m2"), amount("m3_reported")
    if m0 is not None and m1 is not None and m0 > m1:
        issues.append(Issue("NonNestedAggregates", f"m0={m0} exceeds m1={m1}", field="m1"))
    if m1 is not None and m2 is not None and m1 > m2:
        issues.append(Issue("NonNestedAggregates", f"m1={m1} exceeds m2={m2}", field="m2"))
    if m2 is not None and m3 is not None and m2 > m3:
        issues.append(Issue("NonNestedAggregates", f"m2={m2} exceeds reported m3={m3}", field="m3_reported"))
    q_sm = amount("q_sm")
    if q_sm is not None and q_sm == 0:
        issues.append(
            Issue(
                "ZeroMarketVolume",
                "q_sm is zero; turnover and efficiency indicators are unavailable",
                severity=WARNING,
                field="q_sm",
            )
        )
    return issues


@dataclass(frozen=True)
class AggregateObservation:
    """One year of canonical monetary aggregates and market/macro values.

    Construction validates every invariant and raises ``ValidationError``
    listing all of them; a successfully built instance is always consistent.
    """

    period: int
    country: str
    m0: Decimal
    m1: Decimal
    m2: Decimal
    q_sm: Decimal
    q_tr: Decimal
    gdp: Decimal
    pi: Decimal
    m3_reported: Decimal | None = None
    omega_si: Decimal | None = None
    omega_l: Decimal | None = None
    k_inv: Decimal | None = None
    warnings: tuple[Issue, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        issues = check_observation(self)
        errors = [i for i in issues if i.severity == ERROR]
        if errors:
            raise ValidationError(errors)
        object.__setattr__(self, "warnings", tuple(i for i in issues if i.severity == WARNING))

    @classmethod
    def from_values(cls, **values: Any) -> AggregateObservation:
        """Build from loosely typed values (strings, ints, floats), collecting all problems."""
        issues: list[Issue] = []
        kwargs: dict[str, Any] = {}
        for f in fields(cls):
            if f.name == "warnings" or f.name not in values:
                continue
            raw = values[f.name]
            if f.name == "country":
                kwargs["country"] = str(raw).strip()
            elif f.name == "period":
                try:
                    kwargs["period"] = parse_period(raw)
                except ValueError as exc:
                    issues.append(Issue("InvalidPeriod", str(exc), field="period"))
            elif raw is None or (isinstance(raw, str) and raw.strip() in ("", "-")):
                kwargs[f.name] = None
            else:
                try:
                    kwargs[f.name] = parse_decimal(raw)
                except ValueError as exc:
                    issues.append(Issue("UnparsableNumber", str(exc), field=f.name))
        unknown = set(values) - {f.name for f in fields(cls)}
        for name in sorted(unknown):
            issues.append(Issue("UnknownField", f"unexpected field {name!r}", field=name))
        for name in ("period", "country"):
            if name not in values:
                issues.append(Issue("MissingValue", f"{name} is required", field=name))
        issues.extend(
            i for i in check_observation(kwargs)
            if i.severity == ERROR and i.field not in {j.field for j in issues}
        )
        if issues:
            raise ValidationError(issues)
        return cls(**kwargs)

    def scaled(self, factor: Decimal) -> AggregateObservation:
        """Multiply every money amount by ``factor``; percentages and ratios are untouched."""
        changes = {
            name: getattr(self, name) * factor
            for name in _AMOUNTS
            if getattr(self, name) is not None
        }
        return _replace(self, **changes)


def _replace(obs: AggregateObservation, **changes: Any) -> AggregateObservation:
    values = {f.name: getattr(obs, f.name) for f in fields(obs) if f.name != "warnings"}
    values.update(changes)
    return AggregateObservation(**values)


def validate_observation(obs: AggregateObservation | Mapping[str, Any]) -> AggregateObservation:
    """Return a validated observation or raise ``ValidationError`` with every violation.

    Warnings (e.g. ``ZeroMarketVolume``) do not fail validation; they are
    kept on ``obs.warnings``.
    """
    if isinstance(obs, AggregateObservation):
        issues = [i for i in check_observation(obs) if i.severity == ERROR]
        if issues:
            raise ValidationError(issues)
        return obs
    return AggregateObservation.from_values(**dict(obs))


@dataclass(frozen=True)
class PeriodPair:
    """Two consecutive annual observations of the same country."""

    prior: AggregateObservation
    current: AggregateObservation

    def __post_init__(self) -> None:
        issues = []
        if self.prior.country != self.current.country:
            issues.append(
                Issue(
                    "CountryMismatch",
                    f"{self.prior.country} vs {self.current.country}",
                )
            )
        if self.current.period != self.prior.period + 1:
            issues.append(
                Issue(
                    "NonConsecutivePeriods",
                    f"{self.prior.period} -> {self.current.period} is not a one-year step",
                )
            )
        if issues:
            raise ValidationError(issues)

    @property
    def country(self) -> str:
        return self.current.country

    def scaled(self, factor: Decimal) -> PeriodPair:
        return PeriodPair(self.prior.scaled(factor), self.current.scaled(factor))


def consecutive_pairs(observations: list[AggregateObservation]) -> list[PeriodPair]:
    """All consecutive-year pairs, grouped by country (sorted by country, then period)."""
    ordered = sorted(observations, key=lambda o: (o.country, o.period))
    return [
        PeriodPair(a, b)
        for a, b in zip(ordered, ordered[1:])
        if a.country == b.country and b.period == a.period + 1
    ]
