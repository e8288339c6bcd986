"""Country profiles mapping reported monetary aggregates onto canonical M0-M3.

Most post-Soviet statistics offices publish aggregates with the same
structure, so their figures pass through unchanged. Two do not:

* Kyrgyzstan's M2 already contains short-term government securities, which
  are removed; its M3 is then the adjusted M2 plus government securities.
* Kazakhstan's M3 omits government securities, which are added back.

Profiles live in a bundled JSON file so that definitional changes need no
code change; pass another file to :func:`load_profiles` to override them.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from decimal import Decimal
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .core import (
    AggregateObservation,
    Issue,
    ValidationError,
)

RAW_LABELS = ("M0", "M1", "M2", "M2X", "M3", "short_term_gov_securities", "gov_securities")
MARKET_FIELDS = ("q_sm", "q_tr", "gdp", "pi", "omega_si", "omega_l", "k_inv")


class M2Rule(str, enum.Enum):
    IDENTITY = "identity"
    SUBTRACT_SHORT_TERM_GOV_SECURITIES = "subtract_short_term_gov_securities"


class M3Rule(str, enum.Enum):
    # use the published M3 if there is one, otherwise leave it to synthesis
    USE_REPORTED = "use_reported"
    REPORTED_PLUS_GOV_SECURITIES = "reported_plus_gov_securities"
    M2_PLUS_GOV_SECURITIES = "m2_plus_gov_securities"
    SYNTHESIZE_FROM_QSM = "synthesize_from_qsm"


@dataclass(frozen=True)
class CountryProfile:
    country: str
    code: str
    m2_rule: M2Rule = M2Rule.IDENTITY
    m3_rule: M3Rule = M3Rule.USE_REPORTED
    notes: str = ""

    @property
    def is_identity(self) -> bool:
        return self.m2_rule is M2Rule.IDENTITY and self.m3_rule is M3Rule.USE_REPORTED

    def required_labels(self) -> tuple[str, ...]:
        labels = ["M0", "M1", "M2"]
        if self.m2_rule is M2Rule.SUBTRACT_SHORT_TERM_GOV_SECURITIES:
            labels.append("short_term_gov_securities")
        if self.m3_rule is M3Rule.REPORTED_PLUS_GOV_SECURITIES:
            labels += ["M3", "gov_securities"]
        elif self.m3_rule is M3Rule.M2_PLUS_GOV_SECURITIES:
            labels.append("gov_securities")
        return tuple(labels)

    def to_dict(self) -> dict[str, str]:
        return {
            "country": self.country,
            "code": self.code,
            "m2_rule": self.m2_rule.value,
            "m3_rule": self.m3_rule.value,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class RawAggregateReport:
    """Aggregates as a statistics office publishes them, before normalization.

    ``aggregates`` maps labels from :data:`RAW_LABELS` to amounts;
    ``market`` holds the q_sm/q_tr/gdp/pi/omega/k_inv values.
    """

    country: str
    period: int
    aggregates: Mapping[str, Decimal]
    market: Mapping[str, Decimal | None] = field(default_factory=dict)
    line: int | None = None


class ProfileSet:
    """Lookup of profiles by country name or code, case-insensitive."""

    def __init__(self, profiles: list[CountryProfile]) -> None:
        self._profiles = list(profiles)
        self._index: dict[str, CountryProfile] = {}
        issues = []
        for p in self._profiles:
            for key in (p.country.casefold(), p.code.casefold()):
                if key in self._index and self._index[key] is not p:
                    issues.append(Issue("DuplicateProfile", f"{key!r} is defined twice"))
                self._index[key] = p
        if issues:
            raise ValidationError(issues)

    def __iter__(self):
        return iter(self._profiles)

    def __len__(self) -> int:
        return len(self._profiles)

    def __contains__(self, country: str) -> bool:
        return country.strip().casefold() in self._index

    def lookup(self, country: str) -> CountryProfile:
        try:
            return self._index[country.strip().casefold()]
        except KeyError:
            raise KeyError(f"no country profile for {country!r}") from None


def _profile_from_dict(d: Mapping[str, Any]) -> CountryProfile:
    return CountryProfile(
        country=d["country"],
        code=d["code"],
        m2_rule=M2Rule(d.get("m2_rule", "identity")),
        m3_rule=M3Rule(d.get("m3_rule", "use_reported")),
        notes=d.get("notes", ""),
    )


def load_profiles(path: str | Path | None = None) -> ProfileSet:
    """Load profiles from a JSON file, or the bundled defaults when ``path`` is None."""
    if path is None:
        text = resources.files("marketfunc.data").joinpath("profiles.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        doc = json.loads(text)
        profiles = [_profile_from_dict(d) for d in doc["profiles"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError([Issue("MalformedProfiles", f"{path or 'bundled profiles'}: {exc}")]) from exc
    return ProfileSet(profiles)


def builtin_profiles() -> list[CountryProfile]:
    return list(load_profiles())


def normalize(report: RawAggregateReport, profile: CountryProfile) -> AggregateObservation:
    """Apply ``profile`` to a raw report and return the canonical observation.

    Raises ``ValidationError`` with ``MissingLabel`` for absent inputs the
    rules need, or ``NestingViolationAfterAdjustment`` when the adjusted
    aggregates are no longer nested.
    """
    issues: list[Issue] = []
    if report.country.casefold() not in (profile.country.casefold(), profile.code.casefold()):
        issues.append(
            Issue("ProfileMismatch", f"report for {report.country} given profile {profile.country}", line=report.line)
        )
    agg = report.aggregates
    for label in profile.required_labels():
        if agg.get(label) is None:
            issues.append(
                Issue("MissingLabel", f"{profile.country} needs {label}", field=label, line=report.line)
            )
    if issues:
        raise ValidationError(issues)

    m2 = agg["M2"]
    if profile.m2_rule is M2Rule.SUBTRACT_SHORT_TERM_GOV_SECURITIES:
        m2 = m2 - agg["short_term_gov_securities"]

    m3: Decimal | None
    if profile.m3_rule is M3Rule.USE_REPORTED:
        m3 = agg.get("M3")
    elif profile.m3_rule is M3Rule.REPORTED_PLUS_GOV_SECURITIES:
        m3 = agg["M3"] + agg["gov_securities"]
    elif profile.m3_rule is M3Rule.M2_PLUS_GOV_SECURITIES:
        m3 = m2 + agg["gov_securities"]
    else:
        m3 = None

    values: dict[str, Any] = dict(report.market)
    values.update(
        country=profile.code,
        period=report.period,
        m0=agg["M0"],
        m1=agg["M1"],
        m2=m2,
        m3_reported=m3,
    )
    try:
        return AggregateObservation.from_values(**values)
    except ValidationError as exc:
        relabelled = [
            Issue(
                "NestingViolationAfterAdjustment" if i.code == "NonNestedAggregates" and not profile.is_identity else i.code,
                i.message,
                i.severity,
                i.field,
                report.line,
            )
            for i in exc.issues
        ]
        raise ValidationError(relabelled) from None
