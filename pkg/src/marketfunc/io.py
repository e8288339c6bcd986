"""Dataset ingestion and report emission.

Input is delimited text (comma or semicolon) with a header row; numbers may
use either ``39 085,3`` or ``39085.3`` notation. Output is a versioned JSON
report, a markdown rendering of it, and plain CSV plot-data files.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Any, Iterable, Mapping

from . import __version__
from .assessment import Assessment, ClauseResult, FunctionVerdict
from .core import (
    WARNING,
    AggregateObservation,
    ComputationError,
    Issue,
    ValidationError,
    format_decimal,
    parse_decimal,
    parse_period,
    round_half_up,
)
from .indicators import IndicatorSet, delta_pct, direction_of
from .normalization import CountryProfile, ProfileSet, RawAggregateReport, load_profiles, normalize

SCHEMA_VERSION = 1

REQUIRED_COLUMNS = ("country", "period", "m0", "m1", "m2", "q_sm", "q_tr", "gdp", "pi")
OPTIONAL_COLUMNS = (
    "m3",
    "omega_si",
    "omega_l",
    "k_inv",
    "m2x",
    "short_term_gov_securities",
    "gov_securities",
)
_AGGREGATE_LABELS = {
    "m0": "M0",
    "m1": "M1",
    "m2": "M2",
    "m2x": "M2X",
    "m3": "M3",
    "short_term_gov_securities": "short_term_gov_securities",
    "gov_securities": "gov_securities",
}
_MARKET = ("q_sm", "q_tr", "gdp", "pi", "omega_si", "omega_l", "k_inv")
_MISSING = ("", "-", "–", "—")


@dataclass
class ParsedDataset:
    reports: list[RawAggregateReport]
    warnings: list[Issue] = field(default_factory=list)


def _sniff_delimiter(header: str) -> str:
    return ";" if ";" in header else ","


def parse_dataset(path: str | Path) -> ParsedDataset:
    """Parse a dataset file, collecting every problem before raising.

    Raises ``ValidationError`` whose ``issues`` carry line numbers. Unknown
    columns are ignored and reported as warnings.
    """
    text = Path(path).read_text(encoding="utf-8-sig")
    return parse_dataset_text(text)


def parse_dataset_text(text: str) -> ParsedDataset:
    lines = text.splitlines()
    first = next((i for i, line in enumerate(lines) if line.strip()), None)
    if first is None:
        raise ValidationError([Issue("MalformedHeader", "file is empty", line=1)])

    delimiter = _sniff_delimiter(lines[first])
    rows = list(csv.reader(lines, delimiter=delimiter))
    header = [h.strip() for h in rows[first]]
    header_line = first + 1

    errors: list[Issue] = []
    warnings: list[Issue] = []
    seen_cols = set()
    for name in header:
        if not name or name in seen_cols:
            errors.append(Issue("MalformedHeader", f"empty or repeated column name {name!r}", line=header_line))
        seen_cols.add(name)
    for name in REQUIRED_COLUMNS:
        if name not in seen_cols:
            errors.append(Issue("MissingRequiredColumn", f"column {name!r} is required", line=header_line))
    known = set(REQUIRED_COLUMNS) | set(OPTIONAL_COLUMNS)
    for name in header:
        if name and name not in known:
            warnings.append(
                Issue("UnknownColumn", f"column {name!r} is not used", severity=WARNING, line=header_line)
            )
    if errors:
        raise ValidationError(errors)

    reports: list[RawAggregateReport] = []
    keys: dict[tuple[str, int], int] = {}
    for idx in range(first + 1, len(rows)):
        row, lineno = rows[idx], idx + 1
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            errors.append(
                Issue("MalformedRecord", f"expected {len(header)} fields, found {len(row)}", line=lineno)
            )
            continue
        record = {name: cell.strip() for name, cell in zip(header, row) if name in known}
        report, issues = report_from_record(record, lineno)
        errors.extend(issues)
        if report is None:
            continue
        key = (report.country.casefold(), report.period)
        if key in keys:
            errors.append(
                Issue(
                    "DuplicateRecord",
                    f"{report.country} {report.period} already defined on line {keys[key]}",
                    line=lineno,
                )
            )
            continue
        keys[key] = lineno
        reports.append(report)
    if errors:
        raise ValidationError(errors)
    return ParsedDataset(reports, warnings)


def _is_missing(cell: Any) -> bool:
    if cell is None:
        return True
    if isinstance(cell, float) and math.isnan(cell):
        return True
    return isinstance(cell, str) and cell.strip() in _MISSING


def report_from_record(
    record: Mapping[str, Any], lineno: int | None = None
) -> tuple[RawAggregateReport | None, list[Issue]]:
    """Convert one dataset record (column name -> cell) to a raw report.

    Cells may be strings in either decimal notation or plain numbers; empty
    cells, ``-`` and NaN mean absent. Returns ``(report, [])`` or
    ``(None, issues)``.
    """
    issues: list[Issue] = []
    values: dict[str, Decimal | None] = {}
    for name, cell in record.items():
        if name in ("country", "period"):
            continue
        if _is_missing(cell):
            if name in REQUIRED_COLUMNS:
                issues.append(Issue("MissingValue", f"{name} is empty", field=name, line=lineno))
            values[name] = None
            continue
        try:
            values[name] = parse_decimal(cell)
        except ValueError:
            issues.append(Issue("UnparsableNumber", f"column {name}: {cell!r}", field=name, line=lineno))
    country = "" if _is_missing(record.get("country")) else str(record["country"]).strip()
    if not country:
        issues.append(Issue("MissingValue", "country is empty", field="country", line=lineno))
    try:
        period = parse_period(record.get("period") if not _is_missing(record.get("period")) else "")
    except ValueError as exc:
        issues.append(Issue("InvalidPeriod", str(exc), field="period", line=lineno))
        period = None
    if issues:
        return None, issues
    aggregates = {
        label: values[col] for col, label in _AGGREGATE_LABELS.items() if values.get(col) is not None
    }
    market = {name: values.get(name) for name in _MARKET}
    return RawAggregateReport(country, period, aggregates, market, line=lineno), []


def load_observations(
    path: str | Path,
    profiles: ProfileSet | None = None,
) -> tuple[list[AggregateObservation], list[Issue]]:
    """Parse and normalize a dataset into canonical observations.

    Countries without a profile are passed through unchanged, with a
    ``NoProfile`` warning. Returns ``(observations, warnings)``.
    """
    profiles = profiles or load_profiles()
    parsed = parse_dataset(path)
    errors: list[Issue] = []
    warnings = list(parsed.warnings)
    out: list[AggregateObservation] = []
    for report in parsed.reports:
        if report.country in profiles:
            profile = profiles.lookup(report.country)
        else:
            profile = CountryProfile(report.country, report.country)
            warnings.append(
                Issue("NoProfile", f"no profile for {report.country}; aggregates used as reported",
                      severity=WARNING, line=report.line)
            )
        try:
            obs = normalize(report, profile)
        except ValidationError as exc:
            errors.extend(exc.issues)
            continue
        warnings.extend(
            Issue(w.code, w.message, w.severity, w.field, report.line) for w in obs.warnings
        )
        out.append(obs)
    if errors:
        raise ValidationError(errors)
    out.sort(key=lambda o: (o.country, o.period))
    return out, warnings


# --- reports -----------------------------------------------------------------


def _num(value: Decimal | None) -> str | None:
    return None if value is None else format_decimal(value)


INDICATOR_FIELDS = (
    "m0", "m1", "m2", "m3", "q_sm", "q_tr", "gdp", "pi", "mu0", "s_pop", "k_tur", "k_tur_raw",
    "lim_max", "fe_sm", "smp", "q_tr_over_m3", "cash_share", "omega_si", "omega_l", "k_inv",
)


def _issue_dict(issue: Issue) -> dict[str, Any]:
    return {"code": issue.code, "severity": issue.severity, "message": issue.message}


def indicator_record(ind: IndicatorSet) -> dict[str, Any]:
    record: dict[str, Any] = {"country": ind.country, "period": ind.period, "m3_source": ind.m3_source}
    record.update({name: _num(getattr(ind, name)) for name in INDICATOR_FIELDS})
    record["warnings"] = [_issue_dict(w) for w in ind.warnings]
    return record


def _trend_record(t) -> dict[str, Any]:
    return {
        "series": t.series.value,
        "prior": _num(t.prior),
        "current": _num(t.current),
        "delta_pct": _num(t.delta_pct),
        "direction": t.direction.value,
        "significance": t.significance.value,
        "pi": _num(t.pi),
    }


def _clause_record(c: ClauseResult) -> dict[str, Any]:
    t = c.observed
    return {
        "clause_id": c.clause_id,
        "series": c.series.value,
        "requirement": c.requirement.value,
        "satisfied": c.satisfied,
        "delta_pct": _num(t.delta_pct) if t else None,
        "direction": t.direction.value if t else None,
        "significance": t.significance.value if t else None,
        "note": c.note,
    }


def _verdict_record(v: FunctionVerdict) -> dict[str, Any]:
    return {
        "function": v.function.value,
        "status": v.status.value,
        "performed": v.performed,
        "failing": v.failing,
        "missing": v.missing,
        "clauses": [_clause_record(c) for c in v.clauses],
        "narrative": v.narrative,
    }


# efficiency rows reported beside the plain aggregates
_PERFORMANCE_SERIES = ("k_tur", "lim_max", "fe_sm", "smp")


def _performance(prior: IndicatorSet, current: IndicatorSet) -> list[dict[str, Any]]:
    rows = []
    for name in _PERFORMANCE_SERIES:
        a, b = getattr(prior, name), getattr(current, name)
        delta = direction = None
        if a is not None and b is not None and a != 0:
            delta = delta_pct(a, b)
            direction = direction_of(delta).value
        rows.append(
            {"indicator": name, "prior": _num(a), "current": _num(b), "delta_pct": _num(delta), "direction": direction}
        )
    return rows


@dataclass
class AssessmentReport:
    """JSON-ready assessment of one period pair.

    Every number is a canonical decimal string produced while building the
    report; rendering only rounds for display.
    """

    metadata: dict[str, Any]
    indicators: list[dict[str, Any]]
    trends: list[dict[str, Any]]
    performance: list[dict[str, Any]]
    verdicts: dict[str, dict[str, Any]]
    summary: dict[str, Any]
    warnings: list[dict[str, Any]]
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "metadata": self.metadata,
            "indicators": self.indicators,
            "trends": self.trends,
            "performance": self.performance,
            "verdicts": self.verdicts,
            "summary": self.summary,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> AssessmentReport:
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValidationError([Issue("UnsupportedSchema", f"schema_version {version!r}")])
        return cls(
            metadata=doc["metadata"],
            indicators=doc["indicators"],
            trends=doc["trends"],
            performance=doc["performance"],
            verdicts=doc["verdicts"],
            summary=doc["summary"],
            warnings=doc["warnings"],
            schema_version=version,
        )


def build_report(assessment: Assessment, profile: CountryProfile | None = None) -> AssessmentReport:
    prior, current = assessment.indicators
    pair = assessment.pair
    metadata = {
        "tool": "marketfunc",
        "tool_version": __version__,
        "country": pair.country,
        "periods": [pair.prior.period, pair.current.period],
        "profile": profile.to_dict() if profile else None,
        "m3_source": {str(i.period): i.m3_source for i in assessment.indicators},
    }
    warnings = []
    for ind in assessment.indicators:
        warnings.extend({"period": ind.period, **_issue_dict(w)} for w in ind.warnings)
    summary = {
        str(ind.period): {"fe_sm": _num(ind.fe_sm), "smp": _num(ind.smp)}
        for ind in assessment.indicators
    }
    return AssessmentReport(
        metadata=metadata,
        indicators=[indicator_record(i) for i in assessment.indicators],
        trends=[_trend_record(t) for t in assessment.trends],
        performance=_performance(prior, current),
        verdicts={
            "accumulation": _verdict_record(assessment.accumulation),
            "redistribution": _verdict_record(assessment.redistribution),
        },
        summary=summary,
        warnings=warnings,
    )


def load_report(data: bytes | str) -> AssessmentReport:
    return AssessmentReport.from_dict(json.loads(data))


# display precision per field, half-up
_PLACES = {"mu0": 2, "k_tur": 2, "k_inv": 2, "pi": 2}


def display_value(value: str | None, places: int = 1) -> str:
    """Round a report number half-up for display; ``None`` renders as ``n/a``."""
    if value is None:
        return "n/a"
    return format_decimal(round_half_up(Decimal(value), places))


def _by_series(trends: list[dict[str, Any]]) -> dict[str, dict[str, Any]]:
    return {t["series"]: t for t in trends}


_ARROWS = {"up": "↑", "down": "↓", "flat": "→", None: ""}


def _row(label: str, field_name: str, series: str | None, report: AssessmentReport, pi: str) -> str:
    a, b = report.indicators
    places = _PLACES.get(field_name, 1)
    trend = _by_series(report.trends).get(series) if series else None
    delta = display_value(trend["delta_pct"]) if trend else "n/a"
    arrow = _ARROWS[trend["direction"]] if trend else ""
    return f"| {label} | {display_value(a[field_name], places)} | {display_value(b[field_name], places)} | {delta} | {arrow} | {pi} |"


def _flag(value: str | None, places: int, warned: bool) -> str:
    text = display_value(value, places)
    return f"{text} (!)" if warned else text


def render_markdown(report: AssessmentReport) -> str:
    meta = report.metadata
    a, b = report.indicators
    y0, y1 = meta["periods"]
    pi = display_value(b["pi"], 2)
    head = f"| Index | {y0} | {y1} | Change to previous year, % | | Inflation rate (π), % |"
    rule = "|---|---:|---:|---:|:-:|---:|"
    name = meta["profile"]["country"] if meta.get("profile") else meta["country"]
    out = [
        f"# Securities market assessment: {name} {y0}-{y1}",
        "",
        f"Tool version {meta['tool_version']}, report schema {report.schema_version}. "
        f"M3 source: {', '.join(f'{k} {v}' for k, v in sorted(meta['m3_source'].items()))}.",
        "",
        "## Accumulation indicators",
        "",
        head,
        rule,
    ]
    accumulation_rows = [
        ("M0", "m0", "M0"), ("M1", "m1", "M1"), ("M2", "m2", "M2"), ("Q_sm", "q_sm", "Q_sm"),
        ("M3", "m3", "M3"), ("S_pop", "s_pop", "S_pop"),
    ]
    for i, (label, fname, series) in enumerate(accumulation_rows):
        out.append(_row(label, fname, series, report, pi if i == 0 else ""))
    out.append(_row("μ0 (coefficient)", "mu0", "mu0", report, "-"))

    out += ["", "## Redistribution indicators", "", head, rule]
    out.append(_row("GDP", "gdp", "GDP", report, pi))
    out.append(_row("M3", "m3", "M3", report, ""))
    out.append(_row("Q_tr", "q_tr", "Q_tr", report, ""))
    out.append(_row("ω_s.i. (% to GDP)", "omega_si", "omega_si", report, "-"))
    out.append(_row("ω_l (% to GDP)", "omega_l", "omega_l", report, "-"))
    out.append(_row("K_inv", "k_inv", "K_inv", report, "-"))
    out.append(_row("Q_tr/M3", "q_tr_over_m3", "Q_tr/M3", report, "-"))

    out += [
        "",
        "## Performance indicators",
        "",
        f"| Index | {y0} | {y1} | Change to previous year, % | |",
        "|---|---:|---:|---:|:-:|",
    ]
    trends = _by_series(report.trends)
    for label, fname, series in [
        ("M0", "m0", "M0"), ("M1", "m1", "M1"), ("M2", "m2", "M2"), ("Q_sm", "q_sm", "Q_sm"),
        ("S_pop", "s_pop", "S_pop"), ("Q_tr", "q_tr", "Q_tr"),
    ]:
        t = trends.get(series)
        out.append(
            f"| {label} | {display_value(a[fname])} | {display_value(b[fname])} | "
            f"{display_value(t['delta_pct']) if t else 'n/a'} | {_ARROWS[t['direction']] if t else ''} |"
        )
    warned = {w["period"] for w in report.warnings if w["code"] == "ZeroMarketVolume"}
    labels = {"k_tur": "K_tur", "lim_max": "lim_max", "fe_sm": "FE_sm (%)", "smp": "SMP (%)"}
    for row in report.performance:
        fname = row["indicator"]
        places = _PLACES.get(fname, 1)
        if fname == "k_tur":
            cells = []
            for rec in (a, b):
                raw = rec["k_tur_raw"]
                cells.append(display_value(rec["k_tur"], 2) + (f" ({display_value(raw)})" if raw is not None else ""))
        else:
            flag = fname in ("fe_sm", "smp")
            cells = [_flag(rec[fname], places, flag and rec["period"] in warned) for rec in (a, b)]
        out.append(
            f"| {labels[fname]} | {cells[0]} | {cells[1]} | {display_value(row['delta_pct'])} | {_ARROWS[row['direction']]} |"
        )

    for key in ("accumulation", "redistribution"):
        v = report.verdicts[key]
        out += ["", f"## {key.capitalize()} function: {v['status'].replace('_', ' ')}", "", v["narrative"]]

    if report.warnings:
        out += ["", "## Warnings", ""]
        out += [f"- {w['period']}: {w['code']}: {w['message']}" for w in report.warnings]
    return "\n".join(out) + "\n"


def render_json(report: AssessmentReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def emit_report(report: AssessmentReport, format: str = "json") -> bytes:
    """Serialize a report as ``json`` or ``markdown`` (UTF-8 bytes)."""
    if format == "json":
        return render_json(report).encode("utf-8")
    if format == "markdown":
        return render_markdown(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


# --- plot data ----------------------------------------------------------------

PLOT_FILES = ("money_supply.csv", "cash_share.csv", "efficiency.csv")
_PLOT_PLACES = 6


def _plot_cell(value: Decimal | None) -> str:
    return "" if value is None else format_decimal(round_half_up(value, _PLOT_PLACES))


def plot_tables(indicators: Iterable[IndicatorSet]) -> dict[str, str]:
    """Render the money-circulation plot data as ``{file name: CSV text}``.

    Raises ``ComputationError`` (``InsufficientPeriods``) for fewer than two periods.
    """
    rows = sorted(indicators, key=lambda i: (i.country, i.period))
    if len(rows) < 2:
        raise ComputationError("InsufficientPeriods", f"plot data needs at least 2 periods, got {len(rows)}")
    specs = {
        "money_supply.csv": ("m0", "m1", "m2", "m3"),
        "cash_share.csv": ("cash_share",),
        "efficiency.csv": ("fe_sm", "smp"),
    }
    out = {}
    for fname, columns in specs.items():
        buf = _stdio.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["country", "period", *columns])
        for ind in rows:
            writer.writerow([ind.country, ind.period, *(_plot_cell(getattr(ind, c)) for c in columns)])
        out[fname] = buf.getvalue()
    return out


def emit_plot_data(indicators: Iterable[IndicatorSet], out_dir: str | Path, prefix: str = "") -> list[Path]:
    """Write the three plot-data files into ``out_dir`` and return their paths."""
    tables = plot_tables(indicators)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for fname, text in tables.items():
        path = out_dir / f"{prefix}{fname}"
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths


__all__ = [
    "SCHEMA_VERSION",
    "AssessmentReport",
    "ParsedDataset",
    "build_report",
    "emit_plot_data",
    "emit_report",
    "load_observations",
    "load_report",
    "parse_dataset",
    "parse_dataset_text",
    "plot_tables",
    "render_markdown",
    "report_from_record",
]
