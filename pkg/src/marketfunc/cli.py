"""Command-line entry point: ``marketfunc {indicators,assess,plotdata,profiles}``.

Exit codes: 0 success (whatever the verdict), 1 invalid data or too few
periods, 2 usage error (bad flags, unreadable input). Diagnostics go to
stderr; data goes to stdout or to files under ``--out``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .assessment import assess_all
from .core import ComputationError, Issue, MarketFuncError, ValidationError, consecutive_pairs
from .indicators import compute_indicators
from .io import build_report, display_value, emit_plot_data, emit_report, indicator_record, load_observations
from .normalization import CountryProfile, load_profiles

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2

_EXT = {"json": "json", "markdown": "md"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    input: Path | None = None
    country: str | None = None
    period_from: int | None = None
    period_to: int | None = None
    profiles: Path | None = None
    out: Path | None = None
    formats: list[str] = field(default_factory=list)
    strict: bool = False

    def __post_init__(self) -> None:
        if self.period_from is not None and self.period_to is not None and self.period_from > self.period_to:
            raise UsageError(f"--from {self.period_from} is after --to {self.period_to}")


def _diag(issue: Issue | str) -> None:
    print(str(issue), file=sys.stderr)


def _load(config: RunConfig):
    if config.input is None or not config.input.is_file():
        raise UsageError(f"input file not found: {config.input}")
    if config.profiles is not None and not config.profiles.is_file():
        raise UsageError(f"profile file not found: {config.profiles}")
    profiles = load_profiles(config.profiles)
    observations, warnings = load_observations(config.input, profiles)
    for w in warnings:
        _diag(w)
    if config.strict and warnings:
        raise ValidationError([Issue("StrictMode", f"{len(warnings)} warning(s) treated as errors")])

    if config.country:
        wanted = profiles.lookup(config.country).code if config.country in profiles else config.country
        observations = [o for o in observations if o.country.casefold() == wanted.casefold()]
    observations = [
        o
        for o in observations
        if (config.period_from is None or o.period >= config.period_from)
        and (config.period_to is None or o.period <= config.period_to)
    ]
    if not observations:
        raise ValidationError([Issue("NoData", "no observations match the selection")])
    return profiles, observations


def _write(config: RunConfig, name: str, payload: bytes) -> None:
    if config.out is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
        return
    config.out.mkdir(parents=True, exist_ok=True)
    (config.out / name).write_bytes(payload)


def _indicator_markdown(records: list[dict]) -> str:
    cols = ["country", "period", "mu0", "s_pop", "m3", "m3_source", "k_tur", "k_tur_raw",
            "lim_max", "fe_sm", "smp", "q_tr_over_m3"]
    places = {"mu0": 2, "k_tur": 2}
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for r in records:
        cells = []
        for c in cols:
            v = r[c]
            cells.append(str(v) if c in ("country", "period", "m3_source") else display_value(v, places.get(c, 1)))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def cmd_indicators(config: RunConfig) -> int:
    _, observations = _load(config)
    records = [indicator_record(compute_indicators(o)) for o in observations]
    for fmt in config.formats or ["markdown"]:
        if fmt == "json":
            payload = json.dumps(records, indent=2, ensure_ascii=False) + "\n"
        else:
            payload = _indicator_markdown(records)
        _write(config, f"indicators.{_EXT[fmt]}", payload.encode("utf-8"))
    return EXIT_OK


def cmd_assess(config: RunConfig) -> int:
    profiles, observations = _load(config)
    pairs = consecutive_pairs(observations)
    if not pairs:
        raise ComputationError("InsufficientPeriods", "assessment needs at least two consecutive years")
    for pair in pairs:
        profile = profiles.lookup(pair.country) if pair.country in profiles else CountryProfile(pair.country, pair.country)
        report = build_report(assess_all(pair), profile)
        for fmt in config.formats or ["json"]:
            name = f"report_{pair.country}_{pair.prior.period}_{pair.current.period}.{_EXT[fmt]}"
            _write(config, name, emit_report(report, fmt))
    return EXIT_OK


def cmd_plotdata(config: RunConfig) -> int:
    _, observations = _load(config)
    out = config.out or Path(".")
    by_country: dict[str, list] = {}
    for o in observations:
        by_country.setdefault(o.country, []).append(compute_indicators(o))
    for country in sorted(by_country):
        for path in emit_plot_data(by_country[country], out, prefix=f"{country}_"):
            print(path)
    return EXIT_OK


def cmd_profiles_list(config: RunConfig) -> int:
    if config.profiles is not None and not config.profiles.is_file():
        raise UsageError(f"profile file not found: {config.profiles}")
    for p in load_profiles(config.profiles):
        print(f"{p.code}\t{p.country}\tM2: {p.m2_rule.value}\tM3: {p.m3_rule.value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marketfunc",
        description="Assess securities-market accumulation and redistribution from monetary aggregates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_flags(p: argparse.ArgumentParser, formats: bool) -> None:
        p.add_argument("--input", required=True, type=Path, help="dataset file (CSV, comma or semicolon)")
        p.add_argument("--country", help="country name or code to select")
        p.add_argument("--from", dest="period_from", type=int, help="first year to include")
        p.add_argument("--to", dest="period_to", type=int, help="last year to include")
        p.add_argument("--profiles", type=Path, help="country profile JSON overriding the bundled one")
        p.add_argument("--out", type=Path, help="output directory (default: stdout)")
        if formats:
            p.add_argument(
                "--format",
                dest="formats",
                action="append",
                choices=sorted(_EXT),
                help="output format; repeat for several",
            )
        p.add_argument("--strict", action="store_true", help="treat warnings as errors")

    p = sub.add_parser("indicators", help="per-period indicator table")
    data_flags(p, formats=True)
    p.set_defaults(func=cmd_indicators)

    p = sub.add_parser("assess", help="accumulation and redistribution verdicts per consecutive pair")
    data_flags(p, formats=True)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("plotdata", help="money-circulation plot data (CSV)")
    data_flags(p, formats=False)
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("profiles", help="country profiles")
    psub = p.add_subparsers(dest="action", required=True)
    pl = psub.add_parser("list", help="list country profiles")
    pl.add_argument("--profiles", type=Path, help="country profile JSON overriding the bundled one")
    pl.set_defaults(func=cmd_profiles_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            input=getattr(args, "input", None),
            country=getattr(args, "country", None),
            period_from=getattr(args, "period_from", None),
            period_to=getattr(args, "period_to", None),
            profiles=getattr(args, "profiles", None),
            out=getattr(args, "out", None),
            formats=getattr(args, "formats", None) or [],
            strict=getattr(args, "strict", False),
        )
        return args.func(config)
    except UsageError as exc:
        _diag(f"usage error: {exc}")
        return EXIT_USAGE
    except ValidationError as exc:
        for issue in exc.issues:
            _diag(issue)
        return EXIT_INVALID
    except MarketFuncError as exc:
        _diag(f"error {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
