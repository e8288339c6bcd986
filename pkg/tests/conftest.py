from __future__ import annotations

from decimal import Decimal
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import strategies as st

from marketfunc import AggregateObservation, PeriodPair

D = Decimal

RUSSIA_CSV = Path(str(resources.files("marketfunc.data").joinpath("russia_2017_2018.csv")))

# Tables 6-7 values, typed in independently of the bundled CSV
RUSSIA_2017 = dict(
    country="RU", period=2017, m0=D("7860.6"), m1=D("17787.2"), m2=D("39085.3"),
    q_sm=D("912.5"), q_tr=D("887569"), gdp=D("92089.3"), pi=D("2.52"),
    omega_si=D("21.6"), omega_l=D("21.5"), k_inv=D("1.55"),
)
RUSSIA_2018 = dict(
    country="RU", period=2018, m0=D("8762.8"), m1=D("20025.9"), m2=D("43384.3"),
    q_sm=D("1070.9"), q_tr=D("861119"), gdp=D("103626.6"), pi=D("4.27"),
    omega_si=D("21.1"), omega_l=D("20.7"), k_inv=D("1.70"),
)


def obs(**overrides) -> AggregateObservation:
    values = dict(
        country="XX", period=2020, m0=D(100), m1=D(200), m2=D(500), q_sm=D(50),
        q_tr=D(1000), gdp=D(5000), pi=D(2), omega_si=D(20), omega_l=D(10), k_inv=D(1),
    )
    values.update({k: D(str(v)) if isinstance(v, (int, float, str)) and k not in ("country", "period") else v
                   for k, v in overrides.items()})
    return AggregateObservation(**values)


@pytest.fixture
def russia_pair() -> PeriodPair:
    return PeriodPair(AggregateObservation(**RUSSIA_2017), AggregateObservation(**RUSSIA_2018))


@pytest.fixture
def russia_csv() -> Path:
    return RUSSIA_CSV


# --- hypothesis strategies ----------------------------------------------------

amounts = st.decimals(min_value=D(0), max_value=D("1000000"), places=1, allow_nan=False, allow_infinity=False)
positive = st.decimals(min_value=D("0.1"), max_value=D("1000000"), places=1, allow_nan=False, allow_infinity=False)
rates = st.decimals(min_value=D(-5), max_value=D(50), places=2, allow_nan=False, allow_infinity=False)
shares = st.decimals(min_value=D("0.1"), max_value=D(100), places=1, allow_nan=False, allow_infinity=False)


@st.composite
def observations(draw, period: int = 2020, country: str = "XX", m0_positive: bool = True):
    """Valid observations with nested aggregates and a non-empty market."""
    m0 = draw(positive if m0_positive else amounts)
    m1 = m0 + draw(amounts)
    m2 = m1 + draw(amounts)
    return AggregateObservation(
        country=country, period=period, m0=m0, m1=m1, m2=m2,
        q_sm=draw(positive), q_tr=draw(positive), gdp=draw(positive), pi=draw(rates),
        omega_si=draw(shares), omega_l=draw(shares), k_inv=draw(shares),
    )


@st.composite
def period_pairs(draw):
    return PeriodPair(draw(observations(period=2020)), draw(observations(period=2021)))


# --- acceptance summary -------------------------------------------------------

_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
