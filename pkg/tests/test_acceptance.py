"""Exit criteria for the package, one test per criterion.

Golden values come from the Russia 2017/2018 tables; tolerances are fixed
here and are not tuned. A summary line per criterion is printed at the end
of the pytest run.
"""

import json
import subprocess
import sys
from decimal import Decimal as D
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from marketfunc import (
    AggregateObservation,
    PeriodPair,
    RawAggregateReport,
    Significance,
    assess_accumulation,
    assess_redistribution,
    builtin_profiles,
    compute_indicators,
    functional_efficiency,
    limit_max,
    market_potential,
    normalize,
    population_savings,
    synthetic_m3,
)
from marketfunc.indicators import Series, classify_trend, trend_table

from conftest import RUSSIA_2017, RUSSIA_2018, observations, period_pairs
import oracles

R17 = AggregateObservation(**RUSSIA_2017)
R18 = AggregateObservation(**RUSSIA_2018)
I17, I18 = compute_indicators(R17), compute_indicators(R18)
TRENDS = {t.series: t for t in trend_table(I17, I18)}


def close(value, target, tol) -> bool:
    return abs(D(value) - D(target)) <= D(tol)


def test_criterion_1_money_supply_golden():
    """S_pop, M3 exact at 0.1; mu0 +-0.005; deltas +-0.2 pp of the printed column."""
    assert I17.s_pop.quantize(D("0.1")) == D("29158.7")
    assert I18.s_pop.quantize(D("0.1")) == D("32121.2")
    assert I17.m3.quantize(D("0.1")) == D("39997.8")
    assert I18.m3.quantize(D("0.1")) == D("44455.2")
    assert close(I17.mu0, "4.97", "0.005")
    assert close(I18.mu0, "4.95", "0.005")
    printed = {
        Series.M0: "11.4", Series.M1: "12.5", Series.M2: "10.9", Series.Q_SM: "17.3",
        Series.M3: "11.1", Series.S_POP: "10.1", Series.MU0: "-0.4",
    }
    for series, value in printed.items():
        assert close(TRENDS[series].delta_pct, value, "0.2"), series
    ups = {Series.M0, Series.M1, Series.M2, Series.Q_SM, Series.M3, Series.S_POP}
    assert all(TRENDS[s].direction.value == "up" for s in ups)
    assert TRENDS[Series.MU0].direction.value == "down"


def test_criterion_2_market_efficiency_golden():
    """k_tur 9.73/972.68 and 8.04/804.11 (+-0.01); lim_max; FE 2.3/2.4 and SMP 97.7/97.6 (+-0.05)."""
    assert close(I17.k_tur, "9.73", "0.01") and close(I17.k_tur_raw, "972.68", "0.01")
    assert close(I18.k_tur, "8.04", "0.01") and close(I18.k_tur_raw, "804.11", "0.01")
    assert limit_max(R17) == D("39997.8") and limit_max(R18) == D("44455.2")
    assert close(I17.fe_sm, "2.3", "0.05") and close(I18.fe_sm, "2.4", "0.05")
    # independent rational oracle for the computed 2.281 / 2.409
    assert close(I17.fe_sm, "2.281", "0.0005") and close(I18.fe_sm, "2.409", "0.0005")
    assert abs(Fraction(str(I17.fe_sm)) - oracles.efficiency(7860.6, 17787.2, 39085.3, 912.5, 887569)) < Fraction(1, 10**30)
    assert close(I17.smp, "97.7", "0.05") and close(I18.smp, "97.6", "0.05")


def test_criterion_3_redistribution_inputs_golden():
    """Q_tr/M3 22.1/19.3 (+-0.1); GDP, omega and K_inv deltas +-0.1; Q_tr delta +-0.3."""
    assert close(I17.q_tr_over_m3, "22.1", "0.1")
    assert close(I18.q_tr_over_m3, "19.3", "0.1")
    assert close(TRENDS[Series.GDP].delta_pct, "12.5", "0.1")
    assert close(TRENDS[Series.OMEGA_SI].delta_pct, "-2.3", "0.1")
    assert close(TRENDS[Series.OMEGA_L].delta_pct, "-3.7", "0.1")
    assert close(TRENDS[Series.K_INV].delta_pct, "9.6", "0.1")
    # printed -3.1 against an arithmetic -2.98
    assert close(TRENDS[Series.Q_TR].delta_pct, "-3.1", "0.3")


def test_criterion_4_verdicts():
    """Russia: accumulation fails on mu0 and S_pop; redistribution on Q_tr/M3, omegas and dQ_tr."""
    pair = PeriodPair(R17, R18)
    acc = assess_accumulation(pair)
    assert acc.performed is False
    assert acc.failing == ["μ0↑", "S_pop↓"]
    red = assess_redistribution(pair)
    assert red.performed is False
    assert red.failing == ["Δ(Q_tr/M3)↑", "ω_s.i.↑", "ω_l↑", "ΔQ_tr>π"]


@settings(max_examples=1000, deadline=None)
@given(observations())
def test_criterion_5_algebraic_identities(o):
    """lim_max = M3 exactly; FE = 100 q_sm/M3 (1e-9 rel); FE + SMP = 100; S_pop = M0 if M1 = M2."""
    assert limit_max(o) == synthetic_m3(o)
    fe = functional_efficiency(o)
    share = 100 * o.q_sm / synthetic_m3(o)
    assert abs(fe - share) <= D("1e-9") * share
    assert fe + market_potential(fe) == 100
    flat = AggregateObservation(
        country=o.country, period=o.period, m0=o.m0, m1=o.m1, m2=o.m1,
        q_sm=o.q_sm, q_tr=o.q_tr, gdp=o.gdp, pi=o.pi,
    )
    assert population_savings(flat) == o.m0


_factors = st.decimals(min_value=D("0.001"), max_value=D("1000"), places=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(period_pairs(), _factors)
def test_criterion_6_scaling_invariance(pair, c):
    """Scaling all money amounts by c > 0 leaves verdicts and percent indicators unchanged (1e-9)."""
    scaled = pair.scaled(c)
    for assess in (assess_accumulation, assess_redistribution):
        a, b = assess(pair), assess(scaled)
        assert a.performed == b.performed
        assert [x.satisfied for x in a.clauses] == [x.satisfied for x in b.clauses]
    tol = D("1e-9")
    for orig, new in zip(map(compute_indicators, (pair.prior, pair.current)),
                         map(compute_indicators, (scaled.prior, scaled.current))):
        for name in ("fe_sm", "smp", "q_tr_over_m3", "mu0", "k_tur"):
            assert abs(getattr(orig, name) - getattr(new, name)) <= tol * max(1, abs(getattr(orig, name)))
    ta = trend_table(compute_indicators(pair.prior), compute_indicators(pair.current))
    tb = trend_table(compute_indicators(scaled.prior), compute_indicators(scaled.current))
    for x, y in zip(ta, tb):
        assert x.series == y.series
        assert abs(x.delta_pct - y.delta_pct) <= tol * max(1, abs(x.delta_pct))


def test_criterion_7_normalization():
    """15 profiles, only Kazakhstan and Kyrgyzstan non-identity; Kyrgyz example m2=92, m3=112."""
    profiles = builtin_profiles()
    assert len(profiles) == 15
    assert {p.country for p in profiles if not p.is_identity} == {"Kazakhstan", "Kyrgyzstan"}
    kg = next(p for p in profiles if p.country == "Kyrgyzstan")
    inputs = dict(M0=10, M1=40, M2=100, short_term_gov_securities=8, gov_securities=20)
    market = dict(q_sm=D(1), q_tr=D(1), gdp=D(1), pi=D(1))
    o = normalize(RawAggregateReport("Kyrgyzstan", 2020, {k: D(v) for k, v in inputs.items()}, market), kg)
    hand_m2 = inputs["M2"] - inputs["short_term_gov_securities"]
    hand_m3 = hand_m2 + inputs["gov_securities"]
    assert (hand_m2, hand_m3) == (92, 112)
    assert (o.m2, o.m3_reported) == (D(hand_m2), D(hand_m3))
    ru = next(p for p in profiles if p.country == "Russia")
    raw = {"M0": D("7860.6"), "M1": D("17787.2"), "M2": D("39085.3")}
    back = normalize(RawAggregateReport("Russia", 2017, raw, market), ru)
    assert [str(back.m0), str(back.m1), str(back.m2)] == ["7860.6", "17787.2", "39085.3"]
    for p in profiles:
        if p.is_identity:
            back = normalize(RawAggregateReport(p.code, 2017, raw, market), p)
            assert (back.m0, back.m1, back.m2) == (raw["M0"], raw["M1"], raw["M2"])


def test_criterion_8_trend_partition():
    """Exactly one significance class per (delta, pi), boundaries included; strength monotone in delta."""
    order = [
        Significance.DECLINE,
        Significance.NOT_OUTPACING_INFLATION,
        Significance.POSITIVE_INSIGNIFICANT,
        Significance.SIGNIFICANT_REAL_GROWTH,
    ]
    for pi in (D("-3"), D(0), D("4.27"), D(12)):
        grid = sorted({
            D(-50), D(-1), D(0), D("0.001"), pi - D("0.001"), pi, pi + D("0.001"),
            pi + 10 - D("0.001"), pi + 10, pi + 10 + D("0.001"), D(100),
        })
        strengths = []
        for delta in grid:
            cls = classify_trend(Series.Q_SM, delta, pi).significance
            predicates = [
                delta <= 0,
                0 < delta <= pi,
                max(pi, D(0)) < delta <= pi + 10,
                delta > max(pi + 10, D(0)),
            ]
            assert sum(predicates) == 1, (delta, pi)
            assert order[predicates.index(True)] is cls, (delta, pi, cls)
            strengths.append(cls.strength)
        assert strengths == sorted(strengths)
        if pi > 0:
            assert classify_trend(Series.Q_SM, pi, pi).significance is Significance.NOT_OUTPACING_INFLATION
        assert classify_trend(Series.Q_SM, pi + 10, pi).significance is Significance.POSITIVE_INSIGNIFICANT


def test_criterion_9_cli_end_to_end(russia_csv, tmp_path):
    """`assess` on the bundled fixture exits 0, JSON satisfies criteria 1-4, reruns are byte-identical."""
    runs = []
    for i in range(2):
        out = tmp_path / str(i)
        proc = subprocess.run(
            [sys.executable, "-m", "marketfunc.cli", "assess", "--input", str(russia_csv),
             "--country", "RU", "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        runs.append((out / "report_RU_2017_2018.json").read_bytes())
    assert runs[0] == runs[1]
    doc = json.loads(runs[0])
    acc, red = doc["verdicts"]["accumulation"], doc["verdicts"]["redistribution"]
    assert acc["performed"] is False and acc["failing"] == ["μ0↑", "S_pop↓"]
    assert red["performed"] is False and red["failing"] == ["Δ(Q_tr/M3)↑", "ω_s.i.↑", "ω_l↑", "ΔQ_tr>π"]
    assert close(doc["summary"]["2017"]["fe_sm"], "2.3", "0.05")
    assert close(doc["summary"]["2018"]["fe_sm"], "2.4", "0.05")
    assert close(doc["summary"]["2018"]["smp"], "97.6", "0.05")
    ind = {r["period"]: r for r in doc["indicators"]}
    assert D(ind[2017]["s_pop"]) == D("29158.7") and D(ind[2018]["m3"]) == D("44455.2")
    assert close(ind[2017]["k_tur"], "9.73", "0.01") and close(ind[2018]["k_tur_raw"], "804.11", "0.01")
    trends = {t["series"]: t for t in doc["trends"]}
    assert close(trends["Q_tr"]["delta_pct"], "-3.1", "0.3")
    assert close(trends["mu0"]["delta_pct"], "-0.4", "0.2")
