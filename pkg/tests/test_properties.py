"""Invariants checked over generated data."""

from dataclasses import fields
from decimal import Decimal as D

from hypothesis import given, settings, strategies as st

from marketfunc import (
    AggregateObservation,
    PeriodPair,
    Series,
    assess_accumulation,
    assess_all,
    assess_redistribution,
    classify_trend,
    compute_indicators,
    functional_efficiency,
    limit_max,
    market_potential,
    population_savings,
    synthetic_m3,
)
from marketfunc.indicators import significance_class

from conftest import observations, period_pairs, rates

def _values(o):
    return {f.name: getattr(o, f.name) for f in fields(o) if f.name != "warnings"}


deltas = st.decimals(min_value=D(-100), max_value=D(200), places=3, allow_nan=False, allow_infinity=False)


@given(observations())
def test_limit_equals_synthetic_m3(o):
    assert limit_max(o) == synthetic_m3(o)


@given(observations())
def test_efficiency_reduces_to_market_share(o):
    fe = functional_efficiency(o)
    expected = 100 * o.q_sm / synthetic_m3(o)
    assert abs(fe - expected) <= D("1e-9") * expected


@given(st.decimals(min_value=D(0), max_value=D(100), allow_nan=False, allow_infinity=False))
def test_efficiency_and_potential_sum_to_hundred(fe):
    assert market_potential(fe) + fe == 100


@given(observations())
def test_computed_efficiency_and_potential_sum_to_hundred(o):
    ind = compute_indicators(o)
    assert ind.fe_sm + ind.smp == 100
    assert 0 < ind.fe_sm <= 100


@given(observations())
def test_savings_without_term_deposits(o):
    values = _values(o)
    values["m2"] = values["m1"]
    assert population_savings(AggregateObservation(**values)) == values["m0"]


@given(deltas, deltas, rates)
def test_classification_monotone_in_delta(a, b, pi):
    lo, hi = sorted((a, b))
    assert significance_class(lo, pi).strength <= significance_class(hi, pi).strength


@given(deltas, rates)
def test_direction_is_sign(delta, pi):
    t = classify_trend(Series.M2, delta, pi)
    assert t.direction.value == ("up" if delta > 0 else "down" if delta < 0 else "flat")


@given(period_pairs())
def test_verdict_shape_and_conjunction(pair):
    acc, red = assess_accumulation(pair), assess_redistribution(pair)
    assert len(acc.clauses) == 4 and len(red.clauses) == 6
    for v in (acc, red):
        assert v.performed == all(c.satisfied for c in v.clauses)


@given(period_pairs())
def test_verdict_determinism(pair):
    a, b = assess_all(pair), assess_all(pair)
    assert a.accumulation.narrative == b.accumulation.narrative
    assert a.redistribution.narrative == b.redistribution.narrative


@settings(max_examples=200)
@given(period_pairs())
def test_improving_deltas_never_break_a_performed_verdict(pair):
    if not assess_accumulation(pair).performed:
        return
    cur = pair.current
    # more market volume and a shift from savings to demand deposits: every clause delta improves
    values = _values(cur)
    values["q_sm"] = cur.q_sm * 2
    values["m1"] = cur.m1 + (cur.m2 - cur.m1) / 2
    improved = PeriodPair(pair.prior, AggregateObservation(**values))
    assert assess_accumulation(improved).performed is True
