import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bruteforce
from complements_auction import (
    DemandReport,
    Equilibrium,
    GrossComplementsViolation,
    InstanceError,
    Market,
    NonEquilibrium,
    Outcome,
    PriceVector,
    VerdictError,
    demand_reports,
    efficient_sets,
    equilibrium_outcome,
    is_equilibrium_price,
    lyapunov,
    random_balanced_prices,
    strongly_demanded,
    verify,
)
from conftest import prices, small_instances


def S(*ids):
    return frozenset(ids)


def test_three_agent_levels(fixture_a):
    market, reports = fixture_a
    trace = verify(reports, market)
    assert trace.strongly_demanded == S("w1", "w2")
    assert [lv.disputed for lv in trace.levels] == [S("w5"), S("w4"), S("w3"), S("w2")]
    assert trace.verdict == NonEquilibrium(4, S("w2"))
    # confined largest demand sets as listed step by step in the worked example
    assert trace.level(2).remaining == S("w1", "w2", "w3", "w4")
    assert dict(trace.level(2).confined) == {
        "i1": S("w1", "w2", "w3", "w4"), "i2": S("w1"), "i3": S("w2", "w3")}
    assert dict(trace.level(3).confined) == {"i1": S("w1", "w2"), "i2": S("w1"), "i3": S("w2", "w3")}
    assert trace.level(4).remaining == S("w1", "w2")
    assert dict(trace.level(4).confined) == {"i1": S("w1", "w2"), "i2": S("w1"), "i3": S()}
    assert trace.level(1).witnesses["w5"] == ("i2", "i1")
    assert trace.level(4).witnesses["w2"] == ("i1", "i3")


def test_fixture_b_equilibrium_at_zero(fixture_b):
    reports = demand_reports(fixture_b, PriceVector.zeros(fixture_b))
    assert reports["Ana"].demand_sets == (S("w"),) and reports["Bob"].demand_sets == (S("w"),)
    trace = verify(reports, fixture_b)
    assert trace.verdict == Equilibrium(S("w"))
    assert trace.final_level == 1 and trace.level(1).disputed == S()


def test_nobody_demands_anything():
    market = Market(("a", "b"), ("x",), {"x": ["a", "b"]})
    reports = {a: DemandReport.from_sets(market, a, [[]]) for a in market.agents}
    trace = verify(reports, market)
    assert trace.verdict == Equilibrium(S()) and trace.final_level == 1


def test_strongly_demanded_examples(fixture_a):
    market, reports = fixture_a
    assert strongly_demanded(reports, market) == S("w1", "w2")
    empties = {a: DemandReport.from_sets(market, a, [[], list(market.contracts_of(a))]) for a in market.agents}
    assert strongly_demanded(empties, market) == S()
    singles = {
        "i1": DemandReport.from_sets(market, "i1", [["w1", "w3"]]),
        "i2": DemandReport.from_sets(market, "i2", [["w4"]]),
        "i3": DemandReport.from_sets(market, "i3", [[]]),
    }
    assert strongly_demanded(singles, market) == S("w1", "w3", "w4")


def test_equilibrium_outcome_examples(fixture_b, fixture_c):
    p = prices(fixture_b, {"w": {"Ana": 2, "Bob": -2}})
    trace = verify(demand_reports(fixture_b, p), fixture_b)
    assert trace.verdict == Equilibrium(S("w"))
    assert equilibrium_outcome(trace, p) == Outcome({"w": {"Ana": 2, "Bob": -2}})

    zero = PriceVector.zeros(fixture_c)
    trace = verify(demand_reports(fixture_c, zero), fixture_c)
    assert equilibrium_outcome(trace, zero).to_dict() == {"u": {"a1": 0, "a2": 0}, "v": {"a1": 0, "a2": 0}}


def test_equilibrium_outcome_of_empty_support():
    market = Market(("a", "b"), ("x",), {"x": ["a", "b"]})
    reports = {a: DemandReport.from_sets(market, a, [[]]) for a in market.agents}
    trace = verify(reports, market)
    assert equilibrium_outcome(trace, PriceVector.zeros(market)).signed == {}


def test_equilibrium_outcome_rejects_non_equilibrium(fixture_a):
    market, reports = fixture_a
    with pytest.raises(VerdictError):
        equilibrium_outcome(verify(reports, market), PriceVector.zeros(market))


def test_non_gc_reports_raise():
    market = Market(("a", "b"), ("x", "y"), {"x": ["a", "b"], "y": ["a", "b"]})
    reports = {
        "a": DemandReport.from_sets(market, "a", [["x"], ["y"]]),
        "b": DemandReport.from_sets(market, "b", [[]]),
    }
    with pytest.raises(GrossComplementsViolation, match="level 2"):
        verify(reports, market)


def test_missing_report(fixture_a):
    market, reports = fixture_a
    del reports["i3"]
    with pytest.raises(InstanceError, match="missing"):
        verify(reports, market)


def check_trace_invariants(trace, market):
    assert trace.level(1).remaining == frozenset(market.contracts)
    seen = set()
    for lv in trace.levels:
        assert lv.disputed <= lv.remaining
        assert not (seen & lv.disputed)
        seen |= lv.disputed
        assert trace.strongly_demanded <= lv.remaining
    for lv, nxt in zip(trace.levels, trace.levels[1:]):
        assert lv.disputed and not (lv.disputed & trace.strongly_demanded)
        assert nxt.remaining == lv.remaining - lv.disputed
    last = trace.levels[-1]
    if trace.is_equilibrium:
        assert not last.disputed
    else:
        assert trace.verdict.witness == last.disputed & trace.strongly_demanded
        assert trace.verdict.witness and trace.verdict.level == trace.final_level


INSTANCES = list(small_instances(30, seed=21))


@settings(max_examples=120, deadline=None)
@given(k=st.integers(0, len(INSTANCES) - 1), seed=st.integers(0, 10**6))
def test_verifier_agrees_with_enumeration(k, seed):
    inst = INSTANCES[k]
    p = random_balanced_prices(inst, np.random.default_rng(seed))
    trace = verify(demand_reports(inst, p), inst)
    check_trace_invariants(trace, inst)
    supports = bruteforce.equilibrium_supports(inst, p)
    assert trace.is_equilibrium == bool(supports)
    assert (is_equilibrium_price(inst, p) is not None) == bool(supports)
    for phi in supports:
        for lv in trace.levels:
            assert not (phi & lv.disputed)
    if trace.is_equilibrium:
        assert trace.verdict.support == bruteforce.efficient(inst)[2]
        assert lyapunov(inst, p) == efficient_sets(inst).value
