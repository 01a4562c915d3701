import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bruteforce
from complements_auction import (
    InstanceError,
    MarketInstance,
    Outcome,
    PriceVector,
    SynergyValuation,
    aggregate_valuation,
    random_balanced_prices,
    utility,
    validate_balanced,
)
from conftest import prices, small_instances


def test_utility_examples(fixture_b, fixture_c):
    assert utility(fixture_b, "Ana", {"w"}, {"w": 0}) == 2
    assert utility(fixture_c, "a1", {"u", "v"}, {"u": 1, "v": 1}) == 2
    # empty bundle ignores prices entirely
    assert utility(fixture_c, "a2", set(), {"u": 99, "v": -99}) == 0


def test_utility_accepts_price_vector(fixture_b):
    p = prices(fixture_b, {"w": {"Ana": 3, "Bob": -3}})
    assert utility(fixture_b, "Bob", {"w"}, p) == 6


def test_utility_errors(fixture_b):
    with pytest.raises(InstanceError, match="unknown agent"):
        utility(fixture_b, "Eve", set(), {})
    inst = MarketInstance.build(
        ["a", "b", "c"],
        {"x": ["a", "b"], "y": ["b", "c"]},
        {"a": {(): 0, ("x",): 1}, "b": {(): 0, ("x",): 0, ("y",): 0, ("x", "y"): 0},
         "c": {(): 0, ("y",): 0}},
    )
    with pytest.raises(InstanceError, match="does not participate"):
        utility(inst, "a", {"y"}, {"x": 0, "y": 0})


def test_aggregate_valuation_examples(fixture_b, fixture_c):
    assert aggregate_valuation(fixture_c, {"u", "v"}) == 7
    assert aggregate_valuation(fixture_b, set()) == 0
    assert aggregate_valuation(fixture_b, {"w"}) == 5
    with pytest.raises(InstanceError, match="unknown contract"):
        aggregate_valuation(fixture_b, {"zz"})


def test_fixture_c_efficient_value_by_enumeration(fixture_c):
    best, winners, _ = bruteforce.efficient(fixture_c)
    assert best == 7 and winners == [frozenset({"u", "v"})]


def test_validate_balanced_examples(fixture_b, fixture_c):
    assert validate_balanced(fixture_b, prices(fixture_b, {"w": {"Ana": 3, "Bob": -3}}))
    report = validate_balanced(fixture_b, prices(fixture_b, {"w": {"Ana": 1, "Bob": 1}}))
    assert not report.ok
    assert dict(report.unbalanced) == {"w": 2}
    assert report.messages() == ["contract w unbalanced: sum 2"]
    assert validate_balanced(fixture_c, PriceVector.zeros(fixture_c))


def test_validate_balanced_domain(fixture_b):
    p = PriceVector({("Ana", "w"): 0, ("Bob", "w"): 0, ("Eve", "w"): 0})
    report = validate_balanced(fixture_b, p)
    assert report.outside_domain == (("Eve", "w"),)
    assert not report
    missing = validate_balanced(fixture_b, PriceVector({("Ana", "w"): 0}))
    assert missing.missing == (("Bob", "w"),)


@pytest.mark.parametrize(
    "agents, contracts, valuations, message",
    [
        (["a", "b"], {"x": ["a"]}, {"a": {(): 0, ("x",): 1}, "b": {(): 0}}, "at least 2"),
        (["a", "b"], {"x": ["a", "z"]}, {"a": {(): 0, ("x",): 1}, "b": {(): 0}}, "unknown agent"),
        (["a", "b"], {"x": ["a", "b"]}, {"a": {(): 0}, "b": {(): 0, ("x",): 1}}, r"missing subset \['x'\]"),
        (["a", "b"], {"x": ["a", "b"]}, {"a": {(): 0, ("x",): 1.5}, "b": {(): 0, ("x",): 1}}, "not an integer"),
        (["a", "a"], {"x": ["a", "a"]}, {"a": {(): 0, ("x",): 1}}, "duplicate"),
        (["a", "b"], {"x": ["a", "b"]}, {"a": {(): 0, ("x",): 1}}, "valuation missing"),
    ],
)
def test_instance_invariants(agents, contracts, valuations, message):
    with pytest.raises(InstanceError, match=message):
        MarketInstance.build(agents, contracts, valuations)


def test_empty_set_value_not_forced_to_zero():
    inst = MarketInstance.build(
        ["a", "b"], {"x": ["a", "b"]}, {"a": {(): 5, ("x",): 1}, "b": {(): -2, ("x",): 0}}
    )
    assert utility(inst, "a", set(), {"x": 100}) == 5
    assert aggregate_valuation(inst, set()) == 3


def test_participants_stored_in_declared_order():
    inst = MarketInstance.build(
        ["a", "b", "c"],
        {"x": ["c", "a"]},
        {"a": {(): 0, ("x",): 0}, "b": {(): 0}, "c": {(): 0, ("x",): 0}},
    )
    assert inst.participants["x"] == ("a", "c")
    assert inst.pairs() == (("a", "x"), ("c", "x"))


def test_outcome_requires_zero_sum():
    assert Outcome({"w": {"Ana": 2, "Bob": -2}}).contracts == {"w"}
    with pytest.raises(InstanceError, match="sum to 1"):
        Outcome({"w": {"Ana": 2, "Bob": -1}})


def test_synergy_valuation_matches_definition():
    syn = SynergyValuation({"x": 1, "y": -2, "z": 3}, ((frozenset({"x", "y"}), 4), (frozenset({"x", "y", "z"}), 1)))
    inst = MarketInstance.build(
        ["a", "b"], {"x": ["a", "b"], "y": ["a", "b"], "z": ["a", "b"]},
        {"a": syn, "b": SynergyValuation({"x": 0, "y": 0, "z": 0})},
    )
    for s in bruteforce.subsets(["x", "y", "z"]):
        expected = sum({"x": 1, "y": -2, "z": 3}[w] for w in s)
        expected += 4 * ({"x", "y"} <= s) + 1 * ({"x", "y", "z"} <= s)
        assert inst.valuation("a", s) == expected


def test_price_vector_rejects_non_integers():
    with pytest.raises(InstanceError):
        PriceVector({("a", "w"): 0.5})
    with pytest.raises(InstanceError):
        PriceVector({("a", "w"): True})


INSTANCES = list(small_instances(20, seed=11))


@settings(max_examples=60, deadline=None)
@given(k=st.integers(0, len(INSTANCES) - 1), seed=st.integers(0, 10**6), delta=st.integers(-20, 20))
def test_utility_properties(k, seed, delta):
    inst = INSTANCES[k]
    p = random_balanced_prices(inst, np.random.default_rng(seed))
    for a in inst.agents:
        pa = p.for_agent(a)
        assert utility(inst, a, set(), pa) == inst.valuation(a, set())
        own = inst.contracts_of(a)
        if not own:
            continue
        w = own[0]
        bumped = dict(pa, **{w: pa[w] + delta})
        bundle = frozenset(own)
        assert utility(inst, a, bundle, bumped) == utility(inst, a, bundle, pa) - delta
    # transfers cancel across each contract
    for phi in bruteforce.subsets(inst.contracts)[:16]:
        total = sum(utility(inst, a, inst.restrict(phi, a), p) for a in inst.agents)
        assert total == aggregate_valuation(inst, phi)
