import numpy as np
import pytest

import bruteforce
from complements_auction import (
    EnumerationCapError,
    GrossComplementsViolation,
    InstanceError,
    MarketInstance,
    Outcome,
    PriceVector,
    SynergyValuation,
    antitone_counterexample,
    check_antitone,
    check_gc_lowering,
    efficient_sets,
    is_equilibrium_price,
    is_stable,
    is_supermodular,
    is_supermodular_pairwise,
    lyapunov,
    random_balanced_prices,
)
from conftest import non_supermodular, prices, small_instances


def S(*ids):
    return frozenset(ids)


def all_zero():
    zero = SynergyValuation({"x": 0, "y": 0})
    return MarketInstance.build(["a", "b"], {"x": ["a", "b"], "y": ["a", "b"]}, {"a": zero, "b": zero})


def test_efficient_sets_examples(fixture_b, fixture_c):
    eff = efficient_sets(fixture_b)
    assert (eff.value, eff.maximizers, eff.largest) == (5, (S("w"),), S("w"))
    eff = efficient_sets(fixture_c)
    assert (eff.value, eff.maximizers, eff.largest) == (7, (S("u", "v"),), S("u", "v"))
    eff = efficient_sets(all_zero())
    assert eff.value == 0
    assert eff.maximizers == (S(), S("x"), S("y"), S("x", "y"))
    assert eff.largest == S("x", "y")


def test_efficient_sets_cap(fixture_b):
    with pytest.raises(EnumerationCapError):
        efficient_sets(fixture_b, cap=0)


def test_supermodular_examples(fixture_c):
    assert is_supermodular(fixture_c, "a1")
    assert is_supermodular(fixture_c, "a2")
    bad = is_supermodular(non_supermodular(), "a1")
    assert not bad and bad.witness == (S("u"), S("v"))
    assert not is_supermodular_pairwise(non_supermodular(), "a1")
    additive = MarketInstance.build(
        ["a", "b"], {"x": ["a", "b"], "y": ["a", "b"], "z": ["a", "b"]},
        {"a": SynergyValuation({"x": 4, "y": -7, "z": 1}), "b": SynergyValuation({"x": 0, "y": 0, "z": 0})},
    )
    assert is_supermodular(additive, "a")


def test_pairwise_cap():
    names = [f"c{k}" for k in range(11)]
    val = SynergyValuation({w: 0 for w in names})
    inst = MarketInstance.build(["a", "b"], {w: ["a", "b"] for w in names}, {"a": val, "b": val})
    with pytest.raises(EnumerationCapError):
        is_supermodular_pairwise(inst, "a")


def test_local_and_pairwise_checks_agree():
    rng = np.random.default_rng(5)
    for _ in range(300):
        n = int(rng.integers(1, 5))
        names = [f"c{k}" for k in range(n)]
        table = {tuple(s): int(rng.integers(-6, 7)) for s in bruteforce.subsets(names)}
        table = {tuple(w for w in names if w in s): v for s, v in table.items()}
        other = SynergyValuation({w: 0 for w in names})
        inst = MarketInstance.build(["a", "b"], {w: ["a", "b"] for w in names}, {"a": table, "b": other})
        local, pairwise = is_supermodular(inst, "a"), is_supermodular_pairwise(inst, "a")
        assert local.ok == pairwise.ok == bruteforce.supermodular(bruteforce.valuation_dict(inst, "a"))


def test_equilibrium_price_examples(fixture_b):
    assert is_equilibrium_price(fixture_b, PriceVector.zeros(fixture_b)) == S("w")
    assert is_equilibrium_price(fixture_b, prices(fixture_b, {"w": {"Ana": 3, "Bob": -3}})) is None
    shy = MarketInstance.build(
        ["a", "b"], {"x": ["a", "b"]}, {"a": {(): 0, ("x",): -1}, "b": {(): 0, ("x",): -1}}
    )
    assert is_equilibrium_price(shy, PriceVector.zeros(shy)) == S()


def test_antitone_examples(fixture_b, fixture_c):
    zero = {"u": 0, "v": 0}
    assert check_antitone(fixture_c, "a1", zero, zero)
    assert check_antitone(fixture_b, "Ana", {"w": 3}, {"w": 0})
    bad = check_antitone(non_supermodular(), "a1", {"u": 2, "v": 2}, {"u": 2, "v": 2})
    assert not bad and bad.witness == (S("u"), S("v"))


def test_gc_lowering_examples(fixture_c):
    assert check_gc_lowering(fixture_c, "a1", {"u": 1, "v": 0}, {"u": 0, "v": 0})
    assert check_gc_lowering(fixture_c, "a2", {"u": 5, "v": -2}, {"u": 5, "v": -2})
    bad = check_gc_lowering(non_supermodular(), "a1", {"u": 2, "v": 2}, {"u": 2, "v": 0})
    assert not bad and bad.witness == S("u")


def test_dominance_required(fixture_c):
    with pytest.raises(InstanceError, match="p >= q"):
        check_antitone(fixture_c, "a1", {"u": 0, "v": 0}, {"u": 1, "v": 0})
    with pytest.raises(InstanceError, match="p >= q"):
        check_gc_lowering(fixture_c, "a1", {"u": 0, "v": -1}, {"u": 0, "v": 0})


def test_counterexample_from_witness():
    inst = non_supermodular()
    witness = is_supermodular(inst, "a1").witness
    p, q = antitone_counterexample(inst, "a1", witness)
    assert p == q == {"u": 2, "v": 2}
    assert not check_antitone(inst, "a1", p, q)
    with pytest.raises(ValueError):
        antitone_counterexample(inst, "a1", (S("u", "v"), S()))


def test_stable_examples(fixture_b):
    good = is_stable(fixture_b, Outcome({"w": {"Ana": 2, "Bob": -2}}))
    assert good and good.witness == prices(fixture_b, {"w": {"Ana": 2, "Bob": -2}})
    ir = is_stable(fixture_b, Outcome({"w": {"Ana": 3, "Bob": -3}}))
    assert not ir and "individual rationality" in ir.reason and ir.witness == "Ana"
    empty = is_stable(fixture_b, Outcome({}))
    assert not empty and "largest efficient" in empty.reason


def test_stable_needs_nonzero_extension():
    # x is inefficient (3 - 5 < 0) and unsigned; at zero prices a still wants x,
    # so only a positive price on a's side supports the outcome
    inst = MarketInstance.build(
        ["a", "b"], {"w": ["a", "b"], "x": ["a", "b"]},
        {"a": SynergyValuation({"w": 1, "x": 3}), "b": SynergyValuation({"w": 1, "x": -5})},
    )
    outcome = Outcome({"w": {"a": 0, "b": 0}})
    result = is_stable(inst, outcome)
    assert result
    support = result.witness
    assert support[("a", "x")] >= 3 - 1e-9 and abs(support[("a", "x")] + support[("b", "x")]) < 1e-9
    # the caller may also supply integer support prices directly
    assert is_stable(inst, outcome, prices(inst, {"w": {"a": 0, "b": 0}, "x": {"a": 4, "b": -4}}))
    assert not is_stable(inst, outcome, PriceVector.zeros(inst))


def test_stable_rejects_bad_input(fixture_b):
    with pytest.raises(GrossComplementsViolation):
        is_stable(non_supermodular(), Outcome({}))
    with pytest.raises(InstanceError):
        is_stable(fixture_b, Outcome({"zz": {"Ana": 0, "Bob": 0}}))
    with pytest.raises(InstanceError):
        is_stable(fixture_b, Outcome({"w": {"Ana": 0, "Eve": 0}}))


def test_stable_outcomes_of_fixture_b_match_closed_form(fixture_b):
    # stable set: Ana pays at most 2 and Bob at most 3
    for t in range(-6, 7):
        result = is_stable(fixture_b, Outcome({"w": {"Ana": t, "Bob": -t}}))
        assert result.ok == (t <= 2 and -t <= 3)


INSTANCES = list(small_instances(40, seed=31))


def test_equilibrium_prices_attain_efficient_value():
    rng = np.random.default_rng(2)
    seen_eq = seen_non_eq = 0
    for inst in INSTANCES:
        eff = efficient_sets(inst)
        for _ in range(5):
            p = random_balanced_prices(inst, rng)
            phi = is_equilibrium_price(inst, p)
            value = lyapunov(inst, p)
            if phi is None:
                assert value > eff.value
                seen_non_eq += 1
            else:
                assert bruteforce.aggregate(inst, phi) == eff.value
                assert value == eff.value
                seen_eq += 1
    assert seen_eq and seen_non_eq


def test_efficient_maximizers_form_lattice():
    for inst in INSTANCES:
        eff = efficient_sets(inst)
        best, winners, largest = bruteforce.efficient(inst)
        assert eff.value == best and set(eff.maximizers) == set(winners)
        assert eff.largest == largest and largest in eff.maximizers
        for s in eff.maximizers:
            for t in eff.maximizers:
                assert s | t in eff.maximizers and s & t in eff.maximizers
