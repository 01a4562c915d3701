import numpy as np
import pytest

from complements_auction import (
    DemandReport,
    GeneratorParams,
    Market,
    MarketInstance,
    PriceVector,
    generate,
)

# PASS/FAIL lines from test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def three_agent_market():
    return Market(
        ("i1", "i2", "i3"),
        ("w1", "w2", "w3", "w4", "w5"),
        {
            "w1": ["i1", "i2"],
            "w2": ["i1", "i3"],
            "w3": ["i1", "i3"],
            "w4": ["i1", "i2"],
            "w5": ["i1", "i2"],
        },
    )


def three_agent_reports(market):
    sets = {
        "i1": [["w1", "w2"], ["w1", "w2", "w3", "w4"]],
        "i2": [["w1"], ["w1", "w4", "w5"]],
        "i3": [[], ["w2", "w3"]],
    }
    return {a: DemandReport.from_sets(market, a, s) for a, s in sets.items()}


def ana_bob():
    return MarketInstance.build(
        ["Ana", "Bob"],
        {"w": ["Ana", "Bob"]},
        {"Ana": {(): 0, ("w",): 2}, "Bob": {(): 0, ("w",): 3}},
    )


def two_contracts():
    return MarketInstance.build(
        ["a1", "a2"],
        {"u": ["a1", "a2"], "v": ["a1", "a2"]},
        {
            "a1": {(): 0, ("u",): 1, ("v",): -1, ("u", "v"): 4},
            "a2": {(): 0, ("u",): 2, ("v",): 1, ("u", "v"): 3},
        },
    )


def non_supermodular():
    """Single agent pair where a1 values u and v as substitutes: 2 + 2 > 3 + 0."""
    return MarketInstance.build(
        ["a1", "a2"],
        {"u": ["a1", "a2"], "v": ["a1", "a2"]},
        {
            "a1": {(): 0, ("u",): 2, ("v",): 2, ("u", "v"): 3},
            "a2": {(): 0, ("u",): 0, ("v",): 0, ("u", "v"): 0},
        },
    )


def prices(market, table):
    return PriceVector.from_contracts(market, table)


@pytest.fixture
def fixture_a():
    market = three_agent_market()
    return market, three_agent_reports(market)


@pytest.fixture
def fixture_b():
    return ana_bob()


@pytest.fixture
def fixture_c():
    return two_contracts()


def small_instances(count, seed=0, max_agents=4, max_contracts=6):
    """Deterministic stream of small generated instances with varied shapes."""
    rng = np.random.default_rng(seed)
    for k in range(count):
        params = GeneratorParams(
            agents=int(rng.integers(2, max_agents + 1)),
            contracts=int(rng.integers(1, max_contracts + 1)),
            max_participants=int(rng.integers(2, 5)),
            value_range=(-10, 10),
            synergy_density=float(rng.uniform(0.0, 0.6)),
            seed=int(rng.integers(0, 2**31)),
        )
        yield generate(params)
