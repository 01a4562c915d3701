"""
Brute-force reference checks
============================

Exhaustive enumeration over all contract sets: efficiency, equilibrium
prices, supermodularity and the gross complements conditions. These are the
ground truth the auction is tested against on small markets.
"""
from pathlib import Path

from complements_auction import (
    MarketInstance, antitone_counterexample, check_antitone, check_gc_lowering,
    efficient_sets, is_equilibrium_price, is_supermodular, is_supermodular_pairwise,
    parse_instance, parse_prices,
)

DATA = Path(__file__).parent / "data"
venture = parse_instance(DATA / "joint_venture.json")
eff = efficient_sets(venture)
print("max aggregate value", eff.value, "at", [sorted(s) for s in eff.maximizers])

two = parse_instance(DATA / "two_agents.json")
print("equilibrium at start prices?",
      is_equilibrium_price(two, parse_prices(DATA / "two_agents_start.json", two)))

# u and v are substitutes for a1: 2 + 2 > 3 + 0
subs = MarketInstance.build(
    ["a1", "a2"],
    {"u": ["a1", "a2"], "v": ["a1", "a2"]},
    {"a1": {(): 0, ("u",): 2, ("v",): 2, ("u", "v"): 3},
     "a2": {(): 0, ("u",): 0, ("v",): 0, ("u", "v"): 0}},
)
local = is_supermodular(subs, "a1")
print("supermodular:", local.ok, local.witness, "| pairwise agrees:",
      is_supermodular_pairwise(subs, "a1").ok == local.ok)

# the witness converts into prices where demand is not a lattice
p, q = antitone_counterexample(subs, "a1", local.witness)
print("prices", p, "->", check_antitone(subs, "a1", p, q))

# lowering v's price makes a1 drop u: not gross complements
print(check_gc_lowering(subs, "a1", {"u": 2, "v": 2}, {"u": 2, "v": 0}))

# for a supermodular agent both conditions hold
for agent in venture.agents:
    own = venture.contracts_of(agent)
    high = {w: 3 for w in own}
    low = {w: (0 if k == 0 else 3) for k, w in enumerate(own)}
    print(agent, check_antitone(venture, agent, high, low).ok,
          check_gc_lowering(venture, agent, high, low).ok)
