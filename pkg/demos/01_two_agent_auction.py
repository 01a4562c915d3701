"""
Two agents, one contract
========================

Ana values the joint contract w at 2 and Bob at 3. Starting from prices where
Ana pays 3 and Bob receives 3, Ana refuses and Bob insists, so w is disputed.
One unit of adjustment fixes it.
"""
from pathlib import Path

from complements_auction import (
    Outcome, demand, is_stable, lyapunov, parse_instance, parse_prices, run_auction,
)

DATA = Path(__file__).parent / "data"
market = parse_instance(DATA / "two_agents.json")
start = parse_prices(DATA / "two_agents_start.json", market)

# demand at the starting prices: Ana wants nothing, Bob wants w
for agent in market.agents:
    report = demand(market, agent, start)
    print(agent, [sorted(s) for s in report.demand_sets], "utility", report.optimum)

print("lyapunov at start:", lyapunov(market, start))

trace = run_auction(market, start)
for r in trace.rounds:
    print(f"round {r.index}: prices {r.prices.by_contract()}  L = {r.lyapunov}  "
          f"chains {[str(c) for c in r.chains]}")

print("outcome:", trace.result.to_dict())
check = is_stable(market, trace.result)
print("stable:", check.ok)

# any split with Ana paying at most 2 and Bob paying at most 3 is stable
for t in range(-4, 5):
    print(t, is_stable(market, Outcome({"w": {"Ana": t, "Bob": -t}})).ok)
