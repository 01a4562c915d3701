"""
Complements chains
==================

When the verifier rejects a price vector, a chain of agents and contracts
explains why: each agent refuses the contract on its left only because it
lacks a complement on its right, ending at an agent who insists on a
strongly demanded contract. Moving one unit of money along the chain lowers
the sum of indirect utilities by exactly one.
"""
from pathlib import Path

from complements_auction import (
    ComplementsChain, PriceVector, adjust_prices, chain_violations, find_chain,
    find_disjoint_chains, parse_instance, parse_reports, verify,
)

DATA = Path(__file__).parent / "data"
market = parse_instance(DATA / "three_agents.json")
reports = parse_reports(DATA / "three_agents_reports.json", market)
trace = verify(reports, market)

chain = find_chain(trace, reports, market)
print("chain:", chain)
for agent, contract, nxt in chain.steps():
    print(f"  {agent} -[{contract}]-> {nxt}")
print("problems:", chain_violations(chain, trace, reports, market))

# every chain here runs through i1, so at most one can be used per round
print("without i1:", find_chain(trace, reports, market, excluded={"i1"}))
print("disjoint family:", [str(c) for c in find_disjoint_chains(trace, reports, market)])

# on each link the refusing agent pays one unit less and the insisting one a unit more
moved = adjust_prices(PriceVector.zeros(market), [chain])
print({k: v for k, v in moved.entries.items() if v})

# a hand-made sequence that is not a chain
bogus = ComplementsChain(("i2", "i1"), ("w1",))
print(chain_violations(bogus, trace, reports, market))
