"""
Verifying prices from demand reports alone
==========================================

The verifier never looks at valuations. Each agent reports its demand sets at
the current prices and the procedure peels off disputed contracts level by
level until it either finds an equilibrium or proves there is none.
"""
from pathlib import Path

from complements_auction import parse_instance, parse_reports, verify

DATA = Path(__file__).parent / "data"
market = parse_instance(DATA / "three_agents.json")   # structure only, no valuations
reports = parse_reports(DATA / "three_agents_reports.json", market)

for agent, report in reports.items():
    print(agent, "smallest", sorted(report.smallest), "largest", sorted(report.largest))

trace = verify(reports, market)
print("strongly demanded:", sorted(trace.strongly_demanded))
for level in trace.levels:
    print(f"level {level.k}: remaining {sorted(level.remaining)}")
    for agent, bundle in level.confined.items():
        print(f"    {agent} largest inside: {sorted(bundle)}")
    print(f"    disputed: {sorted(level.disputed)}")

print(trace.verdict)
