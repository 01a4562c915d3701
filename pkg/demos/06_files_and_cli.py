"""
Files, traces and the command line
==================================

Everything the library computes can be written to JSON (and the per-round
summary to CSV). The same operations are available as the
``complements-auction`` command.
"""
import subprocess
import sys
import tempfile
from pathlib import Path

from complements_auction import emit_instance, emit_trace, parse_instance, parse_prices, run_auction
from complements_auction.io import summary_csv

DATA = Path(__file__).parent / "data"
market = parse_instance(DATA / "two_agents.json")

# parsing then emitting reproduces the file's canonical form
print(emit_instance(market))

trace = run_auction(market, parse_prices(DATA / "two_agents_start.json", market))
print(summary_csv(trace))

out = Path(tempfile.mkdtemp())
emit_trace(trace, out / "trace.json", market)
print((out / "trace.json").read_text()[:300], "...")

cli = [sys.executable, "-m", "complements_auction"]
for args in (
    ["solve", DATA / "joint_venture.json", "--summary", out / "venture.csv"],
    ["verify", DATA / "three_agents.json", "--reports", DATA / "three_agents_reports.json"],
    ["oracle", "stable", DATA / "two_agents.json", DATA / "two_agents_outcome.json"],
    ["gen", "--agents", "3", "--contracts", "4", "--seed", "42", "-o", out / "g.json"],
):
    proc = subprocess.run(cli + [str(a) for a in args], capture_output=True, text=True)
    print("$ complements-auction", " ".join(str(a) for a in args), "->", proc.returncode)
print((out / "venture.csv").read_text())
