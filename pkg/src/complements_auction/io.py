"""JSON file formats for instances, prices, outcomes, demand reports and traces.

Documents are written with sorted keys and two-space indentation, and every
set of contracts is listed in the instance's declared order, so parsing a
written file and writing it again reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import io as _io
import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from .auction import AuctionTrace
from .demand import DemandReport
from .errors import InstanceError, UnbalancedPricesError
from .market import Market, MarketInstance, Outcome, PriceVector, SynergyValuation, validate_balanced
from .verifier import Equilibrium, VerificationTrace


def _load(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON in {path}: {exc}") from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write(doc: Any, path) -> str:
    text = dumps(doc)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _expect(cond: bool, message: str, path: str) -> None:
    if not cond:
        raise InstanceError(message, path)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _id_list(value, path: str) -> list[str]:
    _expect(isinstance(value, list), "expected a list of ids", path)
    for k, x in enumerate(value):
        _expect(isinstance(x, str), "ids must be strings", f"{path}[{k}]")
    _expect(len(set(value)) == len(value), "duplicate id", path)
    return value


# -- instances ---------------------------------------------------------------

def load_instance(doc: Mapping[str, Any]) -> Market | MarketInstance:
    """Validate an instance document.

    A document without ``"valuations"`` describes only the market structure
    and yields a ``Market`` (enough for verifying demand reports).
    """
    _expect(isinstance(doc, dict), "instance document must be an object", "$")
    unknown = set(doc) - {"agents", "contracts", "valuations"}
    _expect(not unknown, f"unknown keys {sorted(unknown)}", "$")
    _expect("agents" in doc, "missing key", "agents")
    _expect("contracts" in doc, "missing key", "contracts")
    agents = _id_list(doc["agents"], "agents")
    _expect(isinstance(doc["contracts"], list), "expected a list", "contracts")
    contracts: dict[str, list[str]] = {}
    for k, entry in enumerate(doc["contracts"]):
        where = f"contracts[{k}]"
        _expect(isinstance(entry, dict), "expected an object", where)
        _expect(set(entry) == {"id", "participants"}, "needs exactly 'id' and 'participants'", where)
        _expect(isinstance(entry["id"], str), "id must be a string", f"{where}.id")
        _expect(entry["id"] not in contracts, f"duplicate contract id {entry['id']!r}", f"{where}.id")
        members = _id_list(entry["participants"], f"{where}.participants")
        for a in members:
            _expect(a in agents, f"unknown agent {a!r}", f"{where}.participants")
        _expect(len(members) >= 2, "a contract needs at least 2 participants", f"{where}.participants")
        contracts[entry["id"]] = members
    if "valuations" not in doc:
        return Market(tuple(agents), tuple(contracts), contracts)

    vals = doc["valuations"]
    _expect(isinstance(vals, dict), "expected an object", "valuations")
    for a in vals:
        _expect(a in agents, f"unknown agent {a!r}", f"valuations.{a}")
    market = Market(tuple(agents), tuple(contracts), contracts)
    specs = {}
    for a in agents:
        where = f"valuations.{a}"
        _expect(a in vals, f"valuation of agent {a!r} missing", where)
        body = vals[a]
        _expect(isinstance(body, dict) and len(body) == 1 and set(body) <= {"table", "synergy"},
                "expected exactly one of 'table' or 'synergy'", where)
        own = set(market.contracts_of(a))
        if "table" in body:
            rows = body["table"]
            _expect(isinstance(rows, list), "expected a list", f"{where}.table")
            table = {}
            for k, row in enumerate(rows):
                rw = f"{where}.table[{k}]"
                _expect(isinstance(row, dict) and set(row) == {"set", "value"},
                        "needs exactly 'set' and 'value'", rw)
                members = _id_list(row["set"], f"{rw}.set")
                for w in members:
                    _expect(w in own, f"{w!r} is not a contract of agent {a!r}", f"{rw}.set")
                key = frozenset(members)
                _expect(key not in table, f"duplicate entry for set {members}", rw)
                _expect(_is_int(row["value"]), "value must be an integer", f"{rw}.value")
                table[key] = row["value"]
            specs[a] = table
        else:
            syn = body["synergy"]
            sw = f"{where}.synergy"
            _expect(isinstance(syn, dict) and set(syn) <= {"additive", "bonuses"} and "additive" in syn,
                    "expected 'additive' and optional 'bonuses'", sw)
            additive = syn["additive"]
            _expect(isinstance(additive, dict), "expected an object", f"{sw}.additive")
            _expect(set(additive) == own,
                    f"additive values must cover exactly {market.sorted_contracts(own)}", f"{sw}.additive")
            for w, x in additive.items():
                _expect(_is_int(x), "value must be an integer", f"{sw}.additive.{w}")
            bonuses = []
            for k, row in enumerate(syn.get("bonuses", [])):
                rw = f"{sw}.bonuses[{k}]"
                _expect(isinstance(row, dict) and set(row) == {"set", "value"},
                        "needs exactly 'set' and 'value'", rw)
                members = _id_list(row["set"], f"{rw}.set")
                for w in members:
                    _expect(w in own, f"{w!r} is not a contract of agent {a!r}", f"{rw}.set")
                _expect(_is_int(row["value"]) and row["value"] >= 0,
                        "bonus must be a nonnegative integer", f"{rw}.value")
                bonuses.append((frozenset(members), row["value"]))
            specs[a] = SynergyValuation(additive, tuple(bonuses))
    return MarketInstance.build(agents, contracts, specs)


def parse_instance(path) -> Market | MarketInstance:
    return load_instance(_load(path))


def instance_document(market: Market) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "agents": list(market.agents),
        "contracts": [
            {"id": w, "participants": list(market.participants[w])} for w in market.contracts
        ],
    }
    if not isinstance(market, MarketInstance):
        return doc
    vals = {}
    for a in market.agents:
        own = market.contracts_of(a)
        if a in market.synergy:
            syn = market.synergy[a]
            bonuses = sorted(syn.bonuses, key=lambda b: market.bundle_key(b[0]))
            vals[a] = {"synergy": {
                "additive": {w: syn.additive[w] for w in own},
                "bonuses": [
                    {"set": market.sorted_contracts(t), "value": b} for t, b in bonuses
                ],
            }}
        else:
            rows = [(market.bundle(a, m), v) for m, v in enumerate(market.tables[a])]
            rows.sort(key=lambda r: market.bundle_key(r[0]))
            vals[a] = {"table": [
                {"set": market.sorted_contracts(s), "value": v} for s, v in rows
            ]}
    doc["valuations"] = vals
    return doc


def emit_instance(market: Market, path=None) -> str:
    return _write(instance_document(market), path)


# -- prices, outcomes, reports -----------------------------------------------

def _transfer_table(doc, key: str, market: Market, *, complete: bool) -> dict[str, dict[str, int]]:
    _expect(isinstance(doc, dict) and set(doc) == {key}, f"expected an object with key {key!r}", "$")
    body = doc[key]
    _expect(isinstance(body, dict), "expected an object", key)
    out = {}
    for w, row in body.items():
        where = f"{key}.{w}"
        _expect(market.has_contract(w), f"unknown contract {w!r}", where)
        _expect(isinstance(row, dict), "expected an object", where)
        for a, p in row.items():
            _expect(a in market.participants[w], f"agent {a!r} does not participate in {w!r}", f"{where}.{a}")
            _expect(_is_int(p), "must be an integer", f"{where}.{a}")
        missing = [a for a in market.participants[w] if a not in row]
        _expect(not missing, f"missing entries for {missing}", where)
        total = sum(row.values())
        if total != 0:
            raise UnbalancedPricesError(f"contract {w} unbalanced: sum {total}", where)
        out[w] = row
    if complete:
        missing = [w for w in market.contracts if w not in body]
        _expect(not missing, f"prices missing for contracts {missing}", key)
    return out


def load_prices(doc, market: Market) -> PriceVector:
    prices = PriceVector.from_contracts(market, _transfer_table(doc, "prices", market, complete=True))
    assert validate_balanced(market, prices)
    return prices


def parse_prices(path, market: Market) -> PriceVector:
    return load_prices(_load(path), market)


def prices_document(prices: PriceVector) -> dict[str, Any]:
    return {"prices": prices.by_contract()}


def emit_prices(prices: PriceVector, path=None) -> str:
    return _write(prices_document(prices), path)


def load_outcome(doc, market: Market) -> Outcome:
    table = _transfer_table(doc, "outcome", market, complete=False)
    ordered = {w: {a: table[w][a] for a in market.participants[w]}
               for w in market.contracts if w in table}
    return Outcome(ordered)


def parse_outcome(path, market: Market) -> Outcome:
    return load_outcome(_load(path), market)


def outcome_document(outcome: Outcome) -> dict[str, Any]:
    return {"outcome": outcome.to_dict()}


def emit_outcome(outcome: Outcome, path=None) -> str:
    return _write(outcome_document(outcome), path)


def load_reports(doc, market: Market) -> dict[str, DemandReport]:
    """``{"reports": {agent: [[contract, ...], ...]}}`` -> demand reports."""
    _expect(isinstance(doc, dict) and set(doc) == {"reports"}, "expected an object with key 'reports'", "$")
    body = doc["reports"]
    _expect(isinstance(body, dict), "expected an object", "reports")
    for a in body:
        _expect(market.has_agent(a), f"unknown agent {a!r}", f"reports.{a}")
    out = {}
    for a in market.agents:
        where = f"reports.{a}"
        _expect(a in body, "report missing", where)
        _expect(isinstance(body[a], list) and body[a], "expected a nonempty list of sets", where)
        sets = [_id_list(s, f"{where}[{k}]") for k, s in enumerate(body[a])]
        out[a] = DemandReport.from_sets(market, a, sets)
    return out


def parse_reports(path, market: Market) -> dict[str, DemandReport]:
    return load_reports(_load(path), market)


def reports_document(reports: Mapping[str, DemandReport], market: Market) -> dict[str, Any]:
    return {"reports": {
        a: [market.sorted_contracts(s) for s in reports[a].demand_sets] for a in market.agents
    }}


def report_document(report: DemandReport, market: Market) -> dict[str, Any]:
    largest, smallest = report.largest, report.smallest
    return {
        "agent": report.agent,
        "demand_sets": [market.sorted_contracts(s) for s in report.demand_sets],
        "largest": market.sorted_contracts(largest),
        "optimum": report.optimum,
        "smallest": market.sorted_contracts(smallest),
    }


# -- traces ------------------------------------------------------------------

def verification_document(trace: VerificationTrace, market: Market) -> dict[str, Any]:
    order = market.sorted_contracts
    levels = []
    for lv in trace.levels:
        levels.append({
            "k": lv.k,
            "remaining": order(lv.remaining),
            "confined": {a: order(lv.confined[a]) for a in market.agents},
            "disputed": order(lv.disputed),
            "witnesses": {w: list(lv.witnesses[w]) for w in order(lv.witnesses)},
        })
    if isinstance(trace.verdict, Equilibrium):
        verdict = {"type": "equilibrium", "support": order(trace.verdict.support)}
    else:
        verdict = {"type": "non_equilibrium", "level": trace.verdict.level,
                   "witness": order(trace.verdict.witness)}
    return {
        "kind": "verification",
        "strongly_demanded": order(trace.strongly_demanded),
        "levels": levels,
        "verdict": verdict,
    }


def auction_document(trace: AuctionTrace, market: Market) -> dict[str, Any]:
    rounds = []
    for r in trace.rounds:
        v = verification_document(r.verification, market)
        del v["kind"]
        rounds.append({
            "round": r.index,
            "prices": r.prices.by_contract(),
            "demand": {a: {"count": r.demand_counts[a], "optimum": r.optima[a]} for a in market.agents},
            "verification": v,
            "chains": [chain.links() for chain in r.chains],
            "lyapunov": r.lyapunov,
        })
    return {
        "kind": "auction",
        "rounds": rounds,
        "outcome": trace.result.to_dict(),
        "total_rounds": trace.total_rounds,
    }


SUMMARY_HEADER = ["round", "lyapunov", "chains", "levels", "disputed_sizes"]


def summary_rows(trace: AuctionTrace) -> list[list[Any]]:
    """One row per round: index, Lyapunov value, chain count, level count and
    the sizes of the disputed sets per level (space separated)."""
    rows = []
    for r in trace.rounds:
        sizes = " ".join(str(len(lv.disputed)) for lv in r.verification.levels)
        rows.append([r.index, r.lyapunov, len(r.chains), len(r.verification.levels), sizes])
    return rows


def summary_csv(trace: AuctionTrace) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER)
    writer.writerows(summary_rows(trace))
    return buf.getvalue()


def emit_trace(
    trace: AuctionTrace | VerificationTrace,
    path,
    market: Market,
    *,
    summary: bool = False,
) -> str:
    """Write a trace as JSON, or as a per-round CSV when ``summary`` is set."""
    if summary:
        if not isinstance(trace, AuctionTrace):
            raise TypeError("summary output is defined for auction traces only")
        text = summary_csv(trace)
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text
    if isinstance(trace, AuctionTrace):
        return _write(auction_document(trace, market), path)
    return _write(verification_document(trace, market), path)
