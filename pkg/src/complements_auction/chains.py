"""Complements chains at a non-equilibrium price vector.

A chain ``i1 w1 i2 w2 ... ws i(s+1)`` links, level by level, a contract its
left agent refuses to a contract its right agent always demands. It is built
backwards from the terminating level of the verification: start at a
strongly demanded disputed contract, pick a participant who refuses it, then
step down one level to a disputed contract that this agent never signs the
current one without, and so on down to level 1.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .demand import DemandReport, anchored_intersection
from .errors import AnchorNotDemanded, GrossComplementsViolation, VerdictError
from .market import Market
from .verifier import NonEquilibrium, VerificationTrace


@dataclass(frozen=True)
class ComplementsChain:
    """``agents`` has one more entry than ``contracts``; contract ``l`` sits
    between ``agents[l]`` (who refuses it) and ``agents[l + 1]`` (who takes it)."""

    agents: tuple[str, ...]
    contracts: tuple[str, ...]

    def __post_init__(self):
        if len(self.contracts) < 1 or len(self.agents) != len(self.contracts) + 1:
            raise ValueError("a chain alternates agents and contracts, starting and ending with an agent")

    @property
    def length(self) -> int:
        return len(self.contracts)

    @property
    def agent_set(self) -> frozenset[str]:
        return frozenset(self.agents)

    @property
    def terminal(self) -> str:
        return self.agents[-1]

    def links(self) -> list[str]:
        out = [self.agents[0]]
        for w, a in zip(self.contracts, self.agents[1:]):
            out += [w, a]
        return out

    def steps(self) -> list[tuple[str, str, str]]:
        """``(left agent, contract, right agent)`` for each contract."""
        return [
            (self.agents[l], w, self.agents[l + 1]) for l, w in enumerate(self.contracts)
        ]

    def __str__(self) -> str:
        return " ".join(self.links())


def _require_non_equilibrium(trace: VerificationTrace) -> NonEquilibrium:
    if trace.is_equilibrium:
        raise VerdictError("complements chains exist only at non-equilibrium prices")
    return trace.verdict


def find_chain(
    trace: VerificationTrace,
    reports: Mapping[str, DemandReport],
    market: Market,
    excluded: Iterable[str] = (),
) -> ComplementsChain | None:
    """Backward construction with depth-first backtracking.

    Every choice point is tried in declared order (contracts, then agents).
    Agents in ``excluded`` may not appear anywhere in the chain; an agent may
    otherwise occur several times. Returns ``None`` when every branch dead-ends.
    """
    verdict = _require_non_equilibrium(trace)
    excluded = frozenset(excluded)
    s = verdict.level
    allowed = [a for a in market.agents if a not in excluded]

    def descend(l: int, w: str, right: str, tail_agents: list[str], tail_contracts: list[str]):
        # w is the level-l contract; choose its refusing agent, then w at l-1
        level = trace.level(l)
        for left in allowed:
            if left == right or left not in market.participants[w]:
                continue
            if w in level.confined[left]:
                continue
            agents = [left] + tail_agents
            contracts = [w] + tail_contracts
            if l == 1:
                return ComplementsChain(tuple(agents), tuple(contracts))
            try:
                anchor = anchored_intersection(reports[left], w)
            except AnchorNotDemanded:
                continue
            lower = trace.level(l - 1)
            for w_prev in market.contracts:
                if w_prev not in lower.disputed or w_prev not in anchor:
                    continue
                if w_prev not in lower.confined[left]:
                    continue
                found = descend(l - 1, w_prev, left, agents, contracts)
                if found is not None:
                    return found
        return None

    top = trace.level(s)
    for w in market.contracts:
        if w not in verdict.witness:
            continue
        for end in allowed:
            if end not in market.participants[w] or w not in reports[end].smallest:
                continue
            if w not in top.confined[end]:
                continue
            found = descend(s, w, end, [end], [])
            if found is not None:
                return found
    return None


def find_disjoint_chains(
    trace: VerificationTrace, reports: Mapping[str, DemandReport], market: Market
) -> list[ComplementsChain]:
    """Greedily collect chains whose agent sets are pairwise disjoint."""
    _require_non_equilibrium(trace)
    chains: list[ComplementsChain] = []
    used: set[str] = set()
    while True:
        chain = find_chain(trace, reports, market, used)
        if chain is None:
            break
        chains.append(chain)
        used |= chain.agent_set
    if not chains:
        raise GrossComplementsViolation(
            "no complements chain at a non-equilibrium price vector; "
            "reports are not gross complements"
        )
    return chains


def chain_violations(
    chain: ComplementsChain,
    trace: VerificationTrace,
    reports: Mapping[str, DemandReport],
    market: Market,
) -> list[str]:
    """Every way ``chain`` fails the definition of a complements chain (empty if valid)."""
    problems = []
    if trace.is_equilibrium:
        return ["trace verdict is Equilibrium"]
    s = trace.verdict.level
    if chain.length != s:
        problems.append(f"chain has {chain.length} contracts, verification stopped at level {s}")
        return problems
    if len(set(chain.contracts)) != len(chain.contracts):
        problems.append("contracts repeat")
    for l, (left, w, right) in enumerate(chain.steps(), start=1):
        level = trace.level(l)
        if left == right:
            problems.append(f"adjacent agents equal at position {l}")
        if left not in market.participants[w] or right not in market.participants[w]:
            problems.append(f"{w} is not shared by {left} and {right}")
            continue
        if w not in level.disputed:
            problems.append(f"{w} is not disputed at level {l}")
        if w in level.confined[left]:
            problems.append(f"{left} demands {w} at level {l}")
        if w not in level.confined[right]:
            problems.append(f"{right} does not demand {w} at level {l}")
        if l >= 2:
            prev = chain.contracts[l - 2]
            try:
                anchor = anchored_intersection(reports[left], w)
            except AnchorNotDemanded:
                problems.append(f"{w} is in no demand set of {left}")
            else:
                if prev not in anchor:
                    problems.append(f"{prev} is not a complement to {w} for {left}")
    last = chain.contracts[-1]
    if last not in trace.strongly_demanded:
        problems.append(f"{last} is not strongly demanded")
    if last not in reports[chain.terminal].smallest:
        problems.append(f"{chain.terminal} does not demand {last} in every demand set")
    return problems
