"""Level-by-level check of whether a balanced price vector supports an equilibrium.

Starting from all contracts, each level computes every agent's largest demand
set confined to the surviving contracts and collects the contracts on which
two participants disagree (one demands it at this level, another does not).
No disagreement means equilibrium; a disagreement on a contract some agent
demands in every demand set means non-equilibrium; otherwise the disputed
contracts are removed and the next level starts.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from functools import reduce

from .demand import DemandReport, confined_largest
from .errors import (
    AuctionInvariantError,
    ConfinementEmpty,
    GrossComplementsViolation,
    InstanceError,
    VerdictError,
)
from .market import Market, Outcome, PriceVector


@dataclass(frozen=True)
class Level:
    """One step of the verification.

    ``witnesses[w]`` is the first pair ``(j, j2)`` of participants of ``w``
    (declared order) with ``w`` in ``confined[j]`` but not in ``confined[j2]``.
    """

    k: int
    remaining: frozenset[str]
    confined: Mapping[str, frozenset[str]]
    disputed: frozenset[str]
    witnesses: Mapping[str, tuple[str, str]]


@dataclass(frozen=True)
class Equilibrium:
    support: frozenset[str]


@dataclass(frozen=True)
class NonEquilibrium:
    level: int
    witness: frozenset[str]


@dataclass(frozen=True)
class VerificationTrace:
    strongly_demanded: frozenset[str]
    levels: tuple[Level, ...]
    verdict: Equilibrium | NonEquilibrium

    @property
    def is_equilibrium(self) -> bool:
        return isinstance(self.verdict, Equilibrium)

    @property
    def final_level(self) -> int:
        return len(self.levels)

    def level(self, k: int) -> Level:
        """Level ``k`` (1-based, as in the procedure)."""
        return self.levels[k - 1]


def strongly_demanded(reports: Mapping[str, DemandReport], market: Market) -> frozenset[str]:
    """Contracts that some agent keeps in every one of its demand sets."""
    return reduce(
        frozenset.union,
        (reports[a].smallest for a in market.agents),
        frozenset(),
    )


def _check_reports(reports: Mapping[str, DemandReport], market: Market) -> None:
    missing = [a for a in market.agents if a not in reports]
    if missing:
        raise InstanceError(f"demand reports missing for agents {missing}")
    extra = [a for a in reports if not market.has_agent(a)]
    if extra:
        raise InstanceError(f"demand reports for unknown agents {extra}")


def verify(reports: Mapping[str, DemandReport], market: Market) -> VerificationTrace:
    """Run the level procedure on the agents' demand reports.

    Raises
    ------
    GrossComplementsViolation
        If at some level an agent has no demand set inside the surviving
        contracts, which gross-complement reports never produce.
    """
    _check_reports(reports, market)
    strong = strongly_demanded(reports, market)
    remaining = frozenset(market.contracts)
    levels: list[Level] = []
    for k in range(1, len(market.contracts) + 2):
        try:
            confined = {a: confined_largest(reports[a], remaining) for a in market.agents}
        except ConfinementEmpty as exc:
            raise GrossComplementsViolation(
                f"reports violate gross complementarity at level {k}: {exc}"
            ) from exc
        witnesses = {}
        for w in market.contracts:
            if w not in remaining:
                continue
            parts = market.participants[w]
            takers = [j for j in parts if w in confined[j]]
            refusers = [j for j in parts if w not in confined[j]]
            if takers and refusers:
                witnesses[w] = (takers[0], refusers[0])
        disputed = frozenset(witnesses)
        levels.append(Level(k, remaining, confined, disputed, witnesses))
        if not disputed:
            support = reduce(frozenset.union, confined.values(), frozenset())
            return VerificationTrace(strong, tuple(levels), Equilibrium(support))
        if disputed & strong:
            return VerificationTrace(
                strong, tuple(levels), NonEquilibrium(k, disputed & strong)
            )
        remaining = remaining - disputed
    raise AuctionInvariantError("verification did not terminate within |contracts| + 1 levels")


def equilibrium_outcome(trace: VerificationTrace, prices: PriceVector) -> Outcome:
    """Sign the equilibrium support with transfers equal to the prices."""
    if not trace.is_equilibrium:
        raise VerdictError("equilibrium_outcome needs an Equilibrium verdict")
    signed = {}
    for (a, w), p in prices.entries.items():
        if w in trace.verdict.support:
            signed.setdefault(w, {})[a] = p
    return Outcome(signed)
