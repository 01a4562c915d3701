"""The dynamic auction: collect demands, verify, adjust prices along chains.

Each round every agent reports its full demand correspondence at the current
prices. If the verifier finds an equilibrium the auction stops with the
corresponding stable outcome. Otherwise the auctioneer collects complements
chains with pairwise disjoint agents and, along every chain, lowers the
price of each contract for the agent on its left by one and raises it for
the agent on its right by one. Every chain lowers the Lyapunov value by
exactly one, which bounds the number of rounds.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .chains import ComplementsChain, find_disjoint_chains
from .demand import ENUMERATION_CAP, demand_reports, lyapunov
from .errors import (
    AuctionInvariantError,
    ChainError,
    GrossComplementsViolation,
    UnbalancedPricesError,
)
from .market import MarketInstance, Outcome, PriceVector, aggregate_valuation, validate_balanced
from .oracles import ORACLE_CAP, efficient_sets, is_supermodular
from .verifier import VerificationTrace, equilibrium_outcome, verify

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoundRecord:
    index: int
    prices: PriceVector
    demand_counts: Mapping[str, int]
    optima: Mapping[str, int]
    verification: VerificationTrace
    chains: tuple[ComplementsChain, ...]
    lyapunov: int


@dataclass(frozen=True)
class AuctionTrace:
    rounds: tuple[RoundRecord, ...]
    result: Outcome

    @property
    def total_rounds(self) -> int:
        return len(self.rounds)

    @property
    def final_prices(self) -> PriceVector:
        return self.rounds[-1].prices

    @property
    def lyapunov_values(self) -> list[int]:
        return [r.lyapunov for r in self.rounds]


def adjust_prices(prices: PriceVector, chains: Iterable[ComplementsChain]) -> PriceVector:
    """Shift prices by one unit along each chain.

    For every contract of a chain, the agent to its left (who does not want
    it) pays one less and the agent to its right (who wants it) pays one
    more, so each contract's prices still sum to zero.
    """
    chains = list(chains)
    seen: set[str] = set()
    for chain in chains:
        if seen & chain.agent_set:
            raise ChainError(f"chains share agents {sorted(seen & chain.agent_set)}")
        seen |= chain.agent_set
    deltas: dict[tuple[str, str], int] = {}
    for chain in chains:
        for left, w, right in chain.steps():
            for pair, d in (((left, w), -1), ((right, w), +1)):
                if pair not in prices.entries:
                    raise ChainError(f"price coordinate {pair} is outside the price domain")
                deltas[pair] = deltas.get(pair, 0) + d
    return prices.shifted(deltas)


def _lyapunov_floor(instance: MarketInstance) -> int:
    # any contract set's aggregate valuation bounds the Lyapunov function below
    if len(instance.contracts) <= ORACLE_CAP:
        return efficient_sets(instance).value
    return max(aggregate_valuation(instance, ()), aggregate_valuation(instance, instance.contracts))


def check_gross_complements(instance: MarketInstance) -> None:
    """Raise ``GrossComplementsViolation`` naming the first non-supermodular agent."""
    for a in instance.agents:
        check = is_supermodular(instance, a)
        if not check:
            phi, psi = check.witness
            raise GrossComplementsViolation(
                f"valuation of agent {a!r} is not supermodular "
                f"(witness {instance.sorted_contracts(phi)}, {instance.sorted_contracts(psi)})"
            )


def run_auction(
    instance: MarketInstance,
    initial: PriceVector | None = None,
    *,
    check_gc: bool = True,
    cap: int = ENUMERATION_CAP,
) -> AuctionTrace:
    """Run the auction from ``initial`` (all zeros by default) to a stable outcome.

    Raises
    ------
    UnbalancedPricesError
        If the initial prices do not sum to zero within some contract.
    GrossComplementsViolation
        If ``check_gc`` is set and some valuation is not supermodular.
    AuctionInvariantError
        If the Lyapunov accounting breaks or the round cap is exceeded.
    """
    prices = PriceVector.zeros(instance) if initial is None else initial
    balance = validate_balanced(instance, prices)
    if not balance:
        raise UnbalancedPricesError("; ".join(balance.messages()))
    if check_gc:
        check_gross_complements(instance)

    rounds: list[RoundRecord] = []
    max_rounds = None
    expected = None
    index = 0
    while True:
        index += 1
        reports = demand_reports(instance, prices, cap=cap)
        value = lyapunov(instance, prices, reports)
        if max_rounds is None:
            max_rounds = value - _lyapunov_floor(instance) + 1
        if expected is not None and value != expected:
            raise AuctionInvariantError(
                f"round {index}: Lyapunov value {value}, expected {expected}"
            )
        trace = verify(reports, instance)
        if trace.is_equilibrium:
            chains: tuple[ComplementsChain, ...] = ()
        else:
            chains = tuple(find_disjoint_chains(trace, reports, instance))
        rounds.append(
            RoundRecord(
                index,
                prices,
                {a: len(r.demand_sets) for a, r in reports.items()},
                {a: r.optimum for a, r in reports.items()},
                trace,
                chains,
                value,
            )
        )
        log.debug("round %d: lyapunov %d, %d chain(s)", index, value, len(chains))
        if trace.is_equilibrium:
            return AuctionTrace(tuple(rounds), equilibrium_outcome(trace, prices))
        if index >= max_rounds:
            raise AuctionInvariantError(f"no equilibrium within {max_rounds} rounds")
        prices = adjust_prices(prices, chains)
        expected = value - len(chains)
