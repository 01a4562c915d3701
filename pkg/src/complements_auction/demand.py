"""Demand correspondences, indirect utilities and the Lyapunov function.

Demand is computed exactly by enumerating every subset of the agent's
contracts. Utilities of all ``2**n`` bundles are formed in one vectorised
pass: the price of each bundle is built by doubling (bundles without contract
``j`` followed by the same bundles with ``j`` added), which lines up with the
bitmask encoding of the valuation table.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import AnchorNotDemanded, ConfinementEmpty, EnumerationCapError, InstanceError
from .market import Market, MarketInstance, PriceVector

ENUMERATION_CAP = 20


@dataclass(frozen=True)
class DemandReport:
    """All demand sets of one agent, canonically ordered.

    ``optimum`` is the indirect utility; it is ``None`` for reports that were
    supplied directly (e.g. read from a reports file) rather than computed
    from a valuation.
    """

    agent: str
    demand_sets: tuple[frozenset[str], ...]
    optimum: int | None = None

    def __post_init__(self):
        if not self.demand_sets:
            raise InstanceError(f"demand report of {self.agent!r} is empty")

    @classmethod
    def from_sets(
        cls,
        market: Market,
        agent: str,
        sets: Iterable[Iterable[str]],
        optimum: int | None = None,
    ) -> DemandReport:
        own = set(market.contracts_of(agent))
        unique = {frozenset(s) for s in sets}
        for s in unique:
            if not s <= own:
                raise InstanceError(
                    f"demand set {market.sorted_contracts(s)} of {agent!r} "
                    "contains contracts the agent does not participate in"
                )
        ordered = tuple(sorted(unique, key=market.bundle_key))
        return cls(agent, ordered, optimum)

    @property
    def largest(self) -> frozenset[str]:
        return reduce(frozenset.union, self.demand_sets)

    @property
    def smallest(self) -> frozenset[str]:
        return reduce(frozenset.intersection, self.demand_sets)

    def __contains__(self, bundle) -> bool:
        return frozenset(bundle) in set(self.demand_sets)


def bundle_prices(prices: Mapping[str, int], own: tuple[str, ...]) -> np.ndarray:
    """Total price of every bundle over ``own``, indexed by bitmask."""
    cost = np.zeros(1, dtype=np.int64)
    for w in own:
        cost = np.concatenate([cost, cost + int(prices[w])])
    return cost


def _agent_prices(agent: str, own, prices) -> Mapping[str, int]:
    if isinstance(prices, PriceVector):
        prices = prices.for_agent(agent)
    missing = [w for w in own if w not in prices]
    if missing:
        raise InstanceError(f"no price for agent {agent!r} in contracts {missing}")
    return prices


def utilities(
    instance: MarketInstance,
    agent: str,
    prices: Mapping[str, int] | PriceVector,
    *,
    cap: int = ENUMERATION_CAP,
) -> np.ndarray:
    """Utility of every bundle of ``agent`` (bitmask-indexed int64 array)."""
    own = instance.contracts_of(agent)
    if len(own) > cap:
        raise EnumerationCapError(
            f"agent {agent!r} has {len(own)} contracts; enumeration cap is {cap}"
        )
    prices = _agent_prices(agent, own, prices)
    return instance.array(agent) - bundle_prices(prices, own)


def demand(
    instance: MarketInstance,
    agent: str,
    prices: Mapping[str, int] | PriceVector,
    *,
    cap: int = ENUMERATION_CAP,
) -> DemandReport:
    """Every utility-maximising bundle of ``agent`` and the maximum utility."""
    u = utilities(instance, agent, prices, cap=cap)
    best = int(u.max())
    masks = np.flatnonzero(u == best)
    sets = [instance.bundle(agent, int(m)) for m in masks]
    return DemandReport(agent, tuple(sorted(sets, key=instance.bundle_key)), best)


def demand_reports(
    instance: MarketInstance, prices: PriceVector, *, cap: int = ENUMERATION_CAP
) -> dict[str, DemandReport]:
    """Demand report of every agent, keyed in declared agent order."""
    return {a: demand(instance, a, prices, cap=cap) for a in instance.agents}


def largest_and_smallest(report: DemandReport) -> tuple[frozenset[str], frozenset[str]]:
    """Union and intersection of the agent's demand sets."""
    return report.largest, report.smallest


def confined_largest(report: DemandReport, allowed: Iterable[str]) -> frozenset[str]:
    """Union of the demand sets that lie inside ``allowed``.

    Raises
    ------
    ConfinementEmpty
        If no demand set is contained in ``allowed``. With gross-complement
        reports this cannot happen on any level the verifier reaches.
    """
    allowed = frozenset(allowed)
    inside = [s for s in report.demand_sets if s <= allowed]
    if not inside:
        raise ConfinementEmpty(
            f"no demand set of agent {report.agent!r} lies inside {sorted(allowed)}"
        )
    return reduce(frozenset.union, inside)


def anchored_intersection(report: DemandReport, contract: str) -> frozenset[str]:
    """Intersection of the demand sets that contain ``contract``.

    Its members are exactly the contracts the agent never signs ``contract``
    without.
    """
    holding = [s for s in report.demand_sets if contract in s]
    if not holding:
        raise AnchorNotDemanded(
            f"contract {contract!r} is in no demand set of agent {report.agent!r}"
        )
    return reduce(frozenset.intersection, holding)


def indirect_utility(
    instance: MarketInstance, agent: str, prices: Mapping[str, int] | PriceVector
) -> int:
    return int(utilities(instance, agent, prices).max())


def lyapunov(
    instance: MarketInstance,
    prices: PriceVector,
    reports: Mapping[str, DemandReport] | None = None,
) -> int:
    """Sum of all agents' indirect utilities at ``prices``.

    Pass ``reports`` to reuse already computed demand reports.
    """
    if reports is not None:
        return sum(reports[a].optimum for a in instance.agents)
    return sum(indirect_utility(instance, a, prices) for a in instance.agents)
