"""Seeded random markets whose valuations are supermodular by construction."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .market import Market, MarketInstance, PriceVector, SynergyValuation


@dataclass(frozen=True)
class GeneratorParams:
    agents: int = 3
    contracts: int = 4
    max_participants: int = 2
    value_range: tuple[int, int] = (-10, 10)
    synergy_density: float = 0.3
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.value_range
        if self.agents < 2:
            raise ValueError("every contract needs two participants, so at least 2 agents")
        if self.max_participants < 2:
            raise ValueError("max_participants must be at least 2")
        if self.contracts < 0:
            raise ValueError("contracts must be nonnegative")
        if lo > hi:
            raise ValueError(f"empty value range {lo}:{hi}")
        if not 0.0 <= self.synergy_density <= 1.0:
            raise ValueError("synergy_density must lie in [0, 1]")


def generate(params: GeneratorParams) -> MarketInstance:
    """Random market; same params (seed included) give the same instance.

    Each contract gets 2..max_participants distinct participants. An agent's
    valuation is an additive value per contract drawn from ``value_range``
    plus, for each subset of two or more of its contracts, a positive bonus
    with probability ``synergy_density``. v(empty) is 0.
    """
    rng = np.random.default_rng(params.seed)
    agents = [f"a{k + 1}" for k in range(params.agents)]
    contracts = {}
    top = min(params.max_participants, params.agents)
    for k in range(params.contracts):
        size = int(rng.integers(2, top + 1))
        members = sorted(int(x) for x in rng.choice(params.agents, size=size, replace=False))
        contracts[f"w{k + 1}"] = [agents[x] for x in members]
    market = Market(tuple(agents), tuple(contracts), contracts)

    lo, hi = params.value_range
    bonus_top = max(1, (hi - lo) // 2)
    valuations = {}
    for a in agents:
        own = market.contracts_of(a)
        additive = {w: int(rng.integers(lo, hi + 1)) for w in own}
        bonuses = []
        for size in range(2, len(own) + 1):
            for members in combinations(own, size):
                if rng.random() < params.synergy_density:
                    bonuses.append((frozenset(members), int(rng.integers(1, bonus_top + 1))))
        valuations[a] = SynergyValuation(additive, tuple(bonuses))
    return MarketInstance.build(agents, contracts, valuations)


def random_balanced_prices(
    market: Market, rng: np.random.Generator, low: int = -10, high: int = 10
) -> PriceVector:
    """Uniformly drawn integer prices in [low, high] summing to zero per contract.

    All but one participant's price is drawn; the last one balances the
    contract and the draw is repeated until it also lands in range.
    """
    if not low <= 0 <= high:
        raise ValueError("balanced prices need 0 inside [low, high]")
    entries = {}
    for w in market.contracts:
        parts = market.participants[w]
        while True:
            head = [int(x) for x in rng.integers(low, high + 1, size=len(parts) - 1)]
            last = -sum(head)
            if low <= last <= high:
                break
        for a, p in zip(parts, head + [last]):
            entries[(a, w)] = p
    return PriceVector({pair: entries[pair] for pair in market.pairs()})
