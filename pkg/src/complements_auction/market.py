"""Market model: agents, primitive contracts, valuations, prices, outcomes.

Bundles (sets of contract ids) are ``frozenset`` values at the public
interface. Inside an agent's valuation table a bundle is encoded as a bitmask
over that agent's own contracts, taken in the instance's declared order:
bit ``j`` stands for ``instance.contracts_of(agent)[j]``.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import InstanceError

Bundle = frozenset


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


@dataclass(frozen=True)
class Market:
    """Agents and primitive contracts with their participant sets.

    This is the part of an instance the equilibrium verifier needs; it
    carries no valuations, so demand reports can be checked on their own.
    Participants of each contract are stored in declared agent order.
    """

    agents: tuple[str, ...]
    contracts: tuple[str, ...]
    participants: Mapping[str, tuple[str, ...]]
    _agent_contracts: Mapping[str, tuple[str, ...]] = field(
        init=False, repr=False, compare=False
    )
    _agent_pos: Mapping[str, int] = field(init=False, repr=False, compare=False)
    _contract_pos: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        agents = tuple(self.agents)
        contracts = tuple(self.contracts)
        if len(set(agents)) != len(agents):
            raise InstanceError("duplicate agent id", "agents")
        if len(set(contracts)) != len(contracts):
            raise InstanceError("duplicate contract id", "contracts")
        for a in agents:
            if not isinstance(a, str):
                raise InstanceError(f"agent id {a!r} is not a string", "agents")
        agent_pos = {a: k for k, a in enumerate(agents)}
        if set(self.participants) != set(contracts):
            extra = sorted(set(self.participants) ^ set(contracts))
            raise InstanceError(f"participant map does not match contracts: {extra}")
        parts = {}
        for w in contracts:
            members = list(self.participants[w])
            for a in members:
                if a not in agent_pos:
                    raise InstanceError(f"unknown agent {a!r}", f"contracts.{w}")
            if len(set(members)) != len(members):
                raise InstanceError("duplicate participant", f"contracts.{w}")
            if len(members) < 2:
                raise InstanceError(
                    "a contract needs at least 2 participants", f"contracts.{w}"
                )
            parts[w] = tuple(sorted(members, key=agent_pos.__getitem__))
        own = {a: tuple(w for w in contracts if a in parts[w]) for a in agents}
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "contracts", contracts)
        object.__setattr__(self, "participants", MappingProxyType(parts))
        object.__setattr__(self, "_agent_contracts", MappingProxyType(own))
        object.__setattr__(self, "_agent_pos", MappingProxyType(agent_pos))
        object.__setattr__(
            self,
            "_contract_pos",
            MappingProxyType({w: k for k, w in enumerate(contracts)}),
        )

    def contracts_of(self, agent: str) -> tuple[str, ...]:
        """The contracts ``agent`` participates in, in declared order."""
        try:
            return self._agent_contracts[agent]
        except KeyError:
            raise InstanceError(f"unknown agent {agent!r}") from None

    def has_agent(self, agent: str) -> bool:
        return agent in self._agent_pos

    def has_contract(self, contract: str) -> bool:
        return contract in self._contract_pos

    def agent_order(self, agent: str) -> int:
        return self._agent_pos[agent]

    def contract_order(self, contract: str) -> int:
        return self._contract_pos[contract]

    def pairs(self) -> tuple[tuple[str, str], ...]:
        """The index set of price vectors: (agent, contract) with agent in N(contract)."""
        return tuple((a, w) for w in self.contracts for a in self.participants[w])

    def sorted_contracts(self, bundle: Iterable[str]) -> list[str]:
        return sorted(bundle, key=self._contract_pos.__getitem__)

    def sorted_agents(self, agents: Iterable[str]) -> list[str]:
        return sorted(agents, key=self._agent_pos.__getitem__)

    def bundle_key(self, bundle: Iterable[str]) -> tuple[int, tuple[int, ...]]:
        """Canonical sort key: cardinality, then declared-order lexicographic."""
        idx = tuple(sorted(self._contract_pos[w] for w in bundle))
        return (len(idx), idx)

    def restrict(self, bundle: Iterable[str], agent: str) -> frozenset[str]:
        """The part of ``bundle`` that involves ``agent``."""
        own = set(self.contracts_of(agent))
        return frozenset(w for w in bundle if w in own)

    def check_bundle(self, bundle: Iterable[str]) -> frozenset[str]:
        bundle = frozenset(bundle)
        unknown = [w for w in bundle if w not in self._contract_pos]
        if unknown:
            raise InstanceError(f"unknown contract id(s) {sorted(unknown)}")
        return bundle


@dataclass(frozen=True)
class SynergyValuation:
    """Additive per-contract values plus nonnegative bonuses on whole sets.

    ``v(S) = sum(additive[w] for w in S) + sum(b for T, b in bonuses if T <= S)``.
    Each bonus term is the indicator of ``T <= S`` scaled by ``b >= 0``, which
    is supermodular, so the whole valuation is supermodular.
    """

    additive: Mapping[str, int]
    bonuses: tuple[tuple[frozenset[str], int], ...] = ()

    def __post_init__(self):
        for w, a in self.additive.items():
            if not _is_int(a):
                raise InstanceError(f"additive value for {w!r} is not an integer")
        for members, b in self.bonuses:
            if not _is_int(b) or b < 0:
                raise InstanceError(f"bonus on {sorted(members)} must be a nonnegative integer")
        object.__setattr__(self, "additive", MappingProxyType(dict(self.additive)))
        object.__setattr__(
            self, "bonuses", tuple((frozenset(t), int(b)) for t, b in self.bonuses)
        )

    def table(self, own: tuple[str, ...]) -> tuple[int, ...]:
        """Expand to a full table indexed by bitmask over ``own``."""
        pos = {w: j for j, w in enumerate(own)}
        missing = [w for w in own if w not in self.additive]
        if missing:
            raise InstanceError(f"additive values missing for {missing}")
        extra = [w for w in self.additive if w not in pos]
        if extra:
            raise InstanceError(f"additive values for non-participated contracts {extra}")
        values = np.zeros(1, dtype=np.int64)
        for w in own:
            values = np.concatenate([values, values + int(self.additive[w])])
        masks = np.arange(1 << len(own), dtype=np.int64)
        for members, b in self.bonuses:
            if not members <= pos.keys():
                raise InstanceError(f"bonus set {sorted(members)} leaves the agent's contracts")
            need = sum(1 << pos[w] for w in members)
            values = values + b * ((masks & need) == need)
        return tuple(int(x) for x in values)


@dataclass(frozen=True)
class MarketInstance(Market):
    """A market with a complete integer valuation table for every agent.

    ``tables[agent][mask]`` is the agent's value for the bundle encoded by
    ``mask`` over ``contracts_of(agent)``. ``synergy`` remembers which agents
    were specified in synergy form so files can be written back unchanged.
    """

    tables: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    synergy: Mapping[str, SynergyValuation] = field(default_factory=dict)
    _arrays: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        super().__post_init__()
        tables = {}
        for a in self.agents:
            if a not in self.tables:
                raise InstanceError("valuation missing", f"valuations.{a}")
            t = tuple(self.tables[a])
            n = len(self.contracts_of(a))
            if len(t) != 1 << n:
                raise InstanceError(
                    f"table has {len(t)} entries, expected {1 << n}", f"valuations.{a}"
                )
            if not all(_is_int(x) for x in t):
                raise InstanceError("valuations must be integers", f"valuations.{a}")
            tables[a] = tuple(int(x) for x in t)
        extra = set(self.tables) - set(self.agents)
        if extra:
            raise InstanceError(f"valuations for unknown agents {sorted(extra)}", "valuations")
        object.__setattr__(self, "tables", MappingProxyType(tables))
        object.__setattr__(self, "synergy", MappingProxyType(dict(self.synergy)))

    @classmethod
    def build(
        cls,
        agents: Iterable[str],
        contracts: Mapping[str, Iterable[str]],
        valuations: Mapping[str, Mapping[Iterable[str], int] | SynergyValuation],
    ) -> MarketInstance:
        """Construct from a participant map and per-agent valuations.

        Each valuation is either a ``SynergyValuation`` or a mapping from
        bundles (any iterable of contract ids) to integers that must cover
        every subset of the agent's contracts exactly once.
        """
        market = Market(tuple(agents), tuple(contracts), dict(contracts))
        tables, synergy = {}, {}
        for a in market.agents:
            if a not in valuations:
                raise InstanceError("valuation missing", f"valuations.{a}")
            given = valuations[a]
            own = market.contracts_of(a)
            if isinstance(given, SynergyValuation):
                tables[a] = given.table(own)
                synergy[a] = given
            else:
                tables[a] = table_from_mapping(a, own, given)
        return cls(
            market.agents, market.contracts, dict(market.participants), tables, synergy
        )

    def array(self, agent: str) -> np.ndarray:
        """Read-only int64 view of the agent's valuation table."""
        arr = self._arrays.get(agent)
        if arr is None:
            arr = np.asarray(self.tables[agent], dtype=np.int64)
            arr.flags.writeable = False
            self._arrays[agent] = arr
        return arr

    def mask(self, agent: str, bundle: Iterable[str]) -> int:
        own = self.contracts_of(agent)
        m = 0
        for w in bundle:
            try:
                m |= 1 << own.index(w)
            except ValueError:
                raise InstanceError(
                    f"agent {agent!r} does not participate in contract {w!r}"
                ) from None
        return m

    def bundle(self, agent: str, mask: int) -> frozenset[str]:
        own = self.contracts_of(agent)
        return frozenset(w for j, w in enumerate(own) if mask >> j & 1)

    def valuation(self, agent: str, bundle: Iterable[str]) -> int:
        return self.tables[agent][self.mask(agent, bundle)]


def table_from_mapping(
    agent: str, own: tuple[str, ...], entries: Mapping[Iterable[str], int]
) -> tuple[int, ...]:
    """Turn a bundle -> value mapping into a complete bitmask-indexed table."""
    pos = {w: j for j, w in enumerate(own)}
    table: list[int | None] = [None] * (1 << len(own))
    for key, value in entries.items():
        members = [key] if isinstance(key, str) else list(key)
        m = 0
        for w in members:
            if w not in pos:
                raise InstanceError(
                    f"set {sorted(members)} contains {w!r}, not a contract of {agent!r}",
                    f"valuations.{agent}",
                )
            m |= 1 << pos[w]
        if table[m] is not None:
            raise InstanceError(f"duplicate entry for set {sorted(members)}", f"valuations.{agent}")
        if not _is_int(value):
            raise InstanceError(
                f"value for set {sorted(members)} is not an integer", f"valuations.{agent}"
            )
        table[m] = int(value)
    for m, value in enumerate(table):
        if value is None:
            missing = [w for j, w in enumerate(own) if m >> j & 1]
            raise InstanceError(
                f"valuation table of agent {agent!r} is missing subset {missing}",
                f"valuations.{agent}",
            )
    return tuple(table)


@dataclass(frozen=True)
class PriceVector:
    """Integer price for every (agent, contract) participation pair.

    ``entries[(agent, contract)]`` is what ``agent`` pays in ``contract``;
    negative values are receipts.
    """

    entries: Mapping[tuple[str, str], int]

    def __post_init__(self):
        for key, value in self.entries.items():
            if not _is_int(value):
                raise InstanceError(f"price {key} = {value!r} is not an integer")
        object.__setattr__(
            self,
            "entries",
            MappingProxyType({k: int(v) for k, v in self.entries.items()}),
        )

    @classmethod
    def zeros(cls, market: Market) -> PriceVector:
        return cls({pair: 0 for pair in market.pairs()})

    @classmethod
    def from_contracts(
        cls, market: Market, prices: Mapping[str, Mapping[str, int]]
    ) -> PriceVector:
        """Build from a ``{contract: {agent: price}}`` map, in canonical pair order."""
        entries = {}
        for w, row in prices.items():
            for a, p in row.items():
                entries[(a, w)] = p
        ordered = {pair: entries.pop(pair) for pair in market.pairs() if pair in entries}
        ordered.update(entries)
        return cls(ordered)

    def __getitem__(self, pair: tuple[str, str]) -> int:
        return self.entries[pair]

    def for_agent(self, agent: str) -> dict[str, int]:
        return {w: p for (a, w), p in self.entries.items() if a == agent}

    def by_contract(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for (a, w), p in self.entries.items():
            out.setdefault(w, {})[a] = p
        return out

    def shifted(self, deltas: Mapping[tuple[str, str], int]) -> PriceVector:
        unknown = [k for k in deltas if k not in self.entries]
        if unknown:
            raise InstanceError(f"price coordinates outside the domain: {unknown}")
        return PriceVector(
            {k: v + deltas.get(k, 0) for k, v in self.entries.items()}
        )


@dataclass(frozen=True)
class BalanceReport:
    """Result of ``validate_balanced``; truthy when the vector is balanced."""

    unbalanced: Mapping[str, int] = field(default_factory=dict)
    outside_domain: tuple[tuple[str, str], ...] = ()
    missing: tuple[tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not (self.unbalanced or self.outside_domain or self.missing)

    def __bool__(self) -> bool:
        return self.ok

    def messages(self) -> list[str]:
        out = [f"contract {w} unbalanced: sum {s}" for w, s in self.unbalanced.items()]
        out += [f"agent {a} does not participate in contract {w}" for a, w in self.outside_domain]
        out += [f"price missing for agent {a} in contract {w}" for a, w in self.missing]
        return out


@dataclass(frozen=True)
class Outcome:
    """Signed contracts with their transfers; ``signed[w][agent]`` is agent's payment."""

    signed: Mapping[str, Mapping[str, int]]

    def __post_init__(self):
        frozen = {}
        for w, row in self.signed.items():
            for a, t in row.items():
                if not _is_int(t):
                    raise InstanceError(f"transfer {t!r} of {a!r} in {w!r} is not an integer")
            total = sum(row.values())
            if total != 0:
                raise InstanceError(f"transfers of contract {w} sum to {total}, not 0")
            frozen[w] = MappingProxyType({a: int(t) for a, t in row.items()})
        object.__setattr__(self, "signed", MappingProxyType(frozen))

    @property
    def contracts(self) -> frozenset[str]:
        return frozenset(self.signed)

    def to_dict(self) -> dict[str, dict[str, int]]:
        return {w: dict(row) for w, row in self.signed.items()}


def utility(
    instance: MarketInstance,
    agent: str,
    bundle: Iterable[str],
    prices: Mapping[str, int] | PriceVector,
) -> int:
    """Value of ``bundle`` to ``agent`` minus what the agent pays for it."""
    if not instance.has_agent(agent):
        raise InstanceError(f"unknown agent {agent!r}")
    if isinstance(prices, PriceVector):
        prices = prices.for_agent(agent)
    bundle = frozenset(bundle)
    value = instance.valuation(agent, bundle)
    try:
        return value - sum(prices[w] for w in bundle)
    except KeyError as exc:
        raise InstanceError(f"no price for agent {agent!r} in contract {exc.args[0]!r}") from None


def aggregate_valuation(instance: MarketInstance, contracts: Iterable[str]) -> int:
    """Sum over agents of each agent's value for its share of ``contracts``."""
    bundle = instance.check_bundle(contracts)
    return sum(
        instance.valuation(a, instance.restrict(bundle, a)) for a in instance.agents
    )


def validate_balanced(market: Market, prices: PriceVector) -> BalanceReport:
    """Report contracts whose prices do not sum to zero and domain mismatches."""
    domain = set(market.pairs())
    outside = tuple(k for k in prices.entries if k not in domain)
    missing = tuple(k for k in market.pairs() if k not in prices.entries)
    sums = {}
    for w in market.contracts:
        total = sum(prices.entries.get((a, w), 0) for a in market.participants[w])
        if total != 0:
            sums[w] = total
    return BalanceReport(MappingProxyType(sums), outside, missing)
