"""Brute-force reference answers: efficiency, equilibrium, supermodularity,
gross complements and stability.

Everything here enumerates subsets directly and shares no code with the
verifier or the chain search, so the two can be checked against each other.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import combinations
from typing import Any

import numpy as np
from scipy.optimize import linprog

from .demand import utilities
from .errors import EnumerationCapError, GrossComplementsViolation, InstanceError
from .market import MarketInstance, Outcome, PriceVector, validate_balanced

ORACLE_CAP = 16
PAIRWISE_CAP = 10


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a yes/no check; truthy when the check passes."""

    ok: bool
    witness: Any = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


OK = CheckResult(True)


@dataclass(frozen=True)
class EfficientSets:
    value: int
    maximizers: tuple[frozenset[str], ...]
    largest: frozenset[str]


def _global_to_local(instance: MarketInstance, agent: str, masks: np.ndarray) -> np.ndarray:
    local = np.zeros_like(masks)
    for j, w in enumerate(instance.contracts_of(agent)):
        local |= ((masks >> instance.contract_order(w)) & 1) << j
    return local


def _global_bundle(instance: MarketInstance, mask: int) -> frozenset[str]:
    return frozenset(w for k, w in enumerate(instance.contracts) if mask >> k & 1)


def _global_key(mask: int) -> tuple[int, tuple[int, ...]]:
    idx = tuple(k for k in range(mask.bit_length()) if mask >> k & 1)
    return (len(idx), idx)


def _check_cap(instance: MarketInstance, cap: int) -> np.ndarray:
    m = len(instance.contracts)
    if m > cap:
        raise EnumerationCapError(f"{m} contracts exceed the oracle enumeration cap {cap}")
    return np.arange(1 << m, dtype=np.int64)


def efficient_sets(instance: MarketInstance, *, cap: int = ORACLE_CAP) -> EfficientSets:
    """Maximum aggregate valuation over all contract sets, its maximizers and their union."""
    masks = _check_cap(instance, cap)
    total = np.zeros(len(masks), dtype=np.int64)
    for a in instance.agents:
        total += instance.array(a)[_global_to_local(instance, a, masks)]
    best = int(total.max())
    winners = sorted((int(m) for m in np.flatnonzero(total == best)), key=_global_key)
    union = 0
    for m in winners:
        union |= m
    return EfficientSets(
        best,
        tuple(_global_bundle(instance, m) for m in winners),
        _global_bundle(instance, union),
    )


def is_equilibrium_price(
    instance: MarketInstance, prices: PriceVector, *, cap: int = ORACLE_CAP
) -> frozenset[str] | None:
    """First contract set (canonical order) every agent finds optimal at ``prices``."""
    masks = _check_cap(instance, cap)
    ok = np.ones(len(masks), dtype=bool)
    for a in instance.agents:
        u = utilities(instance, a, prices)
        optimal = u == u.max()
        ok &= optimal[_global_to_local(instance, a, masks)]
    found = np.flatnonzero(ok)
    if len(found) == 0:
        return None
    return _global_bundle(instance, min((int(m) for m in found), key=_global_key))


def is_supermodular(instance: MarketInstance, agent: str) -> CheckResult:
    """Local test: adding x and y together is worth at least adding them separately.

    On failure the witness is ``(S | {x}, S | {y})``, a pair violating the
    supermodular inequality.
    """
    v = instance.array(agent)
    n = len(instance.contracts_of(agent))
    masks = np.arange(1 << n, dtype=np.int64)
    for x, y in combinations(range(n), 2):
        bx, by = 1 << x, 1 << y
        base = masks[(masks & (bx | by)) == 0]
        bad = v[base | bx] + v[base | by] > v[base | bx | by] + v[base]
        if bad.any():
            s = int(base[np.argmax(bad)])
            return CheckResult(
                False,
                (instance.bundle(agent, s | bx), instance.bundle(agent, s | by)),
                f"v(S+x) + v(S+y) > v(S+x+y) + v(S) for agent {agent}",
            )
    return OK


def is_supermodular_pairwise(
    instance: MarketInstance, agent: str, *, cap: int = PAIRWISE_CAP
) -> CheckResult:
    """Definitional test over all pairs of bundles (slow; cross-check only)."""
    n = len(instance.contracts_of(agent))
    if n > cap:
        raise EnumerationCapError(f"pairwise supermodularity check capped at {cap} contracts")
    v = instance.array(agent)
    masks = np.arange(1 << n, dtype=np.int64)
    for a in range(1 << n):
        bad = v[a] + v > v[a | masks] + v[a & masks]
        if bad.any():
            b = int(np.argmax(bad))
            return CheckResult(
                False,
                (instance.bundle(agent, a), instance.bundle(agent, b)),
                f"supermodular inequality fails for agent {agent}",
            )
    return OK


def _demand_masks(instance: MarketInstance, agent: str, prices) -> set[int]:
    u = utilities(instance, agent, prices)
    return {int(m) for m in np.flatnonzero(u == u.max())}


def _check_dominance(instance, agent, p: Mapping[str, int], q: Mapping[str, int]) -> None:
    for w in instance.contracts_of(agent):
        if p[w] < q[w]:
            raise InstanceError(f"p >= q violated at contract {w!r}: {p[w]} < {q[w]}")


def check_antitone(
    instance: MarketInstance, agent: str, p: Mapping[str, int], q: Mapping[str, int]
) -> CheckResult:
    """For p >= q: meets of demand sets stay demanded at p, joins at q."""
    _check_dominance(instance, agent, p, q)
    dp = _demand_masks(instance, agent, p)
    dq = _demand_masks(instance, agent, q)
    for phi in sorted(dp):
        for psi in sorted(dq):
            if phi & psi not in dp or phi | psi not in dq:
                return CheckResult(
                    False,
                    (instance.bundle(agent, phi), instance.bundle(agent, psi)),
                    "meet not demanded at p" if phi & psi not in dp else "join not demanded at q",
                )
    return OK


def check_gc_lowering(
    instance: MarketInstance, agent: str, p: Mapping[str, int], q: Mapping[str, int]
) -> CheckResult:
    """For p >= q: every demand set at p has its unchanged-price part kept by some demand set at q."""
    _check_dominance(instance, agent, p, q)
    own = instance.contracts_of(agent)
    same = sum(1 << j for j, w in enumerate(own) if p[w] == q[w])
    dq = _demand_masks(instance, agent, q)
    for phi in sorted(_demand_masks(instance, agent, p)):
        kept = phi & same
        if not any(kept & psi == kept for psi in dq):
            return CheckResult(
                False,
                instance.bundle(agent, phi),
                "contracts with unchanged prices dropped from every demand set at q",
            )
    return OK


def antitone_counterexample(
    instance: MarketInstance, agent: str, witness: tuple[frozenset[str], frozenset[str]]
) -> tuple[dict[str, int], dict[str, int]]:
    """Prices ``p == q`` at which a local supermodularity witness breaks antitonicity.

    ``witness`` is ``(S | {x}, S | {y})``. Contracts in S get a large negative
    price, contracts outside S + x + y a large positive one, and x, y are
    priced at their marginal values over S. Then S, S + x and S + y are all
    optimal while S + x + y is not, so the join of two demand sets is not a
    demand set.
    """
    phi, psi = frozenset(witness[0]), frozenset(witness[1])
    base = phi & psi
    only_x, only_y = phi - psi, psi - phi
    if len(only_x) != 1 or len(only_y) != 1:
        raise ValueError("witness must differ from its meet by exactly one contract on each side")
    (x,), (y,) = only_x, only_y
    v = instance.array(agent)
    vs = instance.valuation(agent, base)
    px = instance.valuation(agent, phi) - vs
    py = instance.valuation(agent, psi) - vs
    big = int(v.max() - v.min()) + abs(px) + abs(py) + 1
    prices = {}
    for w in instance.contracts_of(agent):
        if w in base:
            prices[w] = -big
        elif w == x:
            prices[w] = px
        elif w == y:
            prices[w] = py
        else:
            prices[w] = big
    return prices, dict(prices)


def _require_gc(instance: MarketInstance) -> None:
    for a in instance.agents:
        check = is_supermodular(instance, a)
        if not check:
            raise GrossComplementsViolation(
                f"valuation of agent {a!r} is not supermodular: "
                f"witness {[sorted(s) for s in check.witness]}"
            )


def _supporting_extension(
    instance: MarketInstance, outcome: Outcome
) -> PriceVector | dict[tuple[str, str], float] | None:
    """Balanced prices agreeing with the outcome's transfers under which every
    agent demands its signed contracts, or ``None`` if there are none."""
    signed = outcome.contracts
    zero = {}
    for a, w in instance.pairs():
        zero[(a, w)] = outcome.signed[w][a] if w in signed else 0
    candidate = PriceVector(zero)
    if all(
        instance.restrict(signed, a) in _supported_sets(instance, a, candidate)
        for a in instance.agents
    ):
        return candidate

    free = [(a, w) for a, w in instance.pairs() if w not in signed]
    col = {pair: k for k, pair in enumerate(free)}
    a_ub, b_ub = [], []
    for a in instance.agents:
        own = instance.contracts_of(a)
        mine = instance.restrict(signed, a)
        base = instance.valuation(a, mine) - sum(outcome.signed[w][a] for w in mine)
        table = instance.tables[a]
        for m in range(1 << len(own)):
            bundle = instance.bundle(a, m)
            # U(bundle) <= U(mine)  <=>  -sum(free prices in bundle) <= base - v(bundle) + fixed
            fixed = sum(outcome.signed[w][a] for w in bundle if w in signed)
            row = np.zeros(len(free))
            for w in bundle:
                if w not in signed:
                    row[col[(a, w)]] = -1.0
            a_ub.append(row)
            b_ub.append(base - table[m] + fixed)
    if not free:
        return None
    unsigned = [w for w in instance.contracts if w not in signed]
    a_eq = np.zeros((len(unsigned), len(free)))
    for r, w in enumerate(unsigned):
        for a in instance.participants[w]:
            a_eq[r, col[(a, w)]] = 1.0
    res = linprog(
        np.zeros(len(free)),
        A_ub=np.array(a_ub),
        b_ub=np.array(b_ub, dtype=float),
        A_eq=a_eq,
        b_eq=np.zeros(len(unsigned)),
        bounds=[(None, None)] * len(free),
        method="highs",
    )
    if res.status != 0:
        return None
    # real-valued support: witness only, not an integer PriceVector
    entries: dict[tuple[str, str], float] = dict(zero)
    for pair, k in col.items():
        entries[pair] = float(res.x[k])
    return entries


def _supported_sets(instance, agent, prices) -> set[frozenset[str]]:
    return {instance.bundle(agent, m) for m in _demand_masks(instance, agent, prices)}


def is_stable(
    instance: MarketInstance,
    outcome: Outcome,
    prices: PriceVector | None = None,
    *,
    cap: int = ORACLE_CAP,
) -> CheckResult:
    """Stability under gross complements, certified without enumerating blocks.

    The outcome is stable iff it signs exactly the largest efficient set,
    is individually rational, and some balanced price vector matching its
    transfers makes every agent demand its signed contracts. ``prices`` may
    supply that vector; otherwise unsigned contracts are first priced at zero
    and, failing that, a feasible pricing is searched for by linear
    programming.

    Raises
    ------
    GrossComplementsViolation
        If some agent's valuation is not supermodular.
    """
    _require_gc(instance)
    for w in outcome.signed:
        if not instance.has_contract(w):
            raise InstanceError(f"outcome signs unknown contract {w!r}")
        if set(outcome.signed[w]) != set(instance.participants[w]):
            raise InstanceError(f"transfers of {w!r} must cover exactly its participants")
    signed = outcome.contracts
    largest = efficient_sets(instance, cap=cap).largest
    if signed != largest:
        return CheckResult(
            False,
            signed,
            f"signed set {instance.sorted_contracts(signed)} is not the largest "
            f"efficient set {instance.sorted_contracts(largest)}",
        )

    for a in instance.agents:
        mine = instance.restrict(signed, a)
        held = instance.mask(a, mine)
        table = instance.tables[a]
        cost = {m: sum(outcome.signed[w][a] for w in instance.bundle(a, m))
                for m in range(held + 1) if m & held == m}
        best = max(table[m] - c for m, c in cost.items())
        if table[held] - cost[held] < best:
            return CheckResult(
                False,
                a,
                f"individual rationality fails for {a}: utility "
                f"{table[held] - cost[held]} < {best} from a subset",
            )

    if prices is not None:
        if not validate_balanced(instance, prices):
            return CheckResult(False, prices, "supplied prices are not balanced")
        for w in signed:
            for a, t in outcome.signed[w].items():
                if prices[(a, w)] != t:
                    return CheckResult(False, (a, w), "supplied prices disagree with transfers")
        support = prices
        for a in instance.agents:
            if instance.restrict(signed, a) not in _supported_sets(instance, a, prices):
                return CheckResult(False, a, f"agent {a} does not demand its signed contracts")
    else:
        support = _supporting_extension(instance, outcome)
        if support is None:
            return CheckResult(
                False, None, "no balanced prices matching the transfers support the signed set"
            )
    return CheckResult(True, support)
