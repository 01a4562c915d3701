"""Dynamic auction for multilateral collaboration markets with gross complements.

Agents jointly sign primitive contracts and split each contract's money with
zero-sum transfers. When every valuation is supermodular, the auction below
finds a stable outcome by adjusting integer prices one unit at a time along
complements chains, lowering the Lyapunov function (sum of indirect
utilities) by one per chain until it equals the maximum aggregate valuation.
"""

from .auction import AuctionTrace, RoundRecord, adjust_prices, check_gross_complements, run_auction
from .chains import ComplementsChain, chain_violations, find_chain, find_disjoint_chains
from .demand import (
    DemandReport,
    anchored_intersection,
    confined_largest,
    demand,
    demand_reports,
    indirect_utility,
    largest_and_smallest,
    lyapunov,
)
from .errors import (
    AnchorNotDemanded,
    AuctionError,
    AuctionInvariantError,
    ChainError,
    ConfinementEmpty,
    EnumerationCapError,
    GrossComplementsViolation,
    InstanceError,
    UnbalancedPricesError,
    VerdictError,
)
from .generate import GeneratorParams, generate, random_balanced_prices
from .io import (
    emit_instance,
    emit_outcome,
    emit_prices,
    emit_trace,
    parse_instance,
    parse_outcome,
    parse_prices,
    parse_reports,
)
from .market import (
    BalanceReport,
    Market,
    MarketInstance,
    Outcome,
    PriceVector,
    SynergyValuation,
    aggregate_valuation,
    utility,
    validate_balanced,
)
from .oracles import (
    CheckResult,
    EfficientSets,
    antitone_counterexample,
    check_antitone,
    check_gc_lowering,
    efficient_sets,
    is_equilibrium_price,
    is_stable,
    is_supermodular,
    is_supermodular_pairwise,
)
from .verifier import (
    Equilibrium,
    Level,
    NonEquilibrium,
    VerificationTrace,
    equilibrium_outcome,
    strongly_demanded,
    verify,
)

__version__ = "0.1.0"
