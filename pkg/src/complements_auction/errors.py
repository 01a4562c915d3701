"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class AuctionError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(AuctionError, ValueError):
    """A market instance, price vector or outcome is malformed.

    ``path`` locates the offending element inside a JSON document when the
    error comes from parsing (e.g. ``"valuations.Ana.table[1]"``).
    """

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class UnbalancedPricesError(InstanceError):
    """Prices within some contract do not sum to zero."""


class EnumerationCapError(AuctionError):
    """Exhaustive enumeration was requested over too many contracts."""


class GrossComplementsViolation(AuctionError):
    """Valuations or demand reports fail gross complementarity."""


class ConfinementEmpty(GrossComplementsViolation):
    """No demand set of an agent lies inside the allowed contract set."""


class AnchorNotDemanded(AuctionError, ValueError):
    """The anchor contract belongs to none of the agent's demand sets."""


class VerdictError(AuctionError):
    """An operation was applied to a trace with the wrong verdict."""


class ChainError(AuctionError, ValueError):
    """Chains passed to the price adjustment are inconsistent."""


class AuctionInvariantError(AuctionError, RuntimeError):
    """Internal consistency check of the auction loop failed."""
