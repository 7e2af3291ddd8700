"""Exception types raised across the package."""

from __future__ import annotations


class ABMarketError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ABMarketError, ValueError):
    pass


class ConfigError(ABMarketError, ValueError):
    """Invalid simulation configuration; ``keys`` lists the offending entries."""

    def __init__(self, message: str, keys: list[str] | None = None) -> None:
        self.keys = list(keys or [])
        if self.keys:
            message = f"{message}: {', '.join(self.keys)}"
        super().__init__(message)


class FitUndefinedError(ABMarketError, ValueError):
    pass


class InsufficientNodesError(ABMarketError, ValueError):
    pass


class HistoryTooShortError(ABMarketError, ValueError):
    pass


class TableMissError(ABMarketError, KeyError):
    pass


class InvalidDistributionError(ABMarketError, ValueError):
    pass


class InsufficientDataError(ABMarketError, ValueError):
    pass
