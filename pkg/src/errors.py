"""Exception types shared across the toolkit."""

from __future__ import annotations


class DataFormatError(ValueError):
    """Raised when an input file, identifier or config value is malformed."""


class ConfigError(DataFormatError):
    """Raised for unknown or invalid configuration keys."""


class DivergenceError(ArithmeticError):
    """Raised when an iterative computation produces non-finite values."""

    def __init__(self, message: str = "divergence") -> None:
        super().__init__(message)


class FoldFailure(RuntimeError):
    """A cross-validation fold failed; the original exception is chained."""

    def __init__(self, fold_index: int, label: str, cause: BaseException) -> None:
        super().__init__(f"fold {fold_index} ({label}) failed: {cause}")
        self.fold_index = fold_index
        self.label = label
