"""Exception hierarchy shared across the package."""


class SpinetError(Exception):
    """Base class for all package errors."""


class DimensionError(SpinetError, ValueError):
    """Operands act on different numbers of sites."""


class ContractError(SpinetError, ValueError):
    """An input violates an operation's precondition."""


class CapacityError(SpinetError):
    """A computation would exceed a configured size bound."""


class NetworkParseError(SpinetError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CollapseError(SpinetError):
    """A partition does not reduce the network to an effective chain."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None, residual: float | None = None):
        self.pair = pair
        self.residual = residual
        super().__init__(message)


class SynthesisError(SpinetError):
    """A branching plan cannot carry the requested chain couplings."""
