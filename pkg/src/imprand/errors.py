"""Exception hierarchy shared by the library and the CLI."""


class ImprandError(Exception):
    pass


class DomainError(ImprandError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ContractError(ImprandError):
    """A strategy or forecasting system broke its contract (e.g. a negative multiplier)."""


class TreeSizeError(ImprandError, ValueError):
    """A finite event tree would be too large to materialise."""


class FormatError(ImprandError, ValueError):
    """Malformed input file (bit stream, JSON document)."""
