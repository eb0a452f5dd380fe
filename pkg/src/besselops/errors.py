"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class GridError(ValueError):
    """Grid construction problem or grid/function mismatch."""


class UnderResolvedError(RuntimeError):
    """A ball or annulus contains too few grid nodes for a stable solve."""


class ConfigError(ValueError):
    """Invalid campaign or CLI configuration."""
