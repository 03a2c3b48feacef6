"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalError -> 3,
I/O problems -> 4 (see cli.py).
"""


class ConfigError(ValueError):
    """Bad configuration: unknown preset, schema violation, physical invariant."""


class UnitError(ValueError):
    """Arithmetic or conversion across incompatible unit tags."""


class NumericalError(RuntimeError):
    """A computation could not be completed (node halt, invalid ensemble, ...)."""


class DomainError(NumericalError):
    """Inputs outside the mathematical domain of an operation."""
