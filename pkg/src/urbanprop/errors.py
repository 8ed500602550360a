"""Exception hierarchy shared across the simulator.

Exit-code mapping used by the CLI:
    2 -> ConfigError / MapValidationError (bad input or configuration)
    3 -> DataShapeError (mismatched series lengths, malformed tables)
    4 -> NumericalDomainError and subclasses (values outside physical domain)
"""


class UrbanPropError(Exception):
    """Base class for all simulator errors."""


class ConfigError(UrbanPropError):
    """Bad scenario configuration or unreadable input file."""


class MapValidationError(ConfigError):
    """Geometry map violates the schema or a structural invariant."""


class RouteError(ConfigError):
    """Route file is empty or has non-monotone timestamps."""


class DataShapeError(UrbanPropError):
    """Series lengths or table shapes do not line up."""


class NumericalDomainError(UrbanPropError, ValueError):
    """An argument lies outside the physical/numerical domain."""


class DegenerateGeometryError(NumericalDomainError):
    """Geometry too degenerate to resolve (e.g. breakpoint without a corner)."""
