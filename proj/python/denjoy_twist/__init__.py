"""Modified Herman/Denjoy symplectic twist map with an invariant curve
bounding an instability zone, in finite truncation."""

from ._core import (
    SCHEMA_VERSION,
    ConfigError,
    ConstructionError,
    InvalidParameter,
    System,
    default_config,
    run,
)

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "ConstructionError",
    "InvalidParameter",
    "System",
    "default_config",
    "run",
]
