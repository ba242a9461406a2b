"""POWL discovery from partially ordered event logs."""

from ._core import (
    BudgetExceeded,
    ConfigError,
    DomainError,
    EmptyInputError,
    Error,
    FormatError,
    InputError,
    Model,
    ParseError,
    PotLog,
    SizeLimitExceeded,
    StructureError,
    ValidationError,
    check_fitness,
    check_soundness,
    discover,
    random_powl,
    read_log,
    sample_pot_log,
    to_net_dot,
    to_pnml,
)

__all__ = [name for name in dir() if not name.startswith("_")]
