"""Python bindings for the degenwave solver.

Every entry point taking ``config`` expects TOML text with the same sections
as the command-line tool; an empty string selects the defaults.
"""

from ._core import (
    DegenwaveError,
    check,
    config_hash,
    fit_decay,
    kernel_gap,
    resolvent,
    simulate,
    spectrum,
)

__all__ = [
    "DegenwaveError",
    "check",
    "config_hash",
    "fit_decay",
    "kernel_gap",
    "resolvent",
    "simulate",
    "spectrum",
]
