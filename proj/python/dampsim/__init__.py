"""Two-mode amplitude damping: analytic Gaussian moments, a truncated Fock
oracle, and linear canonical structures."""

from ._dampsim import *  # noqa: F401,F403
from ._dampsim import (
    Error,
    Lct,
    ModeParams,
    MomentState,
    Scenario,
    TwoModeSystem,
    ValidationError,
)

QUADRATURES = ("x1", "p1", "x2", "p2")

__all__ = [
    "Error",
    "Lct",
    "ModeParams",
    "MomentState",
    "QUADRATURES",
    "Scenario",
    "TwoModeSystem",
    "ValidationError",
]
