"""Flux conservation for constant mean curvature surfaces invariant under screw motions."""

from .ambient import AmbientSpace, KillingField, LogDensity, apply_screw, eval_log_density, evaluate_killing
from .errors import CMCFluxError, DomainError, IntegrationError, OracleFailure, QuadratureError, SeedingError
from .twizzler import (TwizzlerParams, build_surface, circle_curve, first_integral_lhs,
                       integrate_generating_curve, integrate_support)

__version__ = "0.1.0"

__all__ = [
    "AmbientSpace", "KillingField", "LogDensity", "apply_screw", "eval_log_density", "evaluate_killing",
    "CMCFluxError", "DomainError", "IntegrationError", "OracleFailure", "QuadratureError", "SeedingError",
    "TwizzlerParams", "build_surface", "circle_curve", "first_integral_lhs",
    "integrate_generating_curve", "integrate_support",
]
