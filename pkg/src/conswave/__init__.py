"""Globally conservative solutions of two-component nonlinear dispersive
wave equations, continued through wave breaking in characteristic
coordinates."""

from .errors import (
    BlowupError,
    ConfigurationError,
    ConswaveError,
    DataError,
    DiagnosticError,
    IntegrationError,
    NumericsError,
    StateCorruptionError,
)
from .model import FluxModel, check_derivatives, eval_H, make_preset

__all__ = [
    "BlowupError",
    "ConfigurationError",
    "ConswaveError",
    "DataError",
    "DiagnosticError",
    "FluxModel",
    "IntegrationError",
    "NumericsError",
    "StateCorruptionError",
    "check_derivatives",
    "eval_H",
    "make_preset",
]

__version__ = "0.1.0"
