"""Evolutionary inspection games: equilibria, replicator dynamics, social
norms, a forward-looking inspector, continuous crime levels and an
agent-based cross-check."""

from .core import (
    AssumptionError,
    ConfigError,
    CostFunction,
    GameParams,
    IntegrationError,
    MixedProfile,
    NormFunction,
    QuadraticCost,
    SigmoidNorm,
    ValidationReport,
    ZeroNorm,
    load_config,
    norm_sigmoid,
    validate_params,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionError",
    "ConfigError",
    "CostFunction",
    "GameParams",
    "IntegrationError",
    "MixedProfile",
    "NormFunction",
    "QuadraticCost",
    "SigmoidNorm",
    "ValidationReport",
    "ZeroNorm",
    "load_config",
    "norm_sigmoid",
    "validate_params",
]
