"""Radial defocusing energy-supercritical wave equation: solver and diagnostics."""

__version__ = "0.1.0"

from .cases import CaseSpec, make_case, parse_expression
from .config import (
    CaseId,
    ConfigError,
    SimulationConfig,
    StabilityError,
    critical_exponent,
    load_config,
    stability_limit,
)
from .diagnostics import (
    DiagnosticsSeries,
    boundedness_verdict,
    convergence_study,
    simulate,
    truncation_study,
)
from .energy import discrete_energy, initial_energy_integral
from .grid import RadialField, RadialGrid, SolverState
from .solver import BlowupError, FirstStep, run
from .spectral import WavenumberGrid, besov_norm, radial_fourier, sobolev_norm

__all__ = [
    "BlowupError",
    "CaseId",
    "CaseSpec",
    "ConfigError",
    "DiagnosticsSeries",
    "FirstStep",
    "RadialField",
    "RadialGrid",
    "SimulationConfig",
    "SolverState",
    "StabilityError",
    "WavenumberGrid",
    "besov_norm",
    "boundedness_verdict",
    "convergence_study",
    "critical_exponent",
    "discrete_energy",
    "initial_energy_integral",
    "load_config",
    "make_case",
    "parse_expression",
    "radial_fourier",
    "run",
    "simulate",
    "sobolev_norm",
    "stability_limit",
    "truncation_study",
]
