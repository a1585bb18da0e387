"""Martingale-based randomness analysis of binary sequences under interval forecasts."""

__version__ = "0.1.0"

from .audit import (AuditConfig, AuditReport, SweepReport, audit, church_check,
                    consistency_simulation, near_half_demo, selected_average,
                    sweep_constant_intervals)
from .errors import ContractError, DomainError, FormatError, ImprandError, TreeSizeError
from .forecast import Gamble, IntervalForecast, lower_expectation, upper_expectation
from .gen import RealityPolicy, sample_path
from .selection import AfterOnes, AllSteps, EvenSteps, EveryK, OddSteps, TableSelection
from .systems import (AlternatingPQ, DepthPeriodic, ForecastingSystem, NearHalf, Stationary, Table,
                      Vacuous, delta_n, is_refinement)
from .tree import (CapitalTrajectory, FiniteGamble, capital_from_multiplier,
                   finite_horizon_lower_expectation, finite_horizon_upper_expectation,
                   validate_multiplier, validate_supermartingale, ville_threshold_verdict)

__all__ = [
    "__version__",
    "AfterOnes",
    "AllSteps",
    "AlternatingPQ",
    "audit",
    "AuditConfig",
    "AuditReport",
    "capital_from_multiplier",
    "CapitalTrajectory",
    "church_check",
    "consistency_simulation",
    "ContractError",
    "delta_n",
    "DepthPeriodic",
    "DomainError",
    "EvenSteps",
    "EveryK",
    "finite_horizon_lower_expectation",
    "finite_horizon_upper_expectation",
    "FiniteGamble",
    "ForecastingSystem",
    "FormatError",
    "Gamble",
    "ImprandError",
    "IntervalForecast",
    "is_refinement",
    "lower_expectation",
    "near_half_demo",
    "NearHalf",
    "OddSteps",
    "RealityPolicy",
    "sample_path",
    "selected_average",
    "Stationary",
    "sweep_constant_intervals",
    "SweepReport",
    "Table",
    "TableSelection",
    "TreeSizeError",
    "upper_expectation",
    "Vacuous",
    "validate_multiplier",
    "validate_supermartingale",
    "ville_threshold_verdict",
]
