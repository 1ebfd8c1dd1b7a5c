"""Carbon-aware ant colony solvers for the generalized traveling salesman problem."""

from .carbon import (
    NEUTRAL,
    CarbonMatrix,
    EdgeKinematics,
    PhysicsConstants,
    VehicleProfile,
    build_carbon_matrix,
    carbon_for_instance,
    edge_emission,
    emission_factor,
    emission_factor_matrix,
    load_vehicle_config,
    sample_kinematics,
)
from .core import GtspInstance, InvalidTourError, Tour, make_tour, tour_carbon, tour_cost, validate_tour
from .engine import PheromoneState, RunResult, SolverConfig, run
from .oracle import BudgetExceededError, solve_exact

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "CarbonMatrix",
    "EdgeKinematics",
    "GtspInstance",
    "InvalidTourError",
    "NEUTRAL",
    "PheromoneState",
    "PhysicsConstants",
    "RunResult",
    "SolverConfig",
    "Tour",
    "VehicleProfile",
    "build_carbon_matrix",
    "carbon_for_instance",
    "edge_emission",
    "emission_factor",
    "emission_factor_matrix",
    "load_vehicle_config",
    "make_tour",
    "run",
    "sample_kinematics",
    "solve_exact",
    "tour_carbon",
    "tour_cost",
    "validate_tour",
]
