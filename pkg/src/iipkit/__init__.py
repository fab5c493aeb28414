"""Instantaneous impact point prediction and rate analysis.

Closed-form impact prediction for a coasting vehicle over a spherical
rotating Earth, two independent formulations of the impact point's time
derivatives under thrust, brute-force oracles to referee them, a staged
launch simulator to generate test trajectories, and an HTTP service plus
CLI wrapping it all.
"""

__version__ = "0.1.0"

from .compare import CompareReport, compare_samples
from .errors import IipError
from .frames import EARTH, AccelRtn, AccelVnb, EarthModel, InertialState, derive_kinematics
from .geometric import GeometricRates, geometric_rates
from .kepler import IipSolution, compute_iip
from .legacy import LegacyRates, legacy_rates
from .sim import SimulationResult, VehicleConfig, default_vehicle_config, simulate

__all__ = [
    "__version__",
    "EARTH",
    "AccelRtn",
    "AccelVnb",
    "CompareReport",
    "EarthModel",
    "GeometricRates",
    "IipError",
    "IipSolution",
    "InertialState",
    "LegacyRates",
    "SimulationResult",
    "VehicleConfig",
    "compare_samples",
    "compute_iip",
    "default_vehicle_config",
    "derive_kinematics",
    "geometric_rates",
    "legacy_rates",
    "simulate",
]
