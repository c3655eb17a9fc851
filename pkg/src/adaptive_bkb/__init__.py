"""Adaptive-discretization GP bandit optimization with a Nystrom-sketched posterior."""
from ._backend import BACKEND
from .baselines import GridUCB, build_cartesian_grid, build_random_grid
from .experiment import RunConfig, run_experiment
from .external import ExternalObjectiveError, external_objective
from .kernels import KernelSpec, SmoothnessModel
from .objectives import NoiseModel, Objective, registry_lookup, registry_names
from .optimizer import AdaBKB, LeafSetBoundError, adaptive_exact
from .partition import Cell, CellId, Domain, PartitionConfig
from .posterior import ConfidenceParams, PosteriorModel

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AdaBKB", "adaptive_exact", "LeafSetBoundError", "GridUCB",
    "build_cartesian_grid", "build_random_grid", "RunConfig", "run_experiment",
    "ExternalObjectiveError", "external_objective", "KernelSpec", "SmoothnessModel",
    "NoiseModel", "Objective", "registry_lookup", "registry_names", "Cell", "CellId",
    "Domain", "PartitionConfig", "ConfidenceParams", "PosteriorModel",
]
