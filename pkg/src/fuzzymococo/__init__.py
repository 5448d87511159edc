"""Multiobjective cooperative coevolution of parsimonious fuzzy rule-based
policies, with a Mountain Car testbed and a value-iteration performance
oracle."""

from .coevo import Hyperparams, run_fuzzy_mococo
from .frbs import CoverageFailure, Frbs, select_action, voting_strengths
from .genotype import DbGenotype, RbGenotype, decode_db, decode_rb
from .mountain_car import McConfig, McState, value_iteration_oracle

__version__ = "0.1.0"

__all__ = [
    "CoverageFailure",
    "DbGenotype",
    "Frbs",
    "Hyperparams",
    "McConfig",
    "McState",
    "RbGenotype",
    "decode_db",
    "decode_rb",
    "run_fuzzy_mococo",
    "select_action",
    "value_iteration_oracle",
    "voting_strengths",
    "__version__",
]
