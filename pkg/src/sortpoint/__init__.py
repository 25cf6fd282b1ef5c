"""Exact and parameterized solvers for minimum sort-point network design."""

__version__ = "0.1.0"

from .codec import dump_instance, dump_solution, parse_instance, parse_solution
from .dispatch import SolverConfig, choose_algorithm, min_target, solve
from .graph_core import Digraph
from .instance_model import Commodity, Instance, PathCover, SolveOutcome, Variant, validate_solution

__all__ = [
    "Commodity",
    "Digraph",
    "Instance",
    "PathCover",
    "SolveOutcome",
    "SolverConfig",
    "Variant",
    "choose_algorithm",
    "dump_instance",
    "dump_solution",
    "min_target",
    "parse_instance",
    "parse_solution",
    "solve",
    "validate_solution",
]
