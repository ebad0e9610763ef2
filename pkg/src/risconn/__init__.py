"""Connectivity planning for D2D networks aided by multi-beam reconfigurable surfaces."""

from .graph import NetworkGraph, Edge, fiedler, lambda2, node_reliability, lambda2_weight_gradient
from .radio import ArrayGeometry, RadioConstants, Scenario
from .ga import BeamTask, GaConfig, run_ga
from .selection import perturbation_select
from .placement import AdamConfig, optimize_positions
from .scenario import build_d2d_graph, generate_scenario
from .solver import SolveConfig, SolveResult, run_baseline, solve, sweep

__version__ = "0.1.0"

__all__ = [
    "AdamConfig", "ArrayGeometry", "BeamTask", "Edge", "GaConfig", "NetworkGraph", "RadioConstants",
    "Scenario", "SolveConfig", "SolveResult", "build_d2d_graph", "fiedler", "generate_scenario", "lambda2",
    "lambda2_weight_gradient", "node_reliability", "optimize_positions", "perturbation_select", "run_baseline",
    "run_ga", "solve", "sweep",
]
