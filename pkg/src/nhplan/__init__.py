"""Connectivity-aware promising regions for sampling-based path planning."""
from .grid_map import GridMap, Path, PlanningProblem, State, free_edge, free_state, path_cost
from .heuristic import HeuristicSampler, build_sampler
from .region_graph import EdgeField, NodePairField, RegionMask

__version__ = "0.1.0"
