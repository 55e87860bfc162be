"""Landscape-aware contextual-bandit hyper-heuristic for Euclidean TSP."""

__version__ = "0.1.0"

from .instances import Family, Instance, distance, distance_matrix, generate
from .landscape import LandscapeFeatures, StaticFeatures, mst_total_weight, static_features
from .tour import Move, Op, Tour, apply_move, move_delta, sample_candidate, tour_length
from .construction import multi_start_nn, nearest_neighbor_tour
from .search import RunConfig, RunResult, run

__all__ = [
    "Family", "Instance", "distance", "distance_matrix", "generate",
    "LandscapeFeatures", "StaticFeatures", "mst_total_weight", "static_features",
    "Move", "Op", "Tour", "apply_move", "move_delta", "sample_candidate", "tour_length",
    "multi_start_nn", "nearest_neighbor_tour",
    "RunConfig", "RunResult", "run",
]
