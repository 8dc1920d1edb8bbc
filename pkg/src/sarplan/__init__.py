"""Dynamic route planning for search-and-rescue UAV missions.

LIG (sweep plus K-nearest batched servicing), a nearest-neighbour baseline and
an exact-replan baseline, run inside a deterministic kinematic simulator.
"""

from .coverage import CoveragePlan, coverage_fraction, lawn_mower_grid
from .geometry import Geofence, Point2D, clip_path_to_fence, contains, distance, project_into
from .planners import (
    BatchOrder,
    Mode,
    PlannerConfig,
    PlannerState,
    Resume,
    Roi,
    RoiState,
    lig_step,
    nnh_step,
    optimal_step,
)
from .routing import Route, brute_force_path, exact_path, nn_path, path_length
from .simulator import (
    MissionMetrics,
    Scenario,
    Trace,
    gap_closure,
    generate_scenario,
    run_mission,
)

__version__ = "0.1.0"

__all__ = [
    "BatchOrder", "CoveragePlan", "Geofence", "MissionMetrics", "Mode", "PlannerConfig",
    "PlannerState", "Point2D", "Resume", "Roi", "RoiState", "Route", "Scenario", "Trace",
    "brute_force_path", "clip_path_to_fence", "contains", "coverage_fraction", "distance",
    "exact_path", "gap_closure", "generate_scenario", "lawn_mower_grid", "lig_step",
    "nn_path", "nnh_step", "optimal_step", "path_length", "project_into", "run_mission",
]
