"""Gridworld geometry, synthetic maps and coverage simulation."""

from coverage_scout.world.gridworld import (
    PermissibleRegion,
    allowed_window,
    clamp_to_path,
    is_permissible,
    line_blocked,
    permissible_set,
    supercover_cells,
)
from coverage_scout.world.mapgen import generate_corpus, generate_map
from coverage_scout.world.propagation import (
    ch_set,
    cm_gradient,
    compute_coverage,
    generate_coverage_corpus,
    near_building_ratio,
    place_base_station,
    wall_counts,
)

__all__ = [
    "PermissibleRegion",
    "allowed_window",
    "clamp_to_path",
    "is_permissible",
    "line_blocked",
    "permissible_set",
    "supercover_cells",
    "generate_corpus",
    "generate_map",
    "ch_set",
    "cm_gradient",
    "compute_coverage",
    "generate_coverage_corpus",
    "near_building_ratio",
    "place_base_station",
    "wall_counts",
]
