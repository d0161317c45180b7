"""Observation encoding for the DDQN agent.

The agent sees two tensors:

* ``i_a`` (3 x L x L): a circular gradient around the UAV, the sum of
  gradients around every measurement weighted by normalized RSRP, and the
  normalized building heights.
* ``i_b`` (3 x n x n, n = 2l + 1): the UAV-centered window of ``i_a``,
  zero-padded where it leaves the grid.

Actions index the n x n movement window in row-major order.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from coverage_scout.core.types import BuildingMap, GridPoint, MeasurementLog, StateTensors
from coverage_scout.exceptions import GeometryError, ShapeError, ValidationError


@lru_cache(maxsize=16)
def _decay_kernel(side: int, decay_c: float) -> NDArray[np.float64]:
    """(2L-1) x (2L-1) table of 2^(-c * distance), distance 0 at the center."""
    offsets = np.arange(-(side - 1), side, dtype=np.int64)
    squared = offsets[:, None] ** 2 + offsets[None, :] ** 2
    kernel = np.exp2(-decay_c * np.sqrt(squared.astype(np.float64)))
    kernel.setflags(write=False)
    return kernel


def encode_location(p: tuple[int, int], side: int, decay_c: float) -> NDArray[np.float64]:
    """L x L plane with value 2^(-c * ||(i, j) - p||), 1.0 at p."""
    if decay_c <= 0:
        raise ValidationError(f"Decay constant must be > 0, got {decay_c}")
    i, j = int(p[0]), int(p[1])
    if not (0 <= i < side and 0 <= j < side):
        raise GeometryError(f"Cell {(i, j)} lies outside the {side}x{side} grid")
    kernel = _decay_kernel(side, float(decay_c))
    return kernel[side - 1 - i : 2 * side - 1 - i, side - 1 - j : 2 * side - 1 - j]


def normalize_rsrp(z: float, eps_ch_db: float) -> float:
    """Map RSRP to (z - eps) / (-eps): 0 at the hole threshold, 1 at 0 dB."""
    if eps_ch_db >= 0:
        raise ValidationError(f"Coverage-hole threshold must be negative, got {eps_ch_db}")
    return (z - eps_ch_db) / (-eps_ch_db)


def encode_measurements(
    log: MeasurementLog | tuple[tuple[GridPoint, float], ...],
    side: int,
    decay_c: float,
    eps_ch_db: float,
) -> NDArray[np.float64]:
    """Sum of location gradients at the measured cells, each scaled by normalized RSRP."""
    plane = np.zeros((side, side), dtype=np.float64)
    for p, z in log:
        # NaN marks a cell without measurement; it carries no information
        if np.isnan(z):
            continue
        plane += normalize_rsrp(z, eps_ch_db) * encode_location(p, side, decay_c)
    return plane


def height_plane(building_map: BuildingMap, h_max_m: float) -> NDArray[np.float64]:
    return np.clip(building_map.heights / h_max_m, 0.0, 1.0)


def crop_window(
    planes: NDArray[np.float64], p: tuple[int, int], step_limit: int
) -> NDArray[np.float64]:
    """(C, n, n) window of (C, L, L) planes centered at p, zero outside the grid."""
    channels, side = planes.shape[0], planes.shape[-1]
    n = 2 * step_limit + 1
    out = np.zeros((channels, n, n), dtype=planes.dtype)

    i0, j0 = p[0] - step_limit, p[1] - step_limit
    src_i0, src_i1 = max(0, i0), min(side, i0 + n)
    src_j0, src_j1 = max(0, j0), min(side, j0 + n)
    if src_i0 < src_i1 and src_j0 < src_j1:
        out[:, src_i0 - i0 : src_i1 - i0, src_j0 - j0 : src_j1 - j0] = planes[
            :, src_i0:src_i1, src_j0:src_j1
        ]
    return out


def build_state(
    building_map: BuildingMap,
    p: tuple[int, int],
    log: MeasurementLog | tuple[tuple[GridPoint, float], ...],
    step_limit: int,
    decay_c: float,
    eps_ch_db: float,
    h_max_m: float = 100.0,
    dtype: type[np.floating] | str = np.float64,
) -> StateTensors:
    """
    Assemble the agent observation at UAV cell p.

    Raises:
        GeometryError: If p is outside the grid or inside a building
    """
    position = GridPoint(int(p[0]), int(p[1]))
    if not building_map.contains(position):
        raise GeometryError(f"UAV cell {position} lies outside the grid")
    if building_map.is_occupied(position):
        raise GeometryError(f"UAV cell {position} is inside a building")

    side = building_map.side
    i_a = np.stack(
        [
            encode_location(position, side, decay_c),
            encode_measurements(log, side, decay_c, eps_ch_db),
            height_plane(building_map, h_max_m),
        ]
    ).astype(dtype, copy=False)
    i_b = crop_window(i_a, position, step_limit)
    return StateTensors(i_a=i_a, i_b=i_b, position=position)


def num_actions(step_limit: int) -> int:
    return (2 * step_limit + 1) ** 2


def action_to_offset(idx: int, step_limit: int) -> tuple[int, int]:
    """Row-major action index to (di, dj); the center index means stay put."""
    n = 2 * step_limit + 1
    if not 0 <= idx < n * n:
        raise ShapeError(f"Action index {idx} out of range [0, {n * n})")
    return idx // n - step_limit, idx % n - step_limit


def offset_to_action(di: int, dj: int, step_limit: int) -> int:
    if abs(di) > step_limit or abs(dj) > step_limit:
        raise ShapeError(f"Offset {(di, dj)} exceeds step limit {step_limit}")
    n = 2 * step_limit + 1
    return (di + step_limit) * n + (dj + step_limit)


def action_to_point(p: tuple[int, int], idx: int, step_limit: int) -> GridPoint:
    """Predicted cell for action idx at p; may lie outside the grid near borders."""
    di, dj = action_to_offset(idx, step_limit)
    return GridPoint(int(p[0]) + di, int(p[1]) + dj)


@dataclass(frozen=True)
class Observation:
    """
    Compact replay record from which StateTensors are rebuilt on demand.

    Stores a reference to the (immutable) map and a snapshot of the
    measurement log instead of two full tensor stacks.
    """

    building_map: BuildingMap
    position: GridPoint
    measurements: tuple[tuple[GridPoint, float], ...]
    step_limit: int
    decay_c: float
    eps_ch_db: float
    h_max_m: float = 100.0

    def tensors(self, dtype: type[np.floating] | str = np.float64) -> StateTensors:
        return build_state(
            self.building_map,
            self.position,
            self.measurements,
            self.step_limit,
            self.decay_c,
            self.eps_ch_db,
            self.h_max_m,
            dtype=dtype,
        )
