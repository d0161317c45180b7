"""Core types for coverage-scout."""

from collections.abc import Iterator
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, NamedTuple

import numpy as np
from numpy.typing import NDArray

from coverage_scout.exceptions import ValidationError


class GridPoint(NamedTuple):
    """A grid cell, 0-based row and column indices."""

    i: int
    j: int

    def offset(self, di: int, dj: int) -> "GridPoint":
        return GridPoint(self.i + di, self.j + dj)


def is_hole(z: float, eps_ch_db: float, inclusive: bool = True) -> bool:
    """Coverage-hole test for a single measurement; NaN (no measurement) is never a hole."""
    if np.isnan(z):
        return False
    return bool(z <= eps_ch_db) if inclusive else bool(z < eps_ch_db)


@dataclass(frozen=True, eq=False)
class BuildingMap:
    """L x L raster of building heights in meters.

    The map is immutable after construction: ``heights`` is a read-only copy.

    Attributes:
        heights: Square array of non-negative building heights (meters)
        resolution_m: Meters per cell
        altitude_m: Evaluation height H; cells with height >= H are occupied
    """

    heights: NDArray[np.float64]
    resolution_m: float = 4.0
    altitude_m: float = 2.0

    def __post_init__(self) -> None:
        """Validate and freeze the raster."""
        arr = np.array(self.heights, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValidationError(
                f"Building map must be a non-empty square raster, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValidationError("Building heights must be finite and non-negative")
        if not self.resolution_m > 0:
            raise ValidationError(f"Resolution must be > 0, got {self.resolution_m}")
        arr.setflags(write=False)
        object.__setattr__(self, "heights", arr)

    @property
    def side(self) -> int:
        return int(self.heights.shape[0])

    @cached_property
    def occupied(self) -> NDArray[np.bool_]:
        """Boolean mask of cells whose building reaches the evaluation height."""
        mask = self.heights >= self.altitude_m
        mask.setflags(write=False)
        return mask

    @property
    def occupied_fraction(self) -> float:
        return float(self.occupied.mean())

    def contains(self, p: tuple[int, int]) -> bool:
        return 0 <= p[0] < self.side and 0 <= p[1] < self.side

    def is_occupied(self, p: tuple[int, int]) -> bool:
        return bool(self.occupied[p[0], p[1]])


@dataclass(frozen=True)
class BaseStation:
    """Omnidirectional base station placed on a grid cell."""

    cell: GridPoint
    antenna_height_m: float = 2.0


@dataclass(frozen=True, eq=False)
class CoverageMap:
    """RSRP raster (dB) at the evaluation height.

    Occupied cells carry NaN, the "no measurement" sentinel.
    """

    rsrp: NDArray[np.float64]
    bs: BaseStation
    resolution_m: float = 4.0
    ch_threshold_db: float = -100.0

    def __post_init__(self) -> None:
        arr = np.array(self.rsrp, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"Coverage map must be a square raster, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "rsrp", arr)

    @property
    def side(self) -> int:
        return int(self.rsrp.shape[0])

    def measure(self, p: tuple[int, int]) -> float:
        """RSRP at a cell; NaN on occupied cells."""
        return float(self.rsrp[p[0], p[1]])


@dataclass
class MeasurementLog:
    """Ordered (location, RSRP) pairs collected along a trajectory."""

    entries: list[tuple[GridPoint, float]] = field(default_factory=list)

    def append(self, p: GridPoint, z: float) -> None:
        self.entries.append((p, float(z)))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[GridPoint, float]]:
        return iter(self.entries)

    @property
    def positions(self) -> list[GridPoint]:
        return [p for p, _ in self.entries]

    @property
    def values(self) -> list[float]:
        return [z for _, z in self.entries]

    def snapshot(self) -> tuple[tuple[GridPoint, float], ...]:
        """Immutable copy, used by replay records."""
        return tuple(self.entries)


@dataclass(frozen=True, eq=False)
class StateTensors:
    """Agent observation after k measurements.

    Attributes:
        i_a: 3 x L x L stack (encoded location, encoded measurements, building heights)
        i_b: 3 x (2l+1) x (2l+1) UAV-centered crop of i_a, zero-padded at borders
        position: UAV cell the crop is centered on
    """

    i_a: NDArray[np.float64]
    i_b: NDArray[np.float64]
    position: GridPoint


@dataclass
class Trajectory:
    """Result of one predict-clamp-move-measure rollout.

    waypoints[0] is the start; waypoints[i] is the cell reached after step i.
    measurements[i] is the RSRP measured at waypoints[i].
    """

    waypoints: list[GridPoint]
    measurements: list[float]
    steps_taken: int
    found_ch: bool
    eps_ch_db: float = -100.0
    inclusive: bool = True

    @property
    def final_prediction(self) -> GridPoint:
        return self.waypoints[-1]

    def truncated(self, k: int) -> "Trajectory":
        """Trajectory a rollout with step budget k would have produced."""
        steps = min(k, self.steps_taken)
        measurements = self.measurements[: steps + 1]
        return Trajectory(
            waypoints=self.waypoints[: steps + 1],
            measurements=measurements,
            steps_taken=steps,
            found_ch=any(is_hole(z, self.eps_ch_db, self.inclusive) for z in measurements),
            eps_ch_db=self.eps_ch_db,
            inclusive=self.inclusive,
        )


@dataclass
class MetricScore:
    """Score for a single metric."""

    metric_name: str
    value: float
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate metric score."""
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"Metric value must be between 0 and 1, got {self.value}")


@dataclass
class RunResult:
    """Precision/recall of one (map, method, k, n_sam) cell of an experiment."""

    map_id: str
    method: str
    k: int
    n_sam: int
    predictions: list[GridPoint]
    true_count: int
    unique_true_count: int
    ch_count: int
    precision: float
    recall: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.precision <= 1.0:
            raise ValueError(f"Precision must be between 0 and 1, got {self.precision}")
        if not 0.0 <= self.recall <= 1.0:
            raise ValueError(f"Recall must be between 0 and 1, got {self.recall}")


@dataclass(frozen=True)
class AggregateRow:
    """Mean and population std of one metric across maps for a (method, k, n_sam) cell."""

    metric: str
    method: str
    k: int
    n_sam: int
    mean: float
    std: float
    n_maps: int


@dataclass(frozen=True)
class EpisodeLog:
    """One row of the training log."""

    episode: int
    steps: int
    return_: float
    found_ch: bool
    epsilon: float
    loss_mean: float
