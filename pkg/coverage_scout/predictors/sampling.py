"""One-shot random predictors: RSP (any outdoor cell) and BNP (near buildings)."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from coverage_scout.core.types import BuildingMap, GridPoint
from coverage_scout.exceptions import GeometryError, ValidationError
from coverage_scout.predictors.base import BasePredictor, PredictionContext, StartPool
from coverage_scout.world.propagation import distance_to_building


@dataclass(frozen=True)
class BnpConfig:
    """Building-neighborhood radius d_B in meters (typically 8, 16 or 32)."""

    d_b_m: float = 8.0

    def __post_init__(self) -> None:
        if not self.d_b_m > 0:
            raise ValidationError(f"d_B must be > 0, got {self.d_b_m}")


def outdoor_cells(building_map: BuildingMap) -> NDArray[np.int64]:
    """Unoccupied cells in row-major order."""
    return np.argwhere(~building_map.occupied)


@lru_cache(maxsize=64)
def neighborhood_mask(building_map: BuildingMap, d_b_m: float) -> NDArray[np.bool_]:
    """Unoccupied cells within d_b_m meters of an occupied cell."""
    mask = (distance_to_building(building_map) <= d_b_m) & ~building_map.occupied
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=64)
def neighborhood_cells(building_map: BuildingMap, d_b_m: float) -> NDArray[np.int64]:
    """Neighborhood members in row-major order."""
    cells = np.argwhere(neighborhood_mask(building_map, d_b_m))
    cells.setflags(write=False)
    return cells


def rsp_sample(building_map: BuildingMap, rng: np.random.Generator) -> GridPoint:
    """Uniform draw over unoccupied cells."""
    cells = outdoor_cells(building_map)
    if len(cells) == 0:
        raise GeometryError("Map has no unoccupied cell to sample")
    i, j = cells[int(rng.integers(len(cells)))]
    return GridPoint(int(i), int(j))


def bnp_sample(building_map: BuildingMap, cfg: BnpConfig, rng: np.random.Generator) -> GridPoint:
    """
    Uniform draw over unoccupied cells within d_B of a building.

    Raises:
        GeometryError: If the map has no buildings or the neighborhood is empty
    """
    if not building_map.occupied.any():
        raise GeometryError("BNP needs at least one building on the map")
    cells = neighborhood_cells(building_map, cfg.d_b_m)
    if len(cells) == 0:
        raise GeometryError(f"No unoccupied cell lies within {cfg.d_b_m} m of a building")
    i, j = cells[int(rng.integers(len(cells)))]
    return GridPoint(int(i), int(j))


class RSPPredictor(BasePredictor):
    """Random sample prediction; its start point is its prediction."""

    name = "rsp"
    start_pool = StartPool.OUTDOOR
    one_shot = True

    def predict(self, context: PredictionContext) -> GridPoint:
        return context.position


class BNPPredictor(BasePredictor):
    """Building-neighborhood prediction; starts (and stays) near buildings."""

    start_pool = StartPool.NEIGHBORHOOD
    one_shot = True

    def __init__(self, cfg: BnpConfig | None = None, name: str = "bnp"):
        self.cfg = cfg or BnpConfig()
        self.name = name

    def predict(self, context: PredictionContext) -> GridPoint:
        return context.position
