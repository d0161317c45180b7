"""Gradient-descent oracles over the full coverage map: G-RSP and G-BNP."""

import numpy as np

from coverage_scout.core.types import BuildingMap, CoverageMap, GridPoint
from coverage_scout.predictors.base import (
    BasePredictor,
    CoverageAccess,
    PredictionContext,
    StartPool,
)
from coverage_scout.predictors.sampling import BnpConfig, neighborhood_cells, neighborhood_mask
from coverage_scout.world.propagation import cm_gradient


def _round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def grsp_step(cm: CoverageMap, p: tuple[int, int], step_limit: int) -> GridPoint:
    """
    One unit-rate descent step: p - round(gradient), each axis clamped to +/- step_limit.

    The result may be impermissible; the rollout's clamp enforces movement rules.
    """
    grad = cm_gradient(cm, p)
    step = np.clip(_round_half_away(grad), -step_limit, step_limit).astype(np.int64)
    return GridPoint(int(p[0]) - int(step[0]), int(p[1]) - int(step[1]))


def gbnp_step(
    building_map: BuildingMap,
    cm: CoverageMap,
    p: tuple[int, int],
    cfg: BnpConfig,
    step_limit: int,
) -> GridPoint:
    """
    grsp_step confined to the building neighborhood.

    A candidate outside the neighborhood is replaced by the nearest member
    (Euclidean; the first in row-major order among equals).
    """
    candidate = grsp_step(cm, p, step_limit)
    mask = neighborhood_mask(building_map, cfg.d_b_m)
    if building_map.contains(candidate) and mask[candidate.i, candidate.j]:
        return candidate

    members = neighborhood_cells(building_map, cfg.d_b_m)
    if len(members) == 0:
        return GridPoint(int(p[0]), int(p[1]))
    d2 = ((members - np.array([candidate.i, candidate.j])) ** 2).sum(axis=1)
    i, j = members[int(np.argmin(d2))]
    return GridPoint(int(i), int(j))


class GRSPPredictor(BasePredictor):
    """Gradient descent from a random outdoor start."""

    name = "grsp"
    coverage_access = CoverageAccess.FULL_MAP
    start_pool = StartPool.OUTDOOR

    def predict(self, context: PredictionContext) -> GridPoint:
        return grsp_step(context.view.full_map, context.position, context.step_limit)


class GBNPPredictor(BasePredictor):
    """Gradient descent from a neighborhood start, projected back into the neighborhood."""

    coverage_access = CoverageAccess.FULL_MAP
    start_pool = StartPool.NEIGHBORHOOD

    def __init__(self, cfg: BnpConfig | None = None, name: str = "gbnp"):
        self.cfg = cfg or BnpConfig()
        self.name = name

    def predict(self, context: PredictionContext) -> GridPoint:
        return gbnp_step(
            context.building_map,
            context.view.full_map,
            context.position,
            self.cfg,
            context.step_limit,
        )
