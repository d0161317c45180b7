"""Predict, clamp, move and measure until a coverage hole or the step budget."""

from collections.abc import Sequence
from pathlib import Path

from coverage_scout.core.types import (
    BuildingMap,
    CoverageMap,
    GridPoint,
    MeasurementLog,
    Trajectory,
    is_hole,
)
from coverage_scout.exceptions import GeometryError
from coverage_scout.predictors.base import BasePredictor, CoverageView, PredictionContext
from coverage_scout.reporting.csv import CSVReporter
from coverage_scout.utils.logging import get_logger
from coverage_scout.world.gridworld import clamp_to_path

logger = get_logger(__name__)


def rollout(
    building_map: BuildingMap,
    cm: CoverageMap,
    predictor: BasePredictor,
    start: tuple[int, int],
    k: int,
    step_limit: int,
    eps_ch_db: float | None = None,
    inclusive: bool = True,
) -> Trajectory:
    """
    Run a predictor from start for at most k steps.

    The start cell is measured first. Each iteration stops early if the last
    measurement is a hole, otherwise asks the predictor for a waypoint, clamps
    it to the unblocked part of the path, moves and measures. One-shot
    predictors never move, whatever k is.

    Args:
        building_map: Environment geometry
        cm: Ground-truth coverage, exposed to the predictor via its access policy
        predictor: Waypoint predictor
        start: Unoccupied start cell
        k: Step budget (>= 0)
        step_limit: Movement window half-width l
        eps_ch_db: Hole threshold; defaults to the coverage map's threshold
        inclusive: Whether a measurement equal to the threshold ends the search

    Returns:
        Trajectory whose last waypoint is the final prediction

    Raises:
        GeometryError: If start is off-grid or occupied, or k < 0
    """
    position = GridPoint(int(start[0]), int(start[1]))
    if not building_map.contains(position) or building_map.is_occupied(position):
        raise GeometryError(f"Rollout start {position} is off-grid or inside a building")
    if k < 0:
        raise GeometryError(f"Step budget must be >= 0, got {k}")

    eps = cm.ch_threshold_db if eps_ch_db is None else eps_ch_db
    view = CoverageView(cm, predictor.coverage_access)
    log = MeasurementLog()
    log.append(position, view.measure(position))

    budget = 0 if predictor.one_shot else k
    for _ in range(budget):
        if is_hole(log.values[-1], eps, inclusive):
            break
        context = PredictionContext(
            building_map=building_map,
            view=view,
            position=position,
            log=log,
            step_limit=step_limit,
        )
        predicted = predictor.predict(context)
        position = clamp_to_path(building_map, position, predicted, step_limit)
        log.append(position, view.measure(position))

    measurements = log.values
    return Trajectory(
        waypoints=log.positions,
        measurements=measurements,
        steps_taken=len(measurements) - 1,
        found_ch=any(is_hole(z, eps, inclusive) for z in measurements),
        eps_ch_db=eps,
        inclusive=inclusive,
    )


def steps_to_hole(
    measurements: Sequence[float], eps_ch_db: float, inclusive: bool = True
) -> int | None:
    """
    Recursive step count: 0 if the current measurement is a hole, else 1 + the
    count from the next measurement. None when no measurement is a hole.
    """
    for step, z in enumerate(measurements):
        if is_hole(z, eps_ch_db, inclusive):
            return step
    return None


def save_trajectory_csv(trajectory: Trajectory, path: str | Path) -> Path:
    """Dump a trajectory as ``step,i,j,rsrp`` rows."""
    return CSVReporter.save_trajectory(trajectory, path)
