"""Single-map coverage-hole search environment."""

from dataclasses import dataclass

from coverage_scout.agent.ddqn import reward
from coverage_scout.agent.encoding import Observation, action_to_point
from coverage_scout.core.config import AgentConfig
from coverage_scout.core.types import (
    BuildingMap,
    CoverageMap,
    GridPoint,
    MeasurementLog,
    is_hole,
)
from coverage_scout.exceptions import GeometryError
from coverage_scout.world.gridworld import PermissibleRegion, clamp_to_path


@dataclass(frozen=True)
class StepResult:
    observation: Observation
    reward: float
    terminal: bool
    truncated: bool
    predicted: GridPoint
    actual: GridPoint
    rsrp: float


class CoverageHoleEnv:
    """
    Gym-style wrapper around one (building map, coverage map) pair.

    ``step`` turns an action index into a predicted cell, clamps it to the
    unblocked part of the path, moves there and measures. The episode ends on
    a hole (terminal) or after ``max_episode_steps`` (truncated).
    """

    def __init__(self, building_map: BuildingMap, cm: CoverageMap, config: AgentConfig):
        self.building_map = building_map
        self.cm = cm
        self.config = config
        self.position: GridPoint | None = None
        self.log = MeasurementLog()
        self.steps = 0

    def _observation(self) -> Observation:
        assert self.position is not None
        return Observation(
            building_map=self.building_map,
            position=self.position,
            measurements=self.log.snapshot(),
            step_limit=self.config.step_limit,
            decay_c=self.config.decay_c,
            eps_ch_db=self.config.eps_ch_db,
            h_max_m=self.config.h_max_m,
        )

    def reset(self, start: tuple[int, int]) -> Observation:
        position = GridPoint(int(start[0]), int(start[1]))
        if not self.building_map.contains(position) or self.building_map.is_occupied(position):
            raise GeometryError(f"Episode start {position} is off-grid or inside a building")
        self.position = position
        self.log = MeasurementLog()
        self.log.append(position, self.cm.measure(position))
        self.steps = 0
        return self._observation()

    def step(self, action: int) -> StepResult:
        if self.position is None:
            raise GeometryError("step() called before reset()")

        step_limit = self.config.step_limit
        region = PermissibleRegion(self.building_map, self.position, step_limit)
        predicted = action_to_point(self.position, action, step_limit)
        actual = clamp_to_path(self.building_map, self.position, predicted, step_limit)

        z = self.cm.measure(actual)
        self.log.append(actual, z)
        self.position = actual
        self.steps += 1

        r = reward(
            predicted, actual, region, z, self.config.eps_ch_db, self.config.inclusive_threshold
        )
        terminal = is_hole(z, self.config.eps_ch_db, self.config.inclusive_threshold)
        truncated = not terminal and self.steps >= self.config.max_episode_steps
        return StepResult(
            observation=self._observation(),
            reward=r,
            terminal=terminal,
            truncated=truncated,
            predicted=predicted,
            actual=actual,
            rsrp=z,
        )
