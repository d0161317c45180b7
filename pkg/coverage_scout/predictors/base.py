"""Predictor interface and coverage-access control."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum

from coverage_scout.core.types import BuildingMap, CoverageMap, GridPoint, MeasurementLog
from coverage_scout.exceptions import ConfigurationError


class CoverageAccess(str, Enum):
    """What a predictor may read from the coverage map."""

    FULL_MAP = "full_map"
    POINT_MEASUREMENTS = "point_measurements"


class StartPool(str, Enum):
    """Cells a method's start points are drawn from."""

    OUTDOOR = "outdoor"
    NEIGHBORHOOD = "neighborhood"


class CoverageView:
    """
    Coverage map behind an access policy.

    Point measurements are always available; the full raster only with
    FULL_MAP access.
    """

    def __init__(self, cm: CoverageMap, access: CoverageAccess):
        self._cm = cm
        self.access = access

    def measure(self, p: tuple[int, int]) -> float:
        return self._cm.measure(p)

    @property
    def full_map(self) -> CoverageMap:
        if self.access is not CoverageAccess.FULL_MAP:
            raise ConfigurationError(
                f"Predictor with {self.access.value} access tried to read the full coverage map"
            )
        return self._cm


@dataclass
class PredictionContext:
    """Everything a predictor may look at when choosing the next waypoint."""

    building_map: BuildingMap
    view: CoverageView
    position: GridPoint
    log: MeasurementLog
    step_limit: int


class BasePredictor(ABC):
    """Abstract base class for all waypoint predictors."""

    name: str = "base"
    coverage_access: CoverageAccess = CoverageAccess.POINT_MEASUREMENTS
    start_pool: StartPool = StartPool.OUTDOOR
    # One-shot predictors report their start point and never move
    one_shot: bool = False

    @abstractmethod
    def predict(self, context: PredictionContext) -> GridPoint:
        """
        Predict the next waypoint.

        Args:
            context: Map, coverage view, current cell and measurements so far

        Returns:
            Predicted cell; it may be impermissible or even off-grid, the
            rollout clamps it
        """
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"
