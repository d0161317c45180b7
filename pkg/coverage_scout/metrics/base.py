"""Base class for all detection metrics."""

from abc import ABC, abstractmethod
from collections.abc import Collection, Sequence
from typing import Any

from coverage_scout.core.types import GridPoint, MetricScore


def count_true(
    predictions: Sequence[tuple[int, int]], holes: Collection[tuple[int, int]]
) -> tuple[int, int]:
    """(predictions inside the hole set, distinct cells among them)."""
    hits = [GridPoint(int(p[0]), int(p[1])) for p in predictions if tuple(p) in holes]
    return len(hits), len(set(hits))


class BaseMetric(ABC):
    """Abstract base class for all metrics."""

    name: str = "base_metric"

    @abstractmethod
    def compute(
        self,
        predictions: Sequence[tuple[int, int]],
        holes: Collection[tuple[int, int]],
    ) -> float:
        """
        Compute metric score.

        Args:
            predictions: Final predicted cells, duplicates allowed
            holes: Coverage-hole cells of the map

        Returns:
            Score between 0.0 and 1.0
        """
        pass

    def evaluate(
        self,
        predictions: Sequence[tuple[int, int]],
        holes: Collection[tuple[int, int]],
    ) -> MetricScore:
        """Compute the score and wrap it with counting details."""
        value = self.compute(predictions, holes)
        return MetricScore(
            metric_name=self.name,
            value=value,
            details=self._get_details(predictions, holes),
        )

    def _get_details(
        self,
        predictions: Sequence[tuple[int, int]],
        holes: Collection[tuple[int, int]],
    ) -> dict[str, Any]:
        true_count, unique_true = count_true(predictions, holes)
        return {
            "n_predictions": len(predictions),
            "true_count": true_count,
            "unique_true_count": unique_true,
            "ch_count": len(holes),
        }
