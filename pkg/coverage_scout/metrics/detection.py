"""Precision and recall of coverage-hole predictions."""

from collections.abc import Collection, Sequence

from coverage_scout.exceptions import ValidationError
from coverage_scout.metrics.base import BaseMetric, count_true


class PrecisionMetric(BaseMetric):
    """
    Share of predictions that land in a coverage hole.

    Score = (predictions in the hole set, duplicates counted) / (number of predictions)
    """

    name = "precision"

    def compute(
        self,
        predictions: Sequence[tuple[int, int]],
        holes: Collection[tuple[int, int]],
    ) -> float:
        if not predictions:
            raise ValidationError("Precision needs at least one prediction")
        true_count, _ = count_true(predictions, holes)
        return true_count / len(predictions)


class RecallMetric(BaseMetric):
    """
    Share of hole cells found.

    Score = (distinct hole cells among predictions) / (number of hole cells)
    """

    name = "recall"

    def compute(
        self,
        predictions: Sequence[tuple[int, int]],
        holes: Collection[tuple[int, int]],
    ) -> float:
        if not holes:
            raise ValidationError("Recall is undefined on a map without coverage holes")
        _, unique_true = count_true(predictions, holes)
        return unique_true / len(holes)
