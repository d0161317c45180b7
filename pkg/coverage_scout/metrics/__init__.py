"""Metrics for coverage-hole detection."""

from coverage_scout.metrics.base import BaseMetric, count_true
from coverage_scout.metrics.detection import PrecisionMetric, RecallMetric

__all__ = [
    "BaseMetric",
    "PrecisionMetric",
    "RecallMetric",
    "count_true",
]
