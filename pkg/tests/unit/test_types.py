"""Unit tests for core types."""

import math

import numpy as np
import pytest

from coverage_scout.core.types import (
    BaseStation,
    BuildingMap,
    CoverageMap,
    GridPoint,
    MeasurementLog,
    MetricScore,
    RunResult,
    Trajectory,
    is_hole,
)
from coverage_scout.exceptions import ValidationError


class TestBuildingMap:
    """Tests for BuildingMap."""

    def test_occupancy_uses_altitude(self):
        """Test that cells at or above the evaluation height are occupied."""
        heights = np.array([[0.0, 1.9], [2.0, 30.0]])
        building_map = BuildingMap(heights=heights, altitude_m=2.0)

        assert building_map.side == 2
        assert building_map.occupied.tolist() == [[False, False], [True, True]]
        assert building_map.occupied_fraction == 0.5
        assert building_map.is_occupied((1, 0))
        assert not building_map.is_occupied((0, 1))

    def test_contains(self):
        """Test grid bounds."""
        building_map = BuildingMap(heights=np.zeros((3, 3)))

        assert building_map.contains((0, 0))
        assert building_map.contains((2, 2))
        assert not building_map.contains((3, 0))
        assert not building_map.contains((0, -1))

    def test_heights_are_frozen(self):
        """Test that the stored raster is a read-only copy."""
        source = np.zeros((2, 2))
        building_map = BuildingMap(heights=source)
        source[0, 0] = 50.0

        assert building_map.heights[0, 0] == 0.0
        with pytest.raises(ValueError):
            building_map.heights[0, 0] = 1.0

    def test_rejects_non_square(self):
        """Test validation of the raster shape."""
        with pytest.raises(ValidationError, match="square"):
            BuildingMap(heights=np.zeros((2, 3)))

    def test_rejects_negative_height(self):
        """Test validation of height values."""
        with pytest.raises(ValidationError):
            BuildingMap(heights=np.array([[0.0, -1.0], [0.0, 0.0]]))


class TestCoverageMap:
    """Tests for CoverageMap."""

    def test_measure(self):
        """Test RSRP lookup including the NaN sentinel."""
        cm = CoverageMap(
            rsrp=np.array([[-60.0, np.nan], [-110.0, -90.0]]),
            bs=BaseStation(cell=GridPoint(0, 0)),
        )

        assert cm.measure((0, 0)) == -60.0
        assert math.isnan(cm.measure((0, 1)))
        assert cm.side == 2


class TestIsHole:
    """Tests for the coverage-hole predicate."""

    def test_inclusive_and_strict(self):
        """Test boundary handling in both modes."""
        assert is_hole(-100.0, -100.0, inclusive=True)
        assert not is_hole(-100.0, -100.0, inclusive=False)
        assert is_hole(-100.5, -100.0, inclusive=False)
        assert not is_hole(-99.0, -100.0)

    def test_nan_is_never_a_hole(self):
        """Test that missing measurements never count."""
        assert not is_hole(float("nan"), -100.0)


class TestMeasurementLog:
    """Tests for MeasurementLog."""

    def test_append_and_views(self):
        """Test ordered storage."""
        log = MeasurementLog()
        log.append(GridPoint(1, 2), -70)
        log.append(GridPoint(3, 4), -80.5)

        assert len(log) == 2
        assert log.positions == [GridPoint(1, 2), GridPoint(3, 4)]
        assert log.values == [-70.0, -80.5]
        assert log.snapshot() == ((GridPoint(1, 2), -70.0), (GridPoint(3, 4), -80.5))


class TestTrajectory:
    """Tests for Trajectory truncation."""

    def _trajectory(self) -> Trajectory:
        return Trajectory(
            waypoints=[GridPoint(5, 5), GridPoint(4, 5), GridPoint(3, 5)],
            measurements=[-60.0, -95.0, -101.0],
            steps_taken=2,
            found_ch=True,
        )

    def test_truncated_prefix(self):
        """Test that a shorter budget keeps the prefix."""
        short = self._trajectory().truncated(1)

        assert short.waypoints == [GridPoint(5, 5), GridPoint(4, 5)]
        assert short.steps_taken == 1
        assert short.final_prediction == GridPoint(4, 5)
        assert not short.found_ch

    def test_truncated_beyond_length(self):
        """Test that a larger budget returns the whole trajectory."""
        full = self._trajectory().truncated(10)

        assert full.steps_taken == 2
        assert full.final_prediction == GridPoint(3, 5)
        assert full.found_ch


class TestResultRecords:
    """Tests for score and run records."""

    def test_metric_score_range(self):
        """Test MetricScore validation."""
        assert MetricScore(metric_name="precision", value=0.75).value == 0.75
        with pytest.raises(ValueError):
            MetricScore(metric_name="precision", value=1.5)

    def test_run_result_range(self):
        """Test RunResult validation."""
        with pytest.raises(ValueError):
            RunResult(
                map_id="m",
                method="rsp",
                k=0,
                n_sam=1,
                predictions=[],
                true_count=0,
                unique_true_count=0,
                ch_count=1,
                precision=0.5,
                recall=-0.1,
            )
