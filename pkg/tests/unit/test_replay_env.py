"""Unit tests for the replay buffer and the training environment."""

import math

import numpy as np
import pytest

from coverage_scout.agent.ddqn import REWARD_HOLE, REWARD_INVALID, REWARD_STEP
from coverage_scout.agent.encoding import Observation, offset_to_action
from coverage_scout.agent.environment import CoverageHoleEnv
from coverage_scout.agent.replay import ReplayBuffer, Transition
from coverage_scout.core.config import AgentConfig
from coverage_scout.core.types import GridPoint
from coverage_scout.exceptions import GeometryError, TrainingError
from tests.fixtures.maps import make_coverage, make_map


def _transition(tag: int) -> Transition:
    building_map = make_map(3)
    obs = Observation(building_map, GridPoint(1, 1), (), 1, 0.1, -100.0)
    return Transition(obs, tag, -0.25, obs, False)


class TestReplayBuffer:
    """Tests for ReplayBuffer."""

    def test_ring_overwrite(self):
        """Test that the oldest transitions are replaced first."""
        buffer = ReplayBuffer(capacity=3, seed=0)
        for tag in range(5):
            buffer.push(_transition(tag))

        assert len(buffer) == 3
        assert {t.action for t in buffer.sample(200)} == {2, 3, 4}

    def test_seeded_sampling(self):
        """Test that the same seed draws the same indices."""
        a, b = ReplayBuffer(10, seed=4), ReplayBuffer(10, seed=4)
        for tag in range(10):
            a.push(_transition(tag))
            b.push(_transition(tag))

        assert np.array_equal(a.sample_indices(8), b.sample_indices(8))

    def test_sampling_uniform(self):
        """Test that 100k draws from a full 1k buffer stay within 5 sigma of uniform."""
        buffer = ReplayBuffer(1000, seed=9)
        for tag in range(1000):
            buffer.push(_transition(tag))

        draws = np.concatenate([buffer.sample_indices(32) for _ in range(3125)])
        counts = np.bincount(draws, minlength=1000)

        expected = 100_000 / 1000
        sigma = math.sqrt(100_000 * (1 / 1000) * (1 - 1 / 1000))
        assert counts.sum() == 100_000
        assert np.abs(counts - expected).max() <= 5 * sigma

    def test_too_small(self):
        """Test sampling before the buffer holds a batch."""
        buffer = ReplayBuffer(10)
        buffer.push(_transition(0))

        assert not buffer.can_sample(2)
        with pytest.raises(TrainingError):
            buffer.sample(2)

    def test_bad_capacity(self):
        """Test capacity validation."""
        with pytest.raises(TrainingError):
            ReplayBuffer(0)


class TestCoverageHoleEnv:
    """Tests for CoverageHoleEnv."""

    def setup_method(self):
        # Hole row at i = 0, wall at (5, 6)
        self.building_map = make_map(11, occupied=[(5, 6)])
        rsrp = np.full((11, 11), -60.0)
        rsrp[0, :] = -120.0
        self.cm = make_coverage(self.building_map, rsrp)
        self.config = AgentConfig(step_limit=2, max_episode_steps=3)
        self.env = CoverageHoleEnv(self.building_map, self.cm, self.config)

    def test_reset_measures_start(self):
        """Test that the start measurement is logged."""
        obs = self.env.reset((5, 5))

        assert obs.position == GridPoint(5, 5)
        assert obs.measurements == ((GridPoint(5, 5), -60.0),)

    def test_reset_occupied(self):
        """Test that episodes cannot start inside a building."""
        with pytest.raises(GeometryError):
            self.env.reset((5, 6))

    def test_valid_step(self):
        """Test an ordinary move."""
        self.env.reset((5, 5))
        result = self.env.step(offset_to_action(-2, 0, 2))

        assert result.actual == GridPoint(3, 5)
        assert result.reward == REWARD_STEP
        assert not result.terminal
        assert len(result.observation.measurements) == 2

    def test_invalid_prediction_is_clamped(self):
        """Test the penalty and the clamp when predicting into a building."""
        self.env.reset((5, 5))
        result = self.env.step(offset_to_action(0, 1, 2))

        assert result.predicted == GridPoint(5, 6)
        assert result.actual == GridPoint(5, 5)
        assert result.reward == REWARD_INVALID

    def test_hole_terminates(self):
        """Test that reaching a hole ends the episode with zero reward."""
        self.env.reset((2, 3))
        result = self.env.step(offset_to_action(-2, 0, 2))

        assert result.actual == GridPoint(0, 3)
        assert result.terminal
        assert result.reward == REWARD_HOLE
        assert result.rsrp == -120.0

    def test_truncation(self):
        """Test the step cap."""
        self.env.reset((8, 8))
        stay = offset_to_action(0, 0, 2)
        results = [self.env.step(stay) for _ in range(3)]

        assert [r.truncated for r in results] == [False, False, True]
        assert not any(r.terminal for r in results)

    def test_off_grid_prediction(self):
        """Test that predictions past the border are cut at the edge."""
        self.env.reset((10, 10))
        result = self.env.step(offset_to_action(2, 2, 2))

        assert result.actual == GridPoint(10, 10)
        assert result.reward == REWARD_INVALID
        assert not math.isnan(result.rsrp)

    def test_step_before_reset(self):
        """Test that stepping requires a start."""
        with pytest.raises(GeometryError):
            self.env.step(0)
