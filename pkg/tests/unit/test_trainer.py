"""Unit tests for the training loop."""

import numpy as np
import pytest

from coverage_scout.agent.trainer import (
    CHECKPOINT_NAME,
    TRAINING_LOG_NAME,
    load_training_set,
    start_candidates,
    train,
)
from coverage_scout.core.config import AgentConfig
from coverage_scout.nn.checkpoint import load_checkpoint
from coverage_scout.nn.qnet import QNetwork
from coverage_scout.reporting.csv import CSVReporter
from coverage_scout.exceptions import TrainingError
from tests.fixtures.maps import make_coverage, make_map, write_coverage_corpus

CONFIG = AgentConfig(
    step_limit=2,
    batch_size=4,
    buffer_capacity=100,
    max_episode_steps=4,
    epsilon_decay_steps=40,
    target_sync_steps=3,
    learning_rate=1e-3,
    dtype="float64",
)


def _corpus(tmp_path):
    pairs = []
    for shift in range(2):
        building_map = make_map(12, occupied=[(4, 4 + shift), (4, 5 + shift), (5, 4 + shift)])
        rsrp = np.full((12, 12), -60.0)
        rsrp[10:, :] = -110.0
        pairs.append((building_map, make_coverage(building_map, rsrp)))
    return write_coverage_corpus(tmp_path / "corpus", pairs)


class TestStartCandidates:
    """Tests for training start cells."""

    def test_excludes_holes_and_buildings(self):
        """Test that starts are outdoor and not yet in a hole."""
        building_map = make_map(4, occupied=[(0, 0)])
        rsrp = np.full((4, 4), -60.0)
        rsrp[3, :] = -100.0
        starts = start_candidates(building_map, make_coverage(building_map, rsrp), CONFIG)

        cells = {tuple(c) for c in starts.tolist()}
        assert (0, 0) not in cells
        assert all(i != 3 for i, _ in cells)
        assert len(cells) == 11

    def test_all_holes_dropped(self, tmp_path):
        """Test that a corpus without start cells is unusable."""
        building_map = make_map(4)
        cm = make_coverage(building_map, np.full((4, 4), -130.0))
        manifest = write_coverage_corpus(tmp_path, [(building_map, cm)])

        with pytest.raises(TrainingError, match="No usable"):
            load_training_set(manifest, CONFIG)


class TestTrain:
    """Tests for train()."""

    def test_zero_episodes_keeps_init(self, tmp_path):
        """Test that an empty run checkpoints the initialization."""
        config = CONFIG.model_copy(update={"episodes": 0})
        result = train(_corpus(tmp_path), config, seed=4, output_dir=tmp_path / "out")

        checkpoint = load_checkpoint(result.checkpoint_path)
        fresh = QNetwork(step_limit=2, seed=4, dtype=np.float64)
        for name, tensor in fresh.named_parameters():
            assert np.array_equal(checkpoint.arrays[f"policy/{name}"], tensor.values)
        assert result.log == []

    def test_outputs_and_log(self, tmp_path):
        """Test the files written and the per-episode rows."""
        config = CONFIG.model_copy(update={"episodes": 6})
        out = tmp_path / "out"
        result = train(_corpus(tmp_path), config, seed=0, output_dir=out, log_every=2)

        assert (out / CHECKPOINT_NAME).exists()
        rows = CSVReporter.load_training_log(out / TRAINING_LOG_NAME)
        assert [r.episode for r in rows] == [1, 2, 3, 4, 5, 6]
        assert all(1 <= r.steps <= 4 for r in rows)
        assert rows[0].epsilon == 1.0
        assert 0.0 <= result.detection_rate <= 1.0
        assert result.agent.episodes == 6

    def test_deterministic(self, tmp_path):
        """Test that the same seed gives identical logs and checkpoints."""
        config = CONFIG.model_copy(update={"episodes": 5})
        manifest = _corpus(tmp_path)
        train(manifest, config, seed=2, output_dir=tmp_path / "a")
        train(manifest, config, seed=2, output_dir=tmp_path / "b")

        for name in (TRAINING_LOG_NAME, CHECKPOINT_NAME):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_resume_continues_counters(self, tmp_path):
        """Test that resumed training numbers episodes after the checkpoint."""
        manifest = _corpus(tmp_path)
        config = CONFIG.model_copy(update={"episodes": 3})
        first = train(manifest, config, seed=1, output_dir=tmp_path / "first")

        second = train(
            manifest,
            config,
            seed=1,
            output_dir=tmp_path / "second",
            resume=first.checkpoint_path,
        )

        assert [r.episode for r in second.log] == [4, 5, 6]
        assert second.agent.env_steps > first.agent.env_steps

    @pytest.mark.slow
    def test_episodes_get_shorter(self, tmp_path):
        """Test that mean episode length drops between early and late training."""
        pairs = []
        for idx in range(20):
            shift = idx % 6
            building_map = make_map(16, occupied=[(6, 3 + shift), (6, 4 + shift), (7, 3 + shift)])
            rsrp = np.full((16, 16), -70.0)
            rsrp[: 1 + idx % 3, :] = -115.0
            pairs.append((building_map, make_coverage(building_map, rsrp)))
        manifest = write_coverage_corpus(tmp_path / "desk", pairs)
        config = AgentConfig(
            step_limit=3,
            episodes=2000,
            batch_size=16,
            buffer_capacity=5000,
            max_episode_steps=15,
            epsilon_decay_steps=8000,
            target_sync_steps=200,
            learning_rate=5e-4,
        )

        result = train(manifest, config, seed=0, log_every=500)

        early = np.mean([r.steps for r in result.log[:500]])
        late = np.mean([r.steps for r in result.log[-500:]])
        assert late < early
