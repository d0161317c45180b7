"""Unit tests for the Adam optimizer."""

import numpy as np
import pytest

from coverage_scout.exceptions import ShapeError
from coverage_scout.nn.optim import Adam, adam_step
from coverage_scout.nn.tensor import Tensor


class TestAdamStep:
    """Tests for the update rule."""

    def test_first_step_is_lr(self):
        """Test the bias-corrected first step on a scalar."""
        param = np.array([0.5])
        adam_step(param, np.array([1.0]), np.zeros(1), np.zeros(1), t=1, lr=0.001)

        assert param[0] == pytest.approx(0.5 - 0.001, rel=1e-6)

    def test_zero_gradient(self):
        """Test that a zero gradient leaves the parameter unchanged."""
        param = np.array([0.5, -2.0])
        adam_step(param, np.zeros(2), np.zeros(2), np.zeros(2), t=1, lr=0.1)

        assert param.tolist() == [0.5, -2.0]

    def test_shape_mismatch(self):
        """Test buffer validation."""
        with pytest.raises(ShapeError):
            adam_step(np.zeros(2), np.zeros(3), np.zeros(2), np.zeros(2), t=1, lr=0.1)


class TestAdam:
    """Tests for the optimizer wrapper."""

    def test_minimizes_quadratic(self):
        """Test convergence on (w - 3)^2."""
        w = Tensor(np.array([0.0]), name="w")
        opt = Adam([w], lr=0.1)
        for _ in range(500):
            opt.zero_grad()
            w.accumulate(2 * (w.values - 3.0))
            opt.step()

        assert w.values[0] == pytest.approx(3.0, abs=1e-2)
        assert opt.t == 500

    def test_state_round_trip(self):
        """Test that restored moments continue identically."""
        w1 = Tensor(np.array([1.0, 2.0]), name="w")
        w2 = Tensor(np.array([1.0, 2.0]), name="w")
        opt1 = Adam([w1], lr=0.01)
        for _ in range(3):
            opt1.zero_grad()
            w1.accumulate(np.array([0.3, -0.7]))
            opt1.step()

        w2.assign(w1.values)
        opt2 = Adam([w2], lr=0.01)
        opt2.load_state_dict(opt1.state_dict())
        for opt, w in ((opt1, w1), (opt2, w2)):
            opt.zero_grad()
            w.accumulate(np.array([0.1, 0.1]))
            opt.step()

        assert np.array_equal(w1.values, w2.values)

    def test_untouched_parameters_skipped(self):
        """Test that parameters without gradients stay put."""
        w = Tensor(np.array([1.0]), name="w")
        Adam([w], lr=0.5).step()

        assert w.values[0] == 1.0
