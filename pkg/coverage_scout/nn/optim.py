"""Adam optimizer."""

from typing import Any

import numpy as np
from numpy.typing import NDArray

from coverage_scout.exceptions import ShapeError
from coverage_scout.nn.tensor import Tensor


def adam_step(
    param: NDArray[np.floating],
    grad: NDArray[np.floating],
    m: NDArray[np.floating],
    v: NDArray[np.floating],
    t: int,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """
    One bias-corrected Adam update, in place on param, m and v.

    Args:
        t: 1-based index of this update
    """
    if not (param.shape == grad.shape == m.shape == v.shape):
        raise ShapeError(
            f"Adam buffers disagree: param {param.shape}, grad {grad.shape}, "
            f"m {m.shape}, v {v.shape}"
        )
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    param -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(param.dtype, copy=False)


class Adam:
    """Adam over a list of Tensors, reading each tensor's accumulated grad."""

    def __init__(
        self,
        params: list[Tensor],
        lr: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.values) for p in params]
        self.v = [np.zeros_like(p.values) for p in params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        self.t += 1
        for p, m, v in zip(self.params, self.m, self.v):
            if p.grad is None:
                continue
            adam_step(p.values, p.grad, m, v, self.t, self.lr, self.beta1, self.beta2, self.eps)

    def state_dict(self) -> dict[str, Any]:
        """Moments keyed by parameter name, plus the step counter."""
        return {
            "t": self.t,
            "m": {p.name: m for p, m in zip(self.params, self.m)},
            "v": {p.name: v for p, v in zip(self.params, self.v)},
        }

    def load_state_dict(self, state: dict[str, Any]) -> None:
        self.t = int(state["t"])
        for idx, p in enumerate(self.params):
            for key, buffers in (("m", self.m), ("v", self.v)):
                saved = np.asarray(state[key][p.name])
                if saved.shape != p.values.shape:
                    raise ShapeError(
                        f"Adam {key} for {p.name}: shape {saved.shape} != {p.values.shape}"
                    )
                buffers[idx] = saved.astype(p.values.dtype, copy=True)
