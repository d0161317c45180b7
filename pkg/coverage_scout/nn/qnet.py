"""Two-branch Q-network mapping an observation to an n x n grid of action values."""

from collections.abc import Sequence
from typing import Any

import numpy as np
from numpy.typing import NDArray

from coverage_scout.core.types import StateTensors
from coverage_scout.exceptions import ShapeError
from coverage_scout.nn.layers import Conv2DLayer, ReLU, TConv2DLayer
from coverage_scout.nn.tensor import Tensor

Array = NDArray[np.floating]

# Total stride of branch A; the UAV at (i, j) sits at feature cell (i // 4, j // 4)
BRANCH_A_STRIDE = 4


def _crop_batch(features: Array, centers: NDArray[np.int64], n: int) -> Array:
    """(N, C, n, n) windows of (N, C, F, F) centered per sample, zero-padded."""
    batch, channels, size = features.shape[0], features.shape[1], features.shape[2]
    half = n // 2
    out = np.zeros((batch, channels, n, n), dtype=features.dtype)
    for b, (ci, cj) in enumerate(centers):
        i0, j0 = ci - half, cj - half
        si0, si1 = max(0, i0), min(size, i0 + n)
        sj0, sj1 = max(0, j0), min(size, j0 + n)
        if si0 < si1 and sj0 < sj1:
            out[b, :, si0 - i0 : si1 - i0, sj0 - j0 : sj1 - j0] = features[b, :, si0:si1, sj0:sj1]
    return out


def _uncrop_batch(d_out: Array, centers: NDArray[np.int64], shape: tuple[int, ...]) -> Array:
    d_features = np.zeros(shape, dtype=d_out.dtype)
    n, size = d_out.shape[2], shape[2]
    half = n // 2
    for b, (ci, cj) in enumerate(centers):
        i0, j0 = ci - half, cj - half
        si0, si1 = max(0, i0), min(size, i0 + n)
        sj0, sj1 = max(0, j0), min(size, j0 + n)
        if si0 < si1 and sj0 < sj1:
            d_features[b, :, si0:si1, sj0:sj1] += d_out[
                b, :, si0 - i0 : si1 - i0, sj0 - j0 : sj1 - j0
            ]
    return d_features


class QNetwork:
    """
    Five convolutions and three transposed convolutions.

    Branch A (global stack i_a): conv 3->8 k5 s2, conv 8->16 k5 s2, conv 16->16 k3.
    Branch B (local crop i_b): conv 3->16 k3, conv 16->16 k3.
    Branch A's output is cropped to n x n around the UAV's feature cell and
    concatenated with branch B (32 channels), then the head tconv 32->16->8->1
    (k3, padding 1) emits one Q-value per cell of the movement window.
    ReLU follows every layer except the last.

    Example:
        >>> net = QNetwork(step_limit=15, seed=0)
        >>> q = qnet_forward(net, state)  # (31, 31)
    """

    def __init__(self, step_limit: int, seed: int = 0, dtype: Any = np.float32):
        if step_limit < 1:
            raise ShapeError(f"Step limit must be >= 1, got {step_limit}")
        self.step_limit = step_limit
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(seed)

        def conv(cin: int, cout: int, k: int, s: int, p: int, name: str) -> Conv2DLayer:
            return Conv2DLayer(cin, cout, k, s, p, rng=rng, dtype=self.dtype, name=name)

        def tconv(cin: int, cout: int, name: str) -> TConv2DLayer:
            return TConv2DLayer(cin, cout, 3, 1, 1, rng=rng, dtype=self.dtype, name=name)

        self.branch_a = [
            conv(3, 8, 5, 2, 2, "a1"),
            conv(8, 16, 5, 2, 2, "a2"),
            conv(16, 16, 3, 1, 1, "a3"),
        ]
        self.branch_b = [conv(3, 16, 3, 1, 1, "b1"), conv(16, 16, 3, 1, 1, "b2")]
        self.head = [tconv(32, 16, "h1"), tconv(16, 8, "h2"), tconv(8, 1, "h3")]
        self.relu = ReLU()

    @property
    def window(self) -> int:
        return 2 * self.step_limit + 1

    def layers(self) -> list[Conv2DLayer | TConv2DLayer]:
        return [*self.branch_a, *self.branch_b, *self.head]

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return [(t.name, t) for layer in self.layers() for t in layer.parameters()]

    def parameters(self) -> list[Tensor]:
        return [t for _, t in self.named_parameters()]

    def num_parameters(self) -> int:
        return sum(t.size for t in self.parameters())

    def zero_grad(self) -> None:
        for t in self.parameters():
            t.zero_grad()

    def _run(self, stack: Sequence[Any], x: Array, tape: list[Any], relu_last: bool) -> Array:
        for idx, layer in enumerate(stack):
            x, cache = layer.forward(x)
            tape.append((layer, cache))
            if relu_last or idx < len(stack) - 1:
                x, cache = self.relu.forward(x)
                tape.append((self.relu, cache))
        return x

    def forward_batch(
        self, i_a: Array, i_b: Array, positions: NDArray[np.int64]
    ) -> tuple[Array, dict[str, Any]]:
        """
        Batched forward pass.

        Args:
            i_a: (N, 3, L, L) global stacks
            i_b: (N, 3, n, n) UAV-centered crops
            positions: (N, 2) UAV cells

        Returns:
            (N, n, n) Q-values and the tape needed by backward()
        """
        n = self.window
        if i_b.ndim != 4 or i_b.shape[2:] != (n, n):
            raise ShapeError(f"i_b must be (N, 3, {n}, {n}), got {i_b.shape}")
        if i_a.ndim != 4 or i_a.shape[0] != i_b.shape[0]:
            raise ShapeError(f"i_a must be (N, 3, L, L) with N={i_b.shape[0]}, got {i_a.shape}")

        i_a = np.asarray(i_a, dtype=self.dtype)
        i_b = np.asarray(i_b, dtype=self.dtype)
        centers = np.asarray(positions, dtype=np.int64).reshape(-1, 2) // BRANCH_A_STRIDE

        tape_a: list[Any] = []
        tape_b: list[Any] = []
        tape_h: list[Any] = []
        fa = self._run(self.branch_a, i_a, tape_a, relu_last=True)
        fb = self._run(self.branch_b, i_b, tape_b, relu_last=True)
        fused = np.concatenate([_crop_batch(fa, centers, n), fb], axis=1)
        q = self._run(self.head, fused, tape_h, relu_last=False)

        tape = {
            "a": tape_a,
            "b": tape_b,
            "h": tape_h,
            "centers": centers,
            "fa_shape": fa.shape,
            "split": fa.shape[1],
        }
        return q[:, 0], tape

    def backward(self, tape: dict[str, Any], dq: Array) -> tuple[Array, Array]:
        """
        Accumulate parameter gradients for upstream dq of shape (N, n, n).

        Returns:
            Gradients with respect to i_a and i_b
        """
        grad = np.asarray(dq, dtype=self.dtype)[:, None]
        for layer, cache in reversed(tape["h"]):
            grad = layer.backward(cache, grad)

        split = tape["split"]
        grad_a = _uncrop_batch(grad[:, :split], tape["centers"], tape["fa_shape"])
        grad_b = grad[:, split:]
        for layer, cache in reversed(tape["a"]):
            grad_a = layer.backward(cache, grad_a)
        for layer, cache in reversed(tape["b"]):
            grad_b = layer.backward(cache, grad_b)
        return grad_a, grad_b


def stack_states(states: Sequence[StateTensors]) -> tuple[Array, Array, NDArray[np.int64]]:
    """Batch a list of observations for forward_batch."""
    i_a = np.stack([s.i_a for s in states])
    i_b = np.stack([s.i_b for s in states])
    positions = np.array([[s.position.i, s.position.j] for s in states], dtype=np.int64)
    return i_a, i_b, positions


def qnet_forward(net: QNetwork, state: StateTensors) -> Array:
    """Q-value grid (n x n) for a single observation."""
    q, _ = net.forward_batch(*stack_states([state]))
    return q[0]


def copy_weights(src: QNetwork, dst: QNetwork) -> None:
    """Make dst's parameters bit-identical to src's."""
    src_params = src.named_parameters()
    dst_params = dst.named_parameters()
    if [(n, t.shape) for n, t in src_params] != [(n, t.shape) for n, t in dst_params]:
        raise ShapeError("Cannot copy weights between networks of different architecture")
    for (_, s), (_, d) in zip(src_params, dst_params):
        d.values = s.values.copy()
