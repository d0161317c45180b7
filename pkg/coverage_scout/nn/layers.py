"""Convolution, transposed convolution and ReLU on batched NCHW arrays.

Every layer exposes ``forward(x) -> (y, cache)`` and
``backward(cache, dy) -> dx``; parameter gradients accumulate into the
layer's Tensors.
"""

from typing import Any

import numpy as np
from numpy.lib.stride_tricks import as_strided
from numpy.typing import NDArray

from coverage_scout.exceptions import ShapeError
from coverage_scout.nn.tensor import Tensor

Array = NDArray[np.floating]


def conv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def tconv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size - 1) * stride - 2 * padding + kernel


def _windows(x: Array, kernel: int, stride: int, out_h: int, out_w: int) -> Array:
    """Read-only (N, C, out_h, out_w, k, k) view of sliding windows."""
    n, c = x.shape[:2]
    sn, sc, sh, sw = x.strides
    return as_strided(
        x,
        shape=(n, c, out_h, out_w, kernel, kernel),
        strides=(sn, sc, sh * stride, sw * stride, sh, sw),
        writeable=False,
    )


def _he_uniform(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, dtype: Any
) -> Array:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Conv2DLayer:
    """Cross-correlation with weights (out, in, k, k) and bias (out,)."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        stride: int = 1,
        padding: int = 0,
        rng: np.random.Generator | None = None,
        dtype: Any = np.float64,
        name: str = "conv",
    ):
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = padding
        self.name = name

        rng = rng if rng is not None else np.random.default_rng(0)
        shape = (out_channels, in_channels, kernel_size, kernel_size)
        self.weight = Tensor(
            _he_uniform(rng, shape, in_channels * kernel_size**2, dtype), name=f"{name}.weight"
        )
        self.bias = Tensor(np.zeros(out_channels, dtype=dtype), name=f"{name}.bias")

    def parameters(self) -> list[Tensor]:
        return [self.weight, self.bias]

    def output_size(self, size: int) -> int:
        return conv_output_size(size, self.kernel_size, self.stride, self.padding)

    def forward(self, x: Array) -> tuple[Array, dict[str, Any]]:
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ShapeError(
                f"{self.name}: expected (N, {self.in_channels}, H, W) input, got {x.shape}"
            )
        out_h = self.output_size(x.shape[2])
        out_w = self.output_size(x.shape[3])
        if out_h < 1 or out_w < 1:
            raise ShapeError(f"{self.name}: input {x.shape[2:]} too small for kernel")

        p = self.padding
        xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p))) if p else np.ascontiguousarray(x)
        windows = _windows(xp, self.kernel_size, self.stride, out_h, out_w)
        y = np.tensordot(windows, self.weight.values, axes=([1, 4, 5], [1, 2, 3]))
        y = y.transpose(0, 3, 1, 2) + self.bias.values[None, :, None, None]
        return np.ascontiguousarray(y), {"x_shape": x.shape, "windows": windows}

    def backward(self, cache: dict[str, Any], dy: Array) -> Array:
        windows = cache["windows"]
        n, c, h, w = cache["x_shape"]
        out_h, out_w = dy.shape[2], dy.shape[3]
        k, s, p = self.kernel_size, self.stride, self.padding

        self.weight.accumulate(np.tensordot(dy, windows, axes=([0, 2, 3], [0, 2, 3])))
        self.bias.accumulate(dy.sum(axis=(0, 2, 3)))

        dxp = np.zeros((n, c, h + 2 * p, w + 2 * p), dtype=dy.dtype)
        for a in range(k):
            for b in range(k):
                contrib = np.tensordot(dy, self.weight.values[:, :, a, b], axes=([1], [0]))
                dxp[:, :, a : a + s * (out_h - 1) + 1 : s, b : b + s * (out_w - 1) + 1 : s] += (
                    contrib.transpose(0, 3, 1, 2)
                )
        return dxp[:, :, p : p + h, p : p + w]


class TConv2DLayer:
    """
    Transposed convolution with weights (in, out, k, k) and bias (out,).

    The forward pass is the input gradient of a Conv2DLayer with the same
    weights and geometry.
    """

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        stride: int = 1,
        padding: int = 0,
        rng: np.random.Generator | None = None,
        dtype: Any = np.float64,
        name: str = "tconv",
    ):
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = padding
        self.name = name

        rng = rng if rng is not None else np.random.default_rng(0)
        shape = (in_channels, out_channels, kernel_size, kernel_size)
        self.weight = Tensor(
            _he_uniform(rng, shape, in_channels * kernel_size**2, dtype), name=f"{name}.weight"
        )
        self.bias = Tensor(np.zeros(out_channels, dtype=dtype), name=f"{name}.bias")

    def parameters(self) -> list[Tensor]:
        return [self.weight, self.bias]

    def output_size(self, size: int) -> int:
        return tconv_output_size(size, self.kernel_size, self.stride, self.padding)

    def forward(self, x: Array) -> tuple[Array, dict[str, Any]]:
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ShapeError(
                f"{self.name}: expected (N, {self.in_channels}, H, W) input, got {x.shape}"
            )
        n, _, h, w = x.shape
        k, s, p = self.kernel_size, self.stride, self.padding
        out_h, out_w = self.output_size(h), self.output_size(w)
        if out_h < 1 or out_w < 1:
            raise ShapeError(f"{self.name}: padding {p} leaves no output for input {(h, w)}")

        full = np.zeros((n, self.out_channels, (h - 1) * s + k, (w - 1) * s + k), dtype=x.dtype)
        for a in range(k):
            for b in range(k):
                contrib = np.tensordot(x, self.weight.values[:, :, a, b], axes=([1], [0]))
                full[:, :, a : a + s * (h - 1) + 1 : s, b : b + s * (w - 1) + 1 : s] += (
                    contrib.transpose(0, 3, 1, 2)
                )
        y = full[:, :, p : p + out_h, p : p + out_w] + self.bias.values[None, :, None, None]
        return np.ascontiguousarray(y), {"x": x}

    def backward(self, cache: dict[str, Any], dy: Array) -> Array:
        x = cache["x"]
        n, _, h, w = x.shape
        k, s, p = self.kernel_size, self.stride, self.padding

        dfull = np.zeros((n, self.out_channels, (h - 1) * s + k, (w - 1) * s + k), dtype=dy.dtype)
        dfull[:, :, p : p + dy.shape[2], p : p + dy.shape[3]] = dy
        windows = _windows(dfull, k, s, h, w)

        self.weight.accumulate(np.tensordot(x, windows, axes=([0, 2, 3], [0, 2, 3])))
        self.bias.accumulate(dy.sum(axis=(0, 2, 3)))

        dx = np.tensordot(windows, self.weight.values, axes=([1, 4, 5], [1, 2, 3]))
        return np.ascontiguousarray(dx.transpose(0, 3, 1, 2))


class ReLU:
    name = "relu"

    def parameters(self) -> list[Tensor]:
        return []

    def forward(self, x: Array) -> tuple[Array, dict[str, Any]]:
        mask = x > 0
        return x * mask, {"mask": mask}

    def backward(self, cache: dict[str, Any], dy: Array) -> Array:
        return dy * cache["mask"]


def conv2d_forward(layer: Conv2DLayer, x: Array) -> tuple[Array, dict[str, Any]]:
    return layer.forward(x)


def conv2d_backward(layer: Conv2DLayer, cache: dict[str, Any], upstream: Array) -> Array:
    """Input gradient; weight and bias gradients accumulate on the layer."""
    return layer.backward(cache, upstream)


def tconv2d_forward(layer: TConv2DLayer, x: Array) -> tuple[Array, dict[str, Any]]:
    return layer.forward(x)


def tconv2d_backward(layer: TConv2DLayer, cache: dict[str, Any], upstream: Array) -> Array:
    return layer.backward(cache, upstream)
