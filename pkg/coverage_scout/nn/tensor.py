"""Parameter container for the numpy network engine."""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from coverage_scout.exceptions import ShapeError


@dataclass(eq=False)
class Tensor:
    """
    Dense array with an optional gradient buffer of the same shape.

    Attributes:
        values: Parameter values
        grad: Accumulated gradient, allocated on first use
        name: Qualified name used by checkpoints (e.g. ``a1.weight``)
    """

    values: NDArray[np.floating]
    grad: NDArray[np.floating] | None = None
    name: str = field(default="")

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values)
        if self.grad is not None and self.grad.shape != self.values.shape:
            raise ShapeError(
                f"Gradient shape {self.grad.shape} does not match value shape {self.values.shape}"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.values.shape)

    @property
    def size(self) -> int:
        return int(self.values.size)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.values)

    def accumulate(self, g: NDArray[np.floating]) -> None:
        if g.shape != self.values.shape:
            raise ShapeError(f"{self.name}: gradient shape {g.shape} != {self.values.shape}")
        if self.grad is None:
            self.grad = np.array(g, dtype=self.values.dtype, copy=True)
        else:
            self.grad += g

    def assign(self, values: NDArray[np.floating]) -> None:
        """Overwrite values in place, keeping dtype."""
        if values.shape != self.values.shape:
            raise ShapeError(f"{self.name}: cannot assign {values.shape} to {self.values.shape}")
        self.values[...] = values
