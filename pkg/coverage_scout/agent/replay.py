"""Uniform experience replay."""

from dataclasses import dataclass

import numpy as np

from coverage_scout.agent.encoding import Observation
from coverage_scout.exceptions import TrainingError


@dataclass(frozen=True)
class Transition:
    """(h, a, r, h') with a terminal flag; terminal transitions are never bootstrapped."""

    state: Observation
    action: int
    reward: float
    next_state: Observation
    terminal: bool


class ReplayBuffer:
    """
    Fixed-capacity ring buffer with seeded uniform sampling (with replacement).

    Example:
        >>> buffer = ReplayBuffer(capacity=50_000, seed=1)
        >>> buffer.push(transition)
        >>> batch = buffer.sample(32)
    """

    def __init__(self, capacity: int, seed: int = 0):
        if capacity < 1:
            raise TrainingError(f"Replay capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._next = 0
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return len(self._items)

    def push(self, transition: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(transition)
        else:
            self._items[self._next] = transition
        self._next = (self._next + 1) % self.capacity

    def can_sample(self, batch_size: int) -> bool:
        return len(self._items) >= batch_size

    def sample_indices(self, batch_size: int) -> np.ndarray:
        if not self.can_sample(batch_size):
            raise TrainingError(
                f"Cannot sample {batch_size} transitions from a buffer of {len(self._items)}"
            )
        return self._rng.integers(0, len(self._items), size=batch_size)

    def sample(self, batch_size: int) -> list[Transition]:
        return [self._items[int(i)] for i in self.sample_indices(batch_size)]
