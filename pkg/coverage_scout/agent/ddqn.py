"""Double DQN: reward, action selection, targets, loss and the agent object."""

from collections.abc import Container, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from coverage_scout.agent.encoding import Observation, num_actions
from coverage_scout.agent.replay import ReplayBuffer, Transition
from coverage_scout.core.config import AgentConfig
from coverage_scout.core.types import GridPoint, StateTensors, is_hole
from coverage_scout.exceptions import CheckpointError, TrainingError
from coverage_scout.nn.checkpoint import (
    load_checkpoint,
    restore_network,
    restore_optimizer,
    save_checkpoint,
)
from coverage_scout.nn.optim import Adam
from coverage_scout.nn.qnet import QNetwork, copy_weights, qnet_forward, stack_states
from coverage_scout.utils.logging import get_logger

logger = get_logger(__name__)

REWARD_HOLE = 0.0
REWARD_INVALID = -1.25
REWARD_STEP = -0.25


def reward(
    predicted: GridPoint,
    actual: GridPoint,
    permissible: Container[tuple[int, int]],
    z_next: float,
    eps_ch_db: float,
    inclusive: bool = True,
) -> float:
    """
    Step reward.

    A hole at the reached cell wins even when the prediction itself was not
    permissible; otherwise an impermissible prediction costs -1.25 and any
    other move -0.25. ``actual`` is the clamped cell z_next was measured at.
    """
    if is_hole(z_next, eps_ch_db, inclusive):
        return REWARD_HOLE
    if predicted not in permissible:
        return REWARD_INVALID
    return REWARD_STEP


def greedy_action(q: NDArray[np.floating]) -> int:
    """Row-major argmax; the first maximum wins."""
    return int(np.argmax(np.asarray(q).ravel()))


def select_action(
    net: QNetwork, state: StateTensors, epsilon: float, rng: np.random.Generator
) -> int:
    """Epsilon-greedy over all (2l+1)^2 actions."""
    if not 0.0 <= epsilon <= 1.0:
        raise TrainingError(f"Exploration probability must be in [0, 1], got {epsilon}")
    if rng.random() < epsilon:
        return int(rng.integers(0, num_actions(net.step_limit)))
    return greedy_action(qnet_forward(net, state))


def _batch_tensors(
    observations: Sequence[Observation], dtype: Any
) -> tuple[NDArray[np.floating], NDArray[np.floating], NDArray[np.int64]]:
    return stack_states([o.tensors(dtype) for o in observations])


def td_target(
    batch: Sequence[Transition], policy: QNetwork, target: QNetwork, gamma: float
) -> NDArray[np.float64]:
    """
    y = r for terminal transitions, else r + gamma * Q_target(h', argmax_a' Q_policy(h', a')).
    """
    rewards = np.array([t.reward for t in batch], dtype=np.float64)
    terminal = np.array([t.terminal for t in batch], dtype=bool)
    if terminal.all() or gamma == 0.0:
        return rewards

    inputs = _batch_tensors([t.next_state for t in batch], policy.dtype)
    q_policy, _ = policy.forward_batch(*inputs)
    q_target, _ = target.forward_batch(*inputs)
    n = len(batch)
    best = np.argmax(q_policy.reshape(n, -1), axis=1)
    bootstrap = q_target.reshape(n, -1)[np.arange(n), best].astype(np.float64)
    return np.where(terminal, rewards, rewards + gamma * bootstrap)


def loss(
    batch: Sequence[Transition],
    targets: NDArray[np.float64],
    policy: QNetwork,
    alpha: float,
) -> float:
    """
    Mean over the batch of (y - Q_policy(h, a))^2 + alpha * r^2.

    Gradients of the squared TD error accumulate on the policy parameters;
    targets and the reward term are constants.
    """
    if alpha < 0:
        raise TrainingError(f"alpha must be >= 0, got {alpha}")
    n = len(batch)
    actions = np.array([t.action for t in batch], dtype=np.int64)
    rewards = np.array([t.reward for t in batch], dtype=np.float64)

    q, tape = policy.forward_batch(*_batch_tensors([t.state for t in batch], policy.dtype))
    flat = q.reshape(n, -1)
    q_taken = flat[np.arange(n), actions].astype(np.float64)
    td_error = q_taken - targets
    value = float(np.mean(td_error**2 + alpha * rewards**2))

    dq = np.zeros_like(flat, dtype=np.float64)
    dq[np.arange(n), actions] = 2.0 * td_error / n
    policy.backward(tape, dq.reshape(q.shape))
    return value


@dataclass(frozen=True)
class EpsilonSchedule:
    """Linear decay from start to end over decay_steps environment steps."""

    start: float = 1.0
    end: float = 0.05
    decay_steps: int = 50_000

    def value(self, step: int) -> float:
        fraction = min(1.0, max(0, step) / self.decay_steps)
        return self.start + (self.end - self.start) * fraction


class DDQNAgent:
    """
    Policy and target networks, optimizer, replay buffer and counters.

    One gradient step is taken per ``train_every`` environment steps once the
    buffer holds a batch; the target is synced every ``target_sync_steps``
    gradient steps.
    """

    def __init__(self, config: AgentConfig, seed: int = 0):
        self.config = config
        self.policy = QNetwork(config.step_limit, seed=seed, dtype=config.dtype)
        self.target = QNetwork(config.step_limit, seed=seed, dtype=config.dtype)
        copy_weights(self.policy, self.target)
        self.optimizer = Adam(
            self.policy.parameters(),
            lr=config.learning_rate,
            beta1=config.adam_beta1,
            beta2=config.adam_beta2,
            eps=config.adam_eps,
        )
        self.buffer = ReplayBuffer(config.buffer_capacity, seed=seed + 1)
        self.rng = np.random.default_rng(seed + 2)
        self.schedule = EpsilonSchedule(
            config.epsilon_start, config.epsilon_end, config.epsilon_decay_steps
        )
        self.episodes = 0
        self.env_steps = 0
        self.grad_steps = 0

    @property
    def epsilon(self) -> float:
        return self.schedule.value(self.env_steps)

    def act(self, observation: Observation, greedy: bool = False) -> int:
        epsilon = 0.0 if greedy else self.epsilon
        return select_action(self.policy, observation.tensors(self.policy.dtype), epsilon, self.rng)

    def observe(self, transition: Transition) -> float | None:
        """Store a transition; returns the loss when a gradient step was taken."""
        self.buffer.push(transition)
        self.env_steps += 1
        if (
            self.buffer.can_sample(self.config.batch_size)
            and self.env_steps % self.config.train_every == 0
        ):
            return self.learn()
        return None

    def learn(self) -> float:
        batch = self.buffer.sample(self.config.batch_size)
        targets = td_target(batch, self.policy, self.target, self.config.gamma)
        self.optimizer.zero_grad()
        value = loss(batch, targets, self.policy, self.config.alpha)
        if not np.isfinite(value):
            raise TrainingError(
                f"Loss became {value} at gradient step {self.grad_steps + 1} "
                f"(env step {self.env_steps}, episode {self.episodes}); "
                f"try a lower learning rate than {self.config.learning_rate}"
            )
        self.optimizer.step()
        self.grad_steps += 1
        if self.grad_steps % self.config.target_sync_steps == 0:
            copy_weights(self.policy, self.target)
            logger.debug(f"Target network synced at gradient step {self.grad_steps}")
        return value

    def counters(self) -> dict[str, int]:
        return {
            "episodes": self.episodes,
            "env_steps": self.env_steps,
            "grad_steps": self.grad_steps,
        }

    def save(self, path: str | Path, metadata: dict[str, Any] | None = None) -> Path:
        meta = dict(metadata or {})
        meta["counters"] = self.counters()
        return save_checkpoint(path, self.policy, self.optimizer, meta)

    def load(self, path: str | Path) -> None:
        """Restore weights, optimizer moments and counters for resumed training."""
        checkpoint = load_checkpoint(path)
        if checkpoint.step_limit != self.config.step_limit:
            raise CheckpointError(
                f"Checkpoint {path} was trained with step limit {checkpoint.step_limit}, "
                f"config asks for {self.config.step_limit}"
            )
        restore_network(checkpoint, self.policy)
        copy_weights(self.policy, self.target)
        restore_optimizer(checkpoint, self.optimizer)
        counters = checkpoint.counters
        self.episodes = counters.get("episodes", 0)
        self.env_steps = counters.get("env_steps", 0)
        self.grad_steps = counters.get("grad_steps", 0)
        logger.info(
            f"Resumed from {path}: {self.episodes} episodes, {self.env_steps} env steps, "
            f"{self.grad_steps} gradient steps"
        )
