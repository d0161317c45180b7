"""DDQN agent, state encoding and the training loop."""

from coverage_scout.agent.ddqn import DDQNAgent, EpsilonSchedule, loss, reward, td_target
from coverage_scout.agent.encoding import Observation, build_state
from coverage_scout.agent.environment import CoverageHoleEnv
from coverage_scout.agent.replay import ReplayBuffer, Transition

__all__ = [
    "CoverageHoleEnv",
    "DDQNAgent",
    "EpsilonSchedule",
    "Observation",
    "ReplayBuffer",
    "Transition",
    "build_state",
    "loss",
    "reward",
    "td_target",
]
