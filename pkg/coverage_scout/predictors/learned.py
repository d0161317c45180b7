"""Greedy DDQN policy as a waypoint predictor."""

from pathlib import Path

from coverage_scout.agent.ddqn import greedy_action
from coverage_scout.agent.encoding import action_to_point, build_state
from coverage_scout.core.config import AgentConfig
from coverage_scout.core.types import GridPoint
from coverage_scout.exceptions import ConfigurationError
from coverage_scout.nn.checkpoint import load_network
from coverage_scout.nn.qnet import QNetwork, qnet_forward
from coverage_scout.predictors.base import (
    BasePredictor,
    CoverageAccess,
    PredictionContext,
    StartPool,
)


class DDQNPredictor(BasePredictor):
    """Argmax of the policy network; sees only the measurements taken so far."""

    name = "ddqn"
    coverage_access = CoverageAccess.POINT_MEASUREMENTS
    start_pool = StartPool.OUTDOOR

    def __init__(self, net: QNetwork, config: AgentConfig):
        self.net = net
        self.config = config

    @classmethod
    def from_checkpoint(cls, path: str | Path, config: AgentConfig) -> "DDQNPredictor":
        net = load_network(path, dtype=config.dtype)
        return cls(net, config)

    def predict(self, context: PredictionContext) -> GridPoint:
        if context.step_limit != self.net.step_limit:
            raise ConfigurationError(
                f"Network was built for step limit {self.net.step_limit}, "
                f"rollout uses {context.step_limit}"
            )
        state = build_state(
            context.building_map,
            context.position,
            context.log,
            context.step_limit,
            self.config.decay_c,
            self.config.eps_ch_db,
            self.config.h_max_m,
            dtype=self.net.dtype,
        )
        action = greedy_action(qnet_forward(self.net, state))
        return action_to_point(context.position, action, context.step_limit)
