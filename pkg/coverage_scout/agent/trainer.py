"""DDQN training loop over a coverage corpus."""

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from coverage_scout.agent.ddqn import DDQNAgent
from coverage_scout.agent.environment import CoverageHoleEnv
from coverage_scout.agent.replay import Transition
from coverage_scout.core.config import AgentConfig
from coverage_scout.core.loader import CoverageManifest
from coverage_scout.core.types import BuildingMap, CoverageMap, EpisodeLog
from coverage_scout.exceptions import TrainingError
from coverage_scout.reporting.csv import CSVReporter
from coverage_scout.utils.logging import get_logger

logger = get_logger(__name__)

CHECKPOINT_NAME = "policy.qnet"
TRAINING_LOG_NAME = "training_log.csv"


@dataclass
class TrainingMap:
    """A building map with its coverage maps and per-coverage-map start cells."""

    building_map: BuildingMap
    coverage_maps: list[CoverageMap] = field(default_factory=list)
    starts: list[NDArray[np.int64]] = field(default_factory=list)


@dataclass
class TrainingResult:
    agent: DDQNAgent
    log: list[EpisodeLog]
    checkpoint_path: Path | None = None
    log_path: Path | None = None

    @property
    def detection_rate(self) -> float:
        if not self.log:
            return 0.0
        return sum(r.found_ch for r in self.log) / len(self.log)


def start_candidates(
    building_map: BuildingMap, cm: CoverageMap, config: AgentConfig
) -> NDArray[np.int64]:
    """Unoccupied cells that do not already terminate an episode."""
    rsrp = cm.rsrp
    with np.errstate(invalid="ignore"):
        hole = rsrp <= config.eps_ch_db if config.inclusive_threshold else rsrp < config.eps_ch_db
    return np.argwhere(~building_map.occupied & ~hole & ~np.isnan(rsrp))


def load_training_set(manifest: CoverageManifest, config: AgentConfig) -> list[TrainingMap]:
    """Group coverage maps by building map; pairs without a valid start are dropped."""
    grouped: dict[str, TrainingMap] = {}
    pending: dict[str, list[CoverageMap]] = defaultdict(list)
    for entry in manifest:
        building_map, cm = manifest.load_pair(entry, config.eps_ch_db)
        if entry.map_file not in grouped:
            grouped[entry.map_file] = TrainingMap(building_map=building_map)
        pending[entry.map_file].append(cm)

    maps = []
    for name, tmap in grouped.items():
        for cm in pending[name]:
            starts = start_candidates(tmap.building_map, cm, config)
            if len(starts) == 0:
                logger.warning(f"{name}: every outdoor cell is a coverage hole, skipping")
                continue
            tmap.coverage_maps.append(cm)
            tmap.starts.append(starts)
        if tmap.coverage_maps:
            maps.append(tmap)

    if not maps:
        raise TrainingError(f"No usable training maps in {manifest.root}")
    return maps


def run_episode(
    agent: DDQNAgent, env: CoverageHoleEnv, start: tuple[int, int]
) -> tuple[int, float, bool, list[float]]:
    """Roll one epsilon-greedy episode, learning online. Returns (steps, return, found, losses)."""
    observation = env.reset(start)
    total = 0.0
    losses: list[float] = []
    while True:
        action = agent.act(observation)
        result = env.step(action)
        step_loss = agent.observe(
            Transition(
                state=observation,
                action=action,
                reward=result.reward,
                next_state=result.observation,
                terminal=result.terminal,
            )
        )
        if step_loss is not None:
            losses.append(step_loss)
        total += result.reward
        observation = result.observation
        if result.terminal or result.truncated:
            return env.steps, total, result.terminal, losses


def train(
    manifest: CoverageManifest,
    config: AgentConfig,
    seed: int = 0,
    output_dir: str | Path | None = None,
    resume: str | Path | None = None,
    log_every: int = 50,
) -> TrainingResult:
    """
    Train a DDQN agent.

    Each episode samples a map, one of its base stations and a start cell
    that is neither occupied nor already a hole, all uniformly.

    Args:
        manifest: Coverage manifest of the training corpus
        config: Agent and schedule settings; ``config.episodes`` episodes are run
        seed: Seeds the network init, the replay sampler, exploration and episode sampling
        output_dir: If set, training_log.csv and policy.qnet are written there
        resume: Checkpoint to continue from (weights, optimizer moments, counters)
        log_every: Progress log interval in episodes

    Returns:
        TrainingResult with the agent and per-episode log

    Raises:
        TrainingError: On an empty corpus or a non-finite loss
    """
    maps = load_training_set(manifest, config)
    agent = DDQNAgent(config, seed=seed)
    if resume is not None:
        agent.load(resume)

    rng = np.random.default_rng([seed, agent.episodes])
    logger.info(
        f"Training on {len(maps)} maps for {config.episodes} episodes "
        f"({agent.policy.num_parameters()} parameters, l={config.step_limit})"
    )

    log: list[EpisodeLog] = []
    for _ in range(config.episodes):
        tmap = maps[int(rng.integers(len(maps)))]
        b = int(rng.integers(len(tmap.coverage_maps)))
        starts = tmap.starts[b]
        start = starts[int(rng.integers(len(starts)))]

        env = CoverageHoleEnv(tmap.building_map, tmap.coverage_maps[b], config)
        epsilon = agent.epsilon
        steps, total, found, losses = run_episode(agent, env, (int(start[0]), int(start[1])))
        agent.episodes += 1

        log.append(
            EpisodeLog(
                episode=agent.episodes,
                steps=steps,
                return_=total,
                found_ch=found,
                epsilon=epsilon,
                loss_mean=float(np.mean(losses)) if losses else float("nan"),
            )
        )

        if log_every and agent.episodes % log_every == 0:
            window = log[-log_every:]
            logger.info(
                f"Episode {agent.episodes}: mean length {np.mean([r.steps for r in window]):.2f}, "
                f"detection {np.mean([r.found_ch for r in window]):.2f}, "
                f"epsilon {agent.epsilon:.3f}, gradient steps {agent.grad_steps}"
            )

    result = TrainingResult(agent=agent, log=log)
    if output_dir is not None:
        out = Path(output_dir)
        result.checkpoint_path = agent.save(out / CHECKPOINT_NAME, {"seed": seed})
        result.log_path = CSVReporter.save_training_log(log, out / TRAINING_LOG_NAME)
        logger.info(f"Checkpoint and training log written to {out}")
    return result
