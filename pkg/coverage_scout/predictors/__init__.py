"""Waypoint predictors and the name registry used by the CLI."""

from pathlib import Path

from coverage_scout.core.config import AgentConfig
from coverage_scout.exceptions import ConfigurationError
from coverage_scout.predictors.base import (
    BasePredictor,
    CoverageAccess,
    CoverageView,
    PredictionContext,
    StartPool,
)
from coverage_scout.predictors.gradient import GBNPPredictor, GRSPPredictor, gbnp_step, grsp_step
from coverage_scout.predictors.learned import DDQNPredictor
from coverage_scout.predictors.sampling import (
    BNPPredictor,
    BnpConfig,
    RSPPredictor,
    bnp_sample,
    rsp_sample,
)

METHODS = ("rsp", "bnp", "grsp", "gbnp", "ddqn")


def parse_method(name: str, default_d_b_m: float = 8.0) -> tuple[str, float | None]:
    """
    Split a method name into base name and optional d_B.

    Example:
        >>> parse_method("bnp@16")
        ('bnp', 16.0)
    """
    base, sep, suffix = name.strip().lower().partition("@")
    if base not in METHODS:
        raise ConfigurationError(f"Unknown method {name!r}; choose from {', '.join(METHODS)}")
    if base not in ("bnp", "gbnp"):
        if sep:
            raise ConfigurationError(f"Method {base!r} takes no @d_B suffix")
        return base, None
    if not sep:
        return base, default_d_b_m
    try:
        d_b = float(suffix)
    except ValueError as e:
        raise ConfigurationError(f"Invalid d_B in method name {name!r}") from e
    if d_b <= 0:
        raise ConfigurationError(f"d_B must be > 0 in method name {name!r}")
    return base, d_b


def build_predictor(
    name: str,
    agent_config: AgentConfig | None = None,
    checkpoint: str | Path | None = None,
    default_d_b_m: float = 8.0,
) -> BasePredictor:
    """
    Construct a predictor from its CLI name (``rsp``, ``bnp``, ``bnp@16``, ``grsp``,
    ``gbnp``, ``gbnp@32``, ``ddqn``).

    Raises:
        ConfigurationError: On unknown names, or ddqn without a checkpoint
    """
    base, d_b = parse_method(name, default_d_b_m)
    label = name.strip().lower()
    if base == "rsp":
        return RSPPredictor()
    if base == "grsp":
        return GRSPPredictor()
    if base == "bnp":
        return BNPPredictor(BnpConfig(d_b), name=label)  # type: ignore[arg-type]
    if base == "gbnp":
        return GBNPPredictor(BnpConfig(d_b), name=label)  # type: ignore[arg-type]

    if checkpoint is None:
        raise ConfigurationError("Method ddqn needs a trained checkpoint (--ckpt)")
    return DDQNPredictor.from_checkpoint(checkpoint, agent_config or AgentConfig())


__all__ = [
    "METHODS",
    "BasePredictor",
    "BNPPredictor",
    "BnpConfig",
    "CoverageAccess",
    "CoverageView",
    "DDQNPredictor",
    "GBNPPredictor",
    "GRSPPredictor",
    "PredictionContext",
    "RSPPredictor",
    "StartPool",
    "bnp_sample",
    "build_predictor",
    "gbnp_step",
    "grsp_step",
    "parse_method",
    "rsp_sample",
]
