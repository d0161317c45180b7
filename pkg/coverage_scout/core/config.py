"""Configuration management for coverage-scout."""

import os
import re
from pathlib import Path
from typing import Any, Literal

import pydantic
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from coverage_scout.exceptions import ConfigurationError

SEED_ENV = "CHD_SEED"


class MapGenParams(BaseModel):
    """Parameters of the synthetic urban map generator."""

    model_config = ConfigDict(extra="forbid")

    side: int = Field(default=121, ge=1)
    resolution_m: float = Field(default=4.0, gt=0)
    altitude_m: float = Field(default=2.0, ge=0)
    target_fill: float = Field(default=0.3, ge=0, lt=1)
    # Accepted shortfall below target_fill once the retry budget runs out
    fill_tolerance: float = Field(default=0.05, ge=0)
    min_buildings: int = Field(default=0, ge=0)
    max_buildings: int = Field(default=600, ge=0)
    min_footprint: int = Field(default=4, ge=2)
    max_footprint: int = Field(default=12, ge=2)
    min_height_m: float = Field(default=6.0, ge=0, le=200)
    max_height_m: float = Field(default=40.0, ge=0, le=200)
    street_width: int = Field(default=2, ge=0)
    max_failures: int = Field(default=1000, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _check_ranges(self) -> "MapGenParams":
        if self.max_footprint < self.min_footprint:
            raise ValueError("max_footprint must be >= min_footprint")
        if self.max_height_m < self.min_height_m:
            raise ValueError("max_height_m must be >= min_height_m")
        if self.max_buildings < self.min_buildings:
            raise ValueError("max_buildings must be >= min_buildings")
        return self


class PropagationParams(BaseModel):
    """
    Parameters of the wall-count path-loss model.

    The defaults are tuned so that coverage holes are rare and sit mostly in
    the shadow right behind buildings: ``wall_decay_cells`` halves the loss of
    a wall cell for every cell of open ground between it and the receiver.
    Set it to None for the plain count of touched wall cells.
    """

    model_config = ConfigDict(extra="forbid")

    p0_db: float = -30.0
    pathloss_exponent: float = Field(default=3.0, gt=0)
    wall_loss_db: float = Field(default=15.0, ge=0)
    max_wall_losses: int = Field(default=4, ge=0)
    wall_decay_cells: float | None = Field(default=1.0, gt=0)
    shadow_seed: int | None = None
    shadow_sigma_db: float = Field(default=8.0, ge=0)
    antenna_offset_m: float = Field(default=2.0, ge=0)
    bs_per_map: int = Field(default=1, ge=1)


class AgentConfig(BaseModel):
    """DDQN agent and training-loop settings."""

    model_config = ConfigDict(extra="forbid")

    gamma: float = Field(default=0.99, gt=0, le=1)
    alpha: float = Field(default=1.0, ge=0)
    eps_ch_db: float = Field(default=-100.0, lt=0)
    step_limit: int = Field(default=15, ge=1)
    decay_c: float = Field(default=0.1, gt=0)
    h_max_m: float = Field(default=100.0, gt=0)
    # Z <= eps terminates (True) or only Z < eps (False)
    inclusive_threshold: bool = True

    epsilon_start: float = Field(default=1.0, ge=0, le=1)
    epsilon_end: float = Field(default=0.05, ge=0, le=1)
    epsilon_decay_steps: int = Field(default=50_000, ge=1)
    buffer_capacity: int = Field(default=50_000, ge=1)
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=1e-4, gt=0)
    adam_beta1: float = Field(default=0.9, ge=0, lt=1)
    adam_beta2: float = Field(default=0.999, ge=0, lt=1)
    adam_eps: float = Field(default=1e-8, gt=0)
    target_sync_steps: int = Field(default=1000, ge=1)
    max_episode_steps: int = Field(default=30, ge=1)
    episodes: int = Field(default=2000, ge=0)
    train_every: int = Field(default=1, ge=1)
    dtype: Literal["float32", "float64"] = "float32"


class CorpusFilter(BaseModel):
    """Occupied-fraction bounds used as the "urban characteristics" filter."""

    model_config = ConfigDict(extra="forbid")

    min_fraction: float = Field(default=0.0, ge=0, le=1)
    max_fraction: float = Field(default=1.0, ge=0, le=1)


class ExperimentConfig(BaseModel):
    """Evaluation harness settings."""

    model_config = ConfigDict(extra="forbid")

    corpus: str | None = None
    methods: list[str] = Field(default_factory=lambda: ["rsp", "bnp", "grsp", "gbnp"])
    n_sam: list[int] = Field(default_factory=lambda: [25, 50, 100])
    k_values: list[int] = Field(default_factory=lambda: [1, 2, 4])
    eps_ch_db: float = Field(default=-100.0, lt=0)
    d_b_m: float = Field(default=8.0, gt=0)
    inclusive_threshold: bool = True
    shared_starts: bool = True
    checkpoint: str | None = None
    dump_trajectories: bool = False

    @field_validator("n_sam")
    @classmethod
    def _check_n_sam(cls, value: list[int]) -> list[int]:
        if not value or any(n < 1 for n in value):
            raise ValueError("n_sam entries must be >= 1")
        return sorted(set(value))

    @field_validator("k_values")
    @classmethod
    def _check_k(cls, value: list[int]) -> list[int]:
        if not value or any(k < 0 for k in value):
            raise ValueError("k_values entries must be >= 0")
        return sorted(set(value))

    @field_validator("methods")
    @classmethod
    def _check_methods(cls, value: list[str]) -> list[str]:
        if not value:
            raise ValueError("at least one method is required")
        return [m.strip().lower() for m in value]


class ReportingConfig(BaseModel):
    """Configuration for reporting."""

    model_config = ConfigDict(extra="forbid")

    output_dir: str = "results"


class Config(BaseModel):
    """Main configuration for coverage-scout."""

    model_config = ConfigDict(extra="forbid")

    version: str = "1.0"
    seed: int | None = None
    jobs: int = Field(default=1, ge=1)
    corpus_filter: CorpusFilter = Field(default_factory=CorpusFilter)
    mapgen: MapGenParams = Field(default_factory=MapGenParams)
    propagation: PropagationParams = Field(default_factory=PropagationParams)
    agent: AgentConfig = Field(default_factory=AgentConfig)
    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)
    reporting: ReportingConfig = Field(default_factory=ReportingConfig)

    @classmethod
    def from_yaml(cls, path: str) -> "Config":
        """Load configuration from YAML file."""
        yaml_path = Path(path)
        if not yaml_path.exists():
            raise ConfigurationError(f"Config file not found: {path}")

        try:
            with open(yaml_path, encoding="utf-8") as f:
                raw_data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {path}: {e}") from e

        if not isinstance(raw_data, dict):
            raise ConfigurationError(f"Config file {path} must contain a mapping")

        # Substitute environment variables
        raw_data = cls._substitute_env_vars(raw_data)

        return cls.from_dict(raw_data)

    @classmethod
    def _substitute_env_vars(cls, data: Any) -> Any:
        """Recursively substitute ${VAR} references in config values."""
        if isinstance(data, dict):
            return {k: cls._substitute_env_vars(v) for k, v in data.items()}
        elif isinstance(data, list):
            return [cls._substitute_env_vars(item) for item in data]
        elif isinstance(data, str):

            def replace_env_var(match: re.Match[str]) -> str:
                var_name = match.group(1)
                return os.environ.get(var_name, match.group(0))

            return re.sub(r"\$\{([^}]+)\}", replace_env_var, data)
        else:
            return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Config":
        """Create config from dictionary."""
        try:
            return cls(**data)
        except pydantic.ValidationError as e:
            raise ConfigurationError(f"Invalid configuration: {e}") from e

    def to_dict(self) -> dict[str, Any]:
        """Convert config to dictionary."""
        return self.model_dump()

    def to_yaml(self, path: str | Path) -> None:
        """Write the effective configuration as YAML."""
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=False)

    def merge(self, overrides: dict[str, Any]) -> "Config":
        """
        Return a new config with dotted-key overrides applied.

        Keys whose value is None are ignored, so unset CLI flags never
        shadow values from the config file.

        Example:
            >>> Config().merge({"mapgen.target_fill": 0.2, "seed": 7}).mapgen.target_fill
            0.2
        """
        data = self.to_dict()
        for dotted, value in overrides.items():
            if value is None:
                continue
            node = data
            *parents, leaf = dotted.split(".")
            for part in parents:
                if part not in node or not isinstance(node[part], dict):
                    raise ConfigurationError(f"Unknown config key: {dotted}")
                node = node[part]
            if leaf not in node:
                raise ConfigurationError(f"Unknown config key: {dotted}")
            node[leaf] = value
        return Config.from_dict(data)

    def resolve_seed(self, flag: int | None = None) -> int:
        """Seed precedence: flag, then config file, then $CHD_SEED, then 0."""
        if flag is not None:
            return flag
        if self.seed is not None:
            return self.seed
        env_seed = os.environ.get(SEED_ENV)
        if env_seed:
            try:
                return int(env_seed)
            except ValueError as e:
                raise ConfigurationError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from e
        return 0
