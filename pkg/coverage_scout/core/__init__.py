"""Core functionality for coverage-scout."""

from coverage_scout.core.config import (
    AgentConfig,
    Config,
    CorpusFilter,
    ExperimentConfig,
    MapGenParams,
    PropagationParams,
    ReportingConfig,
)
from coverage_scout.core.loader import CorpusManifest, CoverageManifest, GridLoader
from coverage_scout.core.types import (
    AggregateRow,
    BaseStation,
    BuildingMap,
    CoverageMap,
    EpisodeLog,
    GridPoint,
    MeasurementLog,
    MetricScore,
    RunResult,
    StateTensors,
    Trajectory,
)

__all__ = [
    "AgentConfig",
    "Config",
    "CorpusFilter",
    "ExperimentConfig",
    "MapGenParams",
    "PropagationParams",
    "ReportingConfig",
    "CorpusManifest",
    "CoverageManifest",
    "GridLoader",
    "AggregateRow",
    "BaseStation",
    "BuildingMap",
    "CoverageMap",
    "EpisodeLog",
    "GridPoint",
    "MeasurementLog",
    "MetricScore",
    "RunResult",
    "StateTensors",
    "Trajectory",
]
