"""coverage-scout - coverage-hole detection with learned and baseline UAV waypoint predictors."""

__version__ = "0.1.0"

# Core types and config
from coverage_scout.core.config import AgentConfig, Config, ExperimentConfig
from coverage_scout.core.loader import CorpusManifest, CoverageManifest, GridLoader
from coverage_scout.core.pipeline import ExperimentResult, aggregate, emit_report, evaluate
from coverage_scout.core.rollout import rollout
from coverage_scout.core.types import (
    BaseStation,
    BuildingMap,
    CoverageMap,
    GridPoint,
    RunResult,
    Trajectory,
)

# Exceptions
from coverage_scout.exceptions import (
    CheckpointError,
    ConfigurationError,
    CorpusError,
    CoverageScoutError,
    GeometryError,
    GridFormatError,
    MapGenerationError,
    PipelineError,
    ShapeError,
    TrainingError,
    ValidationError,
)

# Metrics
from coverage_scout.metrics import BaseMetric, PrecisionMetric, RecallMetric

# Predictors
from coverage_scout.predictors import BasePredictor, build_predictor

# Reporting
from coverage_scout.reporting import CSVReporter, JSONReporter

__all__ = [
    # Version
    "__version__",
    # Core
    "AgentConfig",
    "Config",
    "ExperimentConfig",
    "CorpusManifest",
    "CoverageManifest",
    "GridLoader",
    "ExperimentResult",
    "aggregate",
    "emit_report",
    "evaluate",
    "rollout",
    # Types
    "BaseStation",
    "BuildingMap",
    "CoverageMap",
    "GridPoint",
    "RunResult",
    "Trajectory",
    # Exceptions
    "CoverageScoutError",
    "CheckpointError",
    "ConfigurationError",
    "CorpusError",
    "GeometryError",
    "GridFormatError",
    "MapGenerationError",
    "PipelineError",
    "ShapeError",
    "TrainingError",
    "ValidationError",
    # Metrics
    "BaseMetric",
    "PrecisionMetric",
    "RecallMetric",
    # Predictors
    "BasePredictor",
    "build_predictor",
    # Reporting
    "CSVReporter",
    "JSONReporter",
]
