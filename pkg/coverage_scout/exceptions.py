"""Custom exceptions for coverage-scout."""


class CoverageScoutError(Exception):
    """Base exception for all coverage-scout errors."""

    pass


class ConfigurationError(CoverageScoutError):
    """Raised when configuration is invalid or missing."""

    pass


class GridFormatError(CoverageScoutError):
    """Raised when a CHGRID/1 raster cannot be parsed or written."""

    pass


class CorpusError(CoverageScoutError):
    """Raised when a map corpus or its manifest cannot be loaded or written."""

    pass


class GeometryError(CoverageScoutError):
    """Raised when a grid operation receives an impossible position.

    Typical cases are an occupied UAV cell or a point outside the grid.
    """

    pass


class MapGenerationError(CoverageScoutError):
    """Raised when the synthetic map generator cannot reach the requested fill."""

    pass


class ShapeError(CoverageScoutError):
    """Raised when tensor shapes or action indices do not match a layer or network."""

    pass


class CheckpointError(CoverageScoutError):
    """Raised when a QNETCKPT/1 checkpoint is malformed or incompatible."""

    pass


class TrainingError(CoverageScoutError):
    """Raised when DDQN training cannot continue."""

    pass


class ValidationError(CoverageScoutError):
    """Raised when data validation fails."""

    pass


class PipelineError(CoverageScoutError):
    """Raised when evaluation pipeline execution fails."""

    pass
