"""Evaluation harness: per-map rollouts, precision/recall and report files."""

import zlib
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from coverage_scout.core.config import Config, CorpusFilter
from coverage_scout.core.loader import (
    CORPUS_MANIFEST,
    CorpusManifest,
    CoverageEntry,
    CoverageManifest,
)
from coverage_scout.core.rollout import rollout, save_trajectory_csv
from coverage_scout.core.types import AggregateRow, BuildingMap, GridPoint, RunResult
from coverage_scout.exceptions import ConfigurationError, GeometryError, PipelineError
from coverage_scout.metrics import PrecisionMetric, RecallMetric
from coverage_scout.predictors import BasePredictor, StartPool, build_predictor, parse_method
from coverage_scout.predictors.sampling import neighborhood_cells, outdoor_cells
from coverage_scout.reporting.csv import CSVReporter
from coverage_scout.reporting.json import JSONReporter
from coverage_scout.utils.logging import get_logger
from coverage_scout.world.propagation import ch_set

logger = get_logger(__name__)

PRECISION_FILE = "precision.csv"
RECALL_FILE = "recall.csv"
RUNS_FILE = "runs.jsonl"
TRAJECTORY_DIR = "trajectories"


@dataclass
class ExperimentResult:
    """Per-map runs plus their aggregates across maps."""

    runs: list[RunResult] = field(default_factory=list)
    precision: list[AggregateRow] = field(default_factory=list)
    recall: list[AggregateRow] = field(default_factory=list)
    skipped_maps: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class _MapTask:
    root: Path
    entry: CoverageEntry
    map_index: int
    config: Config
    seed: int
    checkpoint: str | None
    trajectory_dir: Path | None


def filter_coverage(coverage: CoverageManifest, corpus_filter: CorpusFilter) -> CoverageManifest:
    """
    Keep coverage entries whose building map passes the occupied-fraction filter.

    The fractions come from the corpus manifest next to coverage.csv; without one
    the manifest is returned unchanged.
    """
    if corpus_filter.min_fraction <= 0.0 and corpus_filter.max_fraction >= 1.0:
        return coverage
    corpus_path = coverage.root / CORPUS_MANIFEST
    if not corpus_path.exists():
        logger.warning(f"No {CORPUS_MANIFEST} in {coverage.root}; corpus filter ignored")
        return coverage

    kept_maps = {
        e.file
        for e in CorpusManifest.load(corpus_path).filter(
            corpus_filter.min_fraction, corpus_filter.max_fraction
        )
    }
    entries = [e for e in coverage.entries if e.map_file in kept_maps]
    logger.info(
        f"Corpus filter [{corpus_filter.min_fraction}, {corpus_filter.max_fraction}] "
        f"keeps {len(entries)}/{len(coverage)} coverage maps"
    )
    return CoverageManifest(root=coverage.root, entries=entries)


def _stream_code(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def _pool_key(predictor: BasePredictor) -> tuple[str, float | None]:
    if predictor.start_pool is StartPool.NEIGHBORHOOD:
        d_b_m = predictor.cfg.d_b_m  # type: ignore[attr-defined]
        return StartPool.NEIGHBORHOOD.value, float(d_b_m)
    return StartPool.OUTDOOR.value, None


def _pool_cells(building_map: BuildingMap, pool: tuple[str, float | None]) -> NDArray[np.int64]:
    kind, d_b = pool
    if kind == StartPool.NEIGHBORHOOD.value:
        if not building_map.occupied.any():
            raise GeometryError("Neighborhood start pool needs at least one building")
        return neighborhood_cells(building_map, float(d_b))  # type: ignore[arg-type]
    return outdoor_cells(building_map)


def draw_starts(
    cells: NDArray[np.int64], n: int, rng: np.random.Generator, label: str = ""
) -> list[GridPoint]:
    """
    First n cells of a random permutation of the pool.

    Smaller n give prefixes of the same draw. A pool with fewer than n cells
    is sampled with replacement instead, with a warning.
    """
    if len(cells) == 0:
        raise GeometryError(f"Start pool {label} is empty")
    if n <= len(cells):
        index = rng.permutation(len(cells))[:n]
    else:
        logger.warning(
            f"Start pool {label} has {len(cells)} cells < N_sam={n}; sampling with replacement"
        )
        index = rng.integers(len(cells), size=n)
    return [GridPoint(int(cells[i, 0]), int(cells[i, 1])) for i in index]


def _start_rng(
    seed: int, map_index: int, pool: tuple[str, float | None], method: str | None
) -> np.random.Generator:
    kind, d_b = pool
    key = [seed, map_index, _stream_code(kind if d_b is None else f"{kind}@{d_b!r}")]
    if method is not None:
        key.append(_stream_code(method))
    return np.random.default_rng(key)


def _trajectory_stem(entry: CoverageEntry) -> str:
    return Path(entry.coverage_file).name.split(".")[0]


def _evaluate_map(task: _MapTask) -> tuple[list[RunResult], str | None]:
    """Runs of every method on one coverage map; the map id when it was skipped."""
    exp = task.config.experiment
    agent_cfg = task.config.agent
    map_id = task.entry.coverage_file

    building_map, cm = CoverageManifest(root=task.root).load_pair(task.entry, exp.eps_ch_db)
    holes = ch_set(cm, exp.eps_ch_db)
    if not holes:
        logger.warning(f"Skipping {map_id}: no coverage hole below {exp.eps_ch_db} dB")
        return [], map_id

    n_max = max(exp.n_sam)
    k_max = max(exp.k_values)
    precision_metric = PrecisionMetric()
    recall_metric = RecallMetric()
    runs: list[RunResult] = []

    for method in exp.methods:
        predictor = build_predictor(method, agent_cfg, task.checkpoint, exp.d_b_m)
        pool = _pool_key(predictor)
        try:
            cells = _pool_cells(building_map, pool)
            rng = _start_rng(
                task.seed, task.map_index, pool, None if exp.shared_starts else method
            )
            starts = draw_starts(cells, n_max, rng, label=f"{pool[0]} of {map_id}")
        except GeometryError as e:
            logger.warning(f"Skipping {method} on {map_id}: {e}")
            continue

        finals: dict[int, list[GridPoint]] = defaultdict(list)
        for s, start in enumerate(starts):
            trajectory = rollout(
                building_map,
                cm,
                predictor,
                start,
                k_max,
                agent_cfg.step_limit,
                eps_ch_db=exp.eps_ch_db,
                inclusive=exp.inclusive_threshold,
            )
            for k in exp.k_values:
                finals[k].append(trajectory.truncated(k).final_prediction)
            if task.trajectory_dir is not None:
                save_trajectory_csv(
                    trajectory,
                    task.trajectory_dir
                    / _trajectory_stem(task.entry)
                    / f"{method.replace('@', '_')}_{s:04d}.csv",
                )

        for k in exp.k_values:
            for n in exp.n_sam:
                predictions = finals[k][:n]
                precision = precision_metric.evaluate(predictions, holes)
                recall = recall_metric.evaluate(predictions, holes)
                runs.append(
                    RunResult(
                        map_id=map_id,
                        method=method,
                        k=k,
                        n_sam=n,
                        predictions=list(predictions),
                        true_count=precision.details["true_count"],
                        unique_true_count=precision.details["unique_true_count"],
                        ch_count=len(holes),
                        precision=precision.value,
                        recall=recall.value,
                    )
                )

    logger.debug(f"{map_id}: {len(runs)} runs, {len(holes)} hole cells")
    return runs, None


def aggregate(runs: list[RunResult]) -> tuple[list[AggregateRow], list[AggregateRow]]:
    """
    Mean and population std across maps per (method, k, n_sam).

    Returns:
        (precision rows, recall rows), sorted by method, k and n_sam
    """
    groups: dict[tuple[str, int, int], list[RunResult]] = defaultdict(list)
    for run in runs:
        groups[(run.method, run.k, run.n_sam)].append(run)

    precision_rows = []
    recall_rows = []
    for (method, k, n_sam), members in sorted(groups.items()):
        for metric, rows in (("precision", precision_rows), ("recall", recall_rows)):
            values = np.array([getattr(r, metric) for r in members], dtype=np.float64)
            rows.append(
                AggregateRow(
                    metric=metric,
                    method=method,
                    k=k,
                    n_sam=n_sam,
                    mean=float(values.mean()),
                    std=float(values.std()),
                    n_maps=len(members),
                )
            )
    return precision_rows, recall_rows


def _check_methods(config: Config, checkpoint: str | None) -> None:
    for method in config.experiment.methods:
        base, _ = parse_method(method, config.experiment.d_b_m)
        if base == "ddqn":
            if checkpoint is None:
                raise ConfigurationError("Method ddqn needs a trained checkpoint (--ckpt)")
            # Loads once up front so a bad checkpoint fails before any map is read
            predictor = build_predictor(
                method, config.agent, checkpoint, config.experiment.d_b_m
            )
            net_limit = predictor.net.step_limit  # type: ignore[attr-defined]
            if net_limit != config.agent.step_limit:
                raise ConfigurationError(
                    f"Checkpoint {checkpoint} was trained with step limit {net_limit}, "
                    f"config uses agent.step_limit={config.agent.step_limit}"
                )


def evaluate(
    config: Config,
    manifest: CoverageManifest,
    seed: int = 0,
    checkpoint: str | Path | None = None,
    jobs: int = 1,
    output_dir: str | Path | None = None,
) -> ExperimentResult:
    """
    Evaluate every configured method on every coverage map of the manifest.

    Each method draws max(n_sam) starts per map from its start pool (all
    unoccupied cells, or the building neighborhood for bnp/gbnp), rolls out
    once with budget max(k) and reads smaller budgets and sample counts off
    prefixes. Maps without coverage holes are skipped and logged.

    Args:
        config: Experiment, agent and corpus-filter settings
        manifest: Coverage manifest to evaluate on
        seed: Base seed of the start-point streams
        checkpoint: Policy checkpoint, required when ddqn is requested
        jobs: Worker processes (map-level parallelism)
        output_dir: Where trajectory dumps go when ``experiment.dump_trajectories``

    Returns:
        ExperimentResult with runs in manifest order and their aggregates

    Raises:
        ConfigurationError: On unknown methods or ddqn without a checkpoint
        PipelineError: If no map produced any run
    """
    ckpt = str(checkpoint) if checkpoint is not None else config.experiment.checkpoint
    _check_methods(config, ckpt)
    manifest = filter_coverage(manifest, config.corpus_filter)
    if len(manifest) == 0:
        raise PipelineError(f"Coverage manifest at {manifest.root} lists no maps to evaluate")

    trajectory_dir = None
    if config.experiment.dump_trajectories:
        if output_dir is None:
            raise ConfigurationError("Trajectory dumps need an output directory")
        trajectory_dir = Path(output_dir) / TRAJECTORY_DIR

    tasks = [
        _MapTask(
            root=manifest.root,
            entry=entry,
            map_index=idx,
            config=config,
            seed=seed,
            checkpoint=ckpt,
            trajectory_dir=trajectory_dir,
        )
        for idx, entry in enumerate(manifest.entries)
    ]

    exp = config.experiment
    logger.info(
        f"Evaluating {', '.join(exp.methods)} on {len(tasks)} coverage maps "
        f"(k={exp.k_values}, N_sam={exp.n_sam}, seed={seed})"
    )

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_map = list(pool.map(_evaluate_map, tasks))
    else:
        per_map = [_evaluate_map(task) for task in tasks]

    runs = [run for map_runs, _ in per_map for run in map_runs]
    skipped = [map_id for _, map_id in per_map if map_id is not None]
    if not runs:
        raise PipelineError(
            f"No runs produced: {len(skipped)} of {len(tasks)} maps have no coverage hole"
        )
    if skipped:
        logger.info(f"Skipped {len(skipped)} maps without coverage holes")

    precision, recall = aggregate(runs)
    return ExperimentResult(runs=runs, precision=precision, recall=recall, skipped_maps=skipped)


def emit_report(
    result: ExperimentResult, out_dir: str | Path, write_runs: bool = True
) -> list[Path]:
    """
    Write precision.csv, recall.csv, one .dat series per method and runs.jsonl.

    Raises:
        PipelineError: If the result holds no runs
    """
    if not result.runs:
        raise PipelineError("Nothing to report: the experiment produced no runs")

    out = Path(out_dir)
    written = [
        CSVReporter.save_aggregates(result.precision, out / PRECISION_FILE),
        CSVReporter.save_aggregates(result.recall, out / RECALL_FILE),
    ]
    written.extend(CSVReporter.save_dat_series(result.precision, result.recall, out))
    if write_runs:
        written.append(JSONReporter.save_runs(result.runs, out / RUNS_FILE))
    logger.info(f"Report written to {out} ({len(written)} files)")
    return written


def report_from_runs(runs_path: str | Path, out_dir: str | Path) -> ExperimentResult:
    """Rebuild the aggregate tables and .dat series from a runs.jsonl log."""
    runs = JSONReporter.load_runs(runs_path)
    precision, recall = aggregate(runs)
    result = ExperimentResult(runs=runs, precision=precision, recall=recall)
    emit_report(result, out_dir, write_runs=False)
    return result
