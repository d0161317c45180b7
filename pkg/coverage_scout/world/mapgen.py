"""Synthetic urban building maps and corpus generation."""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from coverage_scout.core.config import MapGenParams
from coverage_scout.core.loader import CorpusEntry, CorpusManifest, GridLoader
from coverage_scout.core.types import BuildingMap
from coverage_scout.exceptions import CorpusError, GridFormatError, MapGenerationError
from coverage_scout.utils.logging import get_logger

logger = get_logger(__name__)


def generate_map(params: MapGenParams) -> BuildingMap:
    """
    Place axis-aligned rectangular buildings by rejection sampling.

    Each candidate gets a uniform footprint (rows x cols within the footprint
    range), a uniform position and a uniform height. A candidate is rejected
    when its footprint, grown by ``street_width`` cells on every side, touches
    an existing building. Placement stops once the occupied fraction reaches
    ``target_fill``, after ``max_failures`` consecutive rejections, or at
    ``max_buildings``.

    Args:
        params: Generator parameters (seeded; same params give the same map)

    Returns:
        BuildingMap with zero height outside footprints

    Raises:
        MapGenerationError: If the final fill is more than ``fill_tolerance``
            below target or fewer than ``min_buildings`` were placed
    """
    rng = np.random.default_rng(params.seed)
    side = params.side
    gap = params.street_width

    heights = np.zeros((side, side), dtype=np.float64)
    footprint = np.zeros((side, side), dtype=bool)
    target_cells = params.target_fill * side * side

    occupied_cells = 0
    placed = 0
    failures = 0
    while (occupied_cells < target_cells or placed < params.min_buildings) and (
        failures < params.max_failures and placed < params.max_buildings
    ):
        rows = int(rng.integers(params.min_footprint, params.max_footprint + 1))
        cols = int(rng.integers(params.min_footprint, params.max_footprint + 1))
        height = float(rng.uniform(params.min_height_m, params.max_height_m))
        if rows > side or cols > side:
            failures += 1
            continue
        i0 = int(rng.integers(0, side - rows + 1))
        j0 = int(rng.integers(0, side - cols + 1))

        clearance = footprint[
            max(0, i0 - gap) : i0 + rows + gap, max(0, j0 - gap) : j0 + cols + gap
        ]
        if clearance.any():
            failures += 1
            continue

        footprint[i0 : i0 + rows, j0 : j0 + cols] = True
        heights[i0 : i0 + rows, j0 : j0 + cols] = height
        if height >= params.altitude_m:
            occupied_cells += rows * cols
        placed += 1
        failures = 0

    fill = occupied_cells / (side * side)
    if fill < params.target_fill - params.fill_tolerance:
        raise MapGenerationError(
            f"Target fill {params.target_fill:.3f} unreachable: reached {fill:.3f} with "
            f"{placed} buildings after {params.max_failures} consecutive placement failures "
            f"(street width {gap}, footprint {params.min_footprint}-{params.max_footprint})"
        )
    if placed < params.min_buildings:
        raise MapGenerationError(
            f"Placed only {placed} of at least {params.min_buildings} buildings"
        )

    logger.debug(f"Map seed={params.seed}: {placed} buildings, fill {fill:.3f}")
    return BuildingMap(
        heights=heights, resolution_m=params.resolution_m, altitude_m=params.altitude_m
    )


def map_file_name(index: int) -> str:
    return f"map_{index:04d}.chgrid"


def _generate_and_save(params: MapGenParams, index: int, out_dir: Path) -> CorpusEntry:
    map_params = params.model_copy(update={"seed": params.seed + index})
    building_map = generate_map(map_params)
    name = map_file_name(index)
    try:
        GridLoader.save_heights(building_map, out_dir / name)
    except GridFormatError as e:
        raise CorpusError(str(e)) from e
    return CorpusEntry(
        file=name, occupied_fraction=building_map.occupied_fraction, seed=map_params.seed
    )


def generate_corpus(
    params: MapGenParams, n: int, out_dir: str | Path, jobs: int = 1
) -> CorpusManifest:
    """
    Generate n maps with per-map seeds ``params.seed + i`` and write manifest.csv.

    Args:
        params: Generator parameters; ``params.seed`` is the corpus base seed
        n: Number of maps (>= 1)
        out_dir: Output directory (created if missing)
        jobs: Worker processes; rows are always written in map order

    Returns:
        The written CorpusManifest
    """
    if n < 1:
        raise CorpusError(f"Corpus size must be >= 1, got {n}")

    root = Path(out_dir)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CorpusError(f"Cannot create corpus directory {root}: {e}") from e

    logger.info(f"Generating {n} maps (L={params.side}, fill={params.target_fill}) into {root}")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_generate_and_save, params, i, root) for i in range(n)]
            entries = [f.result() for f in futures]
    else:
        entries = [_generate_and_save(params, i, root) for i in range(n)]

    manifest = CorpusManifest(root=root, entries=entries)
    manifest.save()

    mean_fill = float(np.mean([e.occupied_fraction for e in entries]))
    logger.info(f"Corpus written: {n} maps, mean occupied fraction {mean_fill:.3f}")
    return manifest
