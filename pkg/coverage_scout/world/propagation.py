"""Wall-count path-loss coverage maps and coverage-hole helpers.

RSRP at an unoccupied cell q for a base station at b::

    p0 - 10 * n * log10(max(d, 1)) - wall_loss * min(W, max_wall_losses)

d is the Euclidean distance in cells. W sums over the distinct occupied cells
the supercover segment b -> q touches, the base-station cell included. With
``wall_decay_cells`` unset each cell counts 1; otherwise a cell at distance r
from q counts ``2 ** (-(r - 1) / wall_decay_cells)``, so a wall right next to
the receiver costs the full wall loss and its shadow fades behind it.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy.ndimage import distance_transform_edt

from coverage_scout.core.config import PropagationParams
from coverage_scout.core.loader import (
    CorpusEntry,
    CorpusManifest,
    CoverageEntry,
    CoverageManifest,
    GridLoader,
)
from coverage_scout.core.types import BaseStation, BuildingMap, CoverageMap, GridPoint
from coverage_scout.exceptions import CorpusError, GeometryError, GridFormatError
from coverage_scout.utils.logging import get_logger
from coverage_scout.world.gridworld import supercover_coords

logger = get_logger(__name__)


def place_base_station(
    building_map: BuildingMap, seed: int, antenna_offset_m: float = 2.0
) -> BaseStation:
    """Uniformly random cell (occupied or not), antenna antenna_offset_m above ground or roof."""
    rng = np.random.default_rng(seed)
    side = building_map.side
    i = int(rng.integers(0, side))
    j = int(rng.integers(0, side))
    height = float(building_map.heights[i, j]) + antenna_offset_m
    return BaseStation(cell=GridPoint(i, j), antenna_height_m=height)


def wall_counts(
    building_map: BuildingMap, bs: BaseStation, decay_cells: float | None = None
) -> NDArray[np.float64]:
    """
    Wall term W for every unoccupied cell (0 on occupied cells).

    Args:
        building_map: Environment geometry
        bs: Transmitter; its own cell counts when it is occupied
        decay_cells: Distance over which a wall cell's weight halves behind
            the receiver; None counts every touched occupied cell as 1

    Returns:
        L x L float array
    """
    occupied = building_map.occupied
    occ = occupied.tolist()
    origin = (bs.cell.i, bs.cell.j)
    counts = np.zeros(occupied.shape, dtype=np.float64)

    for i, j in np.argwhere(~occupied).tolist():
        walls = 0.0
        for ci, cj in supercover_coords(origin, (i, j)):
            if not occ[ci][cj]:
                continue
            if decay_cells is None:
                walls += 1.0
            else:
                walls += 2.0 ** (-(math.hypot(ci - i, cj - j) - 1.0) / decay_cells)
        counts[i, j] = walls
    return counts


def compute_coverage(
    building_map: BuildingMap,
    bs: BaseStation,
    params: PropagationParams,
    ch_threshold_db: float = -100.0,
) -> CoverageMap:
    """
    Deterministic RSRP raster for one base station.

    Args:
        building_map: Environment geometry
        bs: Transmitter
        params: Path-loss constants; log-normal shadowing is added only when
            ``params.shadow_seed`` is set
        ch_threshold_db: Coverage-hole threshold stored on the result

    Returns:
        CoverageMap with NaN on occupied cells
    """
    if not building_map.contains(bs.cell):
        raise GeometryError(f"Base station {bs.cell} lies outside the grid")

    side = building_map.side
    rows, cols = np.indices((side, side))
    distance = np.maximum(np.hypot(rows - bs.cell.i, cols - bs.cell.j), 1.0)

    walls = np.minimum(
        wall_counts(building_map, bs, params.wall_decay_cells), params.max_wall_losses
    )
    rsrp = (
        params.p0_db
        - 10.0 * params.pathloss_exponent * np.log10(distance)
        - params.wall_loss_db * walls
    )

    if params.shadow_seed is not None:
        shadow_rng = np.random.default_rng(params.shadow_seed)
        rsrp = rsrp + shadow_rng.normal(0.0, params.shadow_sigma_db, size=rsrp.shape)

    rsrp[building_map.occupied] = np.nan
    return CoverageMap(
        rsrp=rsrp, bs=bs, resolution_m=building_map.resolution_m, ch_threshold_db=ch_threshold_db
    )


def ch_mask(cm: CoverageMap, threshold_db: float | None = None) -> NDArray[np.bool_]:
    """Strict threshold scan; NaN cells are never holes."""
    eps = cm.ch_threshold_db if threshold_db is None else threshold_db
    with np.errstate(invalid="ignore"):
        return np.asarray(cm.rsrp < eps) & ~np.isnan(cm.rsrp)


def ch_set(cm: CoverageMap, threshold_db: float | None = None) -> frozenset[GridPoint]:
    """Unoccupied cells with RSRP strictly below the coverage-hole threshold."""
    return frozenset(GridPoint(int(i), int(j)) for i, j in np.argwhere(ch_mask(cm, threshold_db)))


def _available(rsrp: NDArray[np.float64], i: int, j: int) -> bool:
    side = rsrp.shape[0]
    return 0 <= i < side and 0 <= j < side and not np.isnan(rsrp[i, j])


def cm_gradient(cm: CoverageMap, p: tuple[int, int]) -> NDArray[np.float64]:
    """
    Finite-difference RSRP gradient (dB per cell) at p, as (d/di, d/dj).

    Central differences where both neighbors are measurable, one-sided where
    only one is, zero where neither is. Grid borders and occupied (NaN) cells
    count as unavailable.
    """
    rsrp = cm.rsrp
    i, j = int(p[0]), int(p[1])
    if not _available(rsrp, i, j):
        raise GeometryError(f"No RSRP at {GridPoint(i, j)}: cell is occupied or off-grid")

    center = rsrp[i, j]
    grad = np.zeros(2, dtype=np.float64)
    for axis, (di, dj) in enumerate(((1, 0), (0, 1))):
        has_plus = _available(rsrp, i + di, j + dj)
        has_minus = _available(rsrp, i - di, j - dj)
        if has_plus and has_minus:
            grad[axis] = (rsrp[i + di, j + dj] - rsrp[i - di, j - dj]) / 2.0
        elif has_plus:
            grad[axis] = rsrp[i + di, j + dj] - center
        elif has_minus:
            grad[axis] = center - rsrp[i - di, j - dj]
    return grad


def distance_to_building(building_map: BuildingMap) -> NDArray[np.float64]:
    """Exact Euclidean distance (meters) to the nearest occupied cell; inf everywhere if none."""
    occupied = building_map.occupied
    if not occupied.any():
        return np.full(occupied.shape, np.inf)
    distance = np.asarray(distance_transform_edt(~occupied), dtype=np.float64)
    return distance * building_map.resolution_m


def near_building_ratio(building_map: BuildingMap, cm: CoverageMap, d_m: float = 8.0) -> float:
    """
    How much more often holes sit within d_m of a building than outdoor cells in general.

    Returns the fraction of CH cells within d_m divided by the fraction of all
    unoccupied cells within d_m; NaN when either fraction is undefined.
    """
    near = distance_to_building(building_map) <= d_m
    outdoor = ~building_map.occupied
    holes = ch_mask(cm)
    if not holes.any() or not outdoor.any():
        return float("nan")
    base = float(near[outdoor].mean())
    if base == 0.0:
        return float("nan")
    return float(near[holes].mean()) / base


def coverage_file_name(map_file: str, bs_index: int) -> str:
    return f"{Path(map_file).stem}_bs{bs_index}.rsrp.chgrid"


def _coverage_for_map(
    root: Path,
    entry: CorpusEntry,
    map_index: int,
    params: PropagationParams,
    seed: int,
    ch_threshold_db: float,
) -> list[CoverageEntry]:
    building_map = GridLoader.load_heights(root / entry.file)
    rows = []
    for b in range(params.bs_per_map):
        bs = place_base_station(
            building_map, seed + 1000 * map_index + b, antenna_offset_m=params.antenna_offset_m
        )
        cm = compute_coverage(building_map, bs, params, ch_threshold_db)
        name = coverage_file_name(entry.file, b)
        GridLoader.save_rsrp(cm, root / name, altitude_m=building_map.altitude_m)
        rows.append(
            CoverageEntry(
                map_file=entry.file,
                coverage_file=name,
                bs_i=bs.cell.i,
                bs_j=bs.cell.j,
                bs_height_m=bs.antenna_height_m,
                ch_count=len(ch_set(cm)),
            )
        )
    return rows


def generate_coverage_corpus(
    corpus: CorpusManifest,
    params: PropagationParams,
    seed: int,
    ch_threshold_db: float = -100.0,
    jobs: int = 1,
) -> CoverageManifest:
    """
    Place base stations and write one RSRP raster per (map, base station).

    Base station b of map i is placed with seed ``seed + 1000 * i + b``.
    Rasters and coverage.csv are written next to the corpus manifest.
    """
    if len(corpus) == 0:
        raise CorpusError(f"Corpus at {corpus.root} lists no maps")

    logger.info(
        f"Computing coverage for {len(corpus)} maps x {params.bs_per_map} base stations "
        f"(p0={params.p0_db} dB, n={params.pathloss_exponent}, wall={params.wall_loss_db} dB, "
        f"decay={params.wall_decay_cells} cells)"
    )

    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [
                    pool.submit(
                        _coverage_for_map, corpus.root, e, idx, params, seed, ch_threshold_db
                    )
                    for idx, e in enumerate(corpus.entries)
                ]
                per_map = [f.result() for f in futures]
        else:
            per_map = [
                _coverage_for_map(corpus.root, e, idx, params, seed, ch_threshold_db)
                for idx, e in enumerate(corpus.entries)
            ]
    except GridFormatError as e:
        raise CorpusError(str(e)) from e

    entries = [row for rows in per_map for row in rows]
    manifest = CoverageManifest(root=corpus.root, entries=entries)
    manifest.save()

    holes = [e.ch_count for e in entries]
    logger.info(
        f"Coverage written: {len(entries)} rasters, mean CH count {np.mean(holes):.1f}, "
        f"{sum(1 for h in holes if h == 0)} without holes"
    )
    return manifest
