"""Grid geometry: occupancy, line of sight, movement windows and path clamping.

All functions are pure; a BuildingMap never changes after construction, so
results can be shared freely between workers.
"""

from collections.abc import Iterator

import numpy as np

from coverage_scout.core.types import BuildingMap, GridPoint
from coverage_scout.exceptions import GeometryError


def occupied_set(building_map: BuildingMap) -> frozenset[GridPoint]:
    """Cells whose building height reaches the evaluation altitude."""
    return frozenset(GridPoint(int(i), int(j)) for i, j in np.argwhere(building_map.occupied))


def supercover_cells(a: tuple[int, int], b: tuple[int, int]) -> list[GridPoint]:
    """
    Every cell touched by the segment between the centers of cells a and b.

    The walk is always computed from the lexicographically smaller endpoint and
    reversed afterwards, so the returned set does not depend on direction.
    Where the segment passes exactly through a cell corner, both cells that
    share that corner are included.

    Args:
        a: Start cell
        b: End cell (may lie outside any grid; this is pure arithmetic)

    Returns:
        Cells ordered from a to b, both endpoints included
    """
    return [GridPoint(i, j) for i, j in supercover_coords(a, b)]


def supercover_coords(a: tuple[int, int], b: tuple[int, int]) -> list[tuple[int, int]]:
    """Same walk as supercover_cells, as plain (i, j) tuples for hot loops."""
    start = (int(a[0]), int(a[1]))
    end = (int(b[0]), int(b[1]))
    if end < start:
        cells = _walk(end, start)
        cells.reverse()
        return cells
    return _walk(start, end)


def _walk(a: tuple[int, int], b: tuple[int, int]) -> list[tuple[int, int]]:
    di, dj = b[0] - a[0], b[1] - a[1]
    ni, nj = abs(di), abs(dj)
    si = 1 if di > 0 else -1
    sj = 1 if dj > 0 else -1

    i, j = a
    cells = [a]
    ti = tj = 0
    while ti < ni or tj < nj:
        # Sign of (0.5 + ti) / ni - (0.5 + tj) / nj, in integers
        decision = (1 + 2 * ti) * nj - (1 + 2 * tj) * ni
        if decision == 0:
            cells.append((i + si, j))
            cells.append((i, j + sj))
            i += si
            j += sj
            ti += 1
            tj += 1
        elif decision < 0:
            i += si
            ti += 1
        else:
            j += sj
            tj += 1
        cells.append((i, j))
    return cells


def line_blocked(building_map: BuildingMap, a: tuple[int, int], b: tuple[int, int]) -> bool:
    """True iff the a-b segment touches an occupied cell other than a and b."""
    occupied = building_map.occupied
    start = (int(a[0]), int(a[1]))
    end = (int(b[0]), int(b[1]))
    for cell in supercover_coords(start, end):
        if cell == start or cell == end:
            continue
        if occupied[cell]:
            return True
    return False


def allowed_window(p: tuple[int, int], step_limit: int, side: int) -> frozenset[GridPoint]:
    """All cells within +/- step_limit of p on both axes, cut to the grid (p included)."""
    i0, i1 = max(0, p[0] - step_limit), min(side - 1, p[0] + step_limit)
    j0, j1 = max(0, p[1] - step_limit), min(side - 1, p[1] + step_limit)
    return frozenset(GridPoint(i, j) for i in range(i0, i1 + 1) for j in range(j0, j1 + 1))


def is_permissible(
    building_map: BuildingMap, p: tuple[int, int], q: tuple[int, int], step_limit: int
) -> bool:
    """Whether the UAV at p may fly straight to q in one step."""
    if not building_map.contains(q):
        return False
    if abs(q[0] - p[0]) > step_limit or abs(q[1] - p[1]) > step_limit:
        return False
    if building_map.is_occupied(q):
        return False
    return not line_blocked(building_map, p, q)


class PermissibleRegion:
    """
    Lazy view of the cells reachable from p in one step.

    Membership tests cost one line-of-sight walk; iteration enumerates the
    movement window in row-major order.
    """

    def __init__(self, building_map: BuildingMap, p: tuple[int, int], step_limit: int):
        origin = GridPoint(*p)
        if not building_map.contains(origin):
            raise GeometryError(f"UAV cell {origin} lies outside the {building_map.side}x grid")
        if building_map.is_occupied(origin):
            raise GeometryError(f"UAV cell {origin} is inside a building")
        self.building_map = building_map
        self.origin = origin
        self.step_limit = step_limit

    def __contains__(self, q: object) -> bool:
        if not isinstance(q, tuple) or len(q) != 2:
            return False
        return is_permissible(
            self.building_map, self.origin, q, self.step_limit  # type: ignore[arg-type]
        )

    def __iter__(self) -> Iterator[GridPoint]:
        side = self.building_map.side
        p, lim = self.origin, self.step_limit
        for i in range(max(0, p.i - lim), min(side - 1, p.i + lim) + 1):
            for j in range(max(0, p.j - lim), min(side - 1, p.j + lim) + 1):
                q = GridPoint(i, j)
                if not self.building_map.occupied[i, j] and not line_blocked(
                    self.building_map, p, q
                ):
                    yield q

    def __len__(self) -> int:
        return sum(1 for _ in self)


def permissible_set(
    building_map: BuildingMap, p: tuple[int, int], step_limit: int
) -> frozenset[GridPoint]:
    """
    Window cells that are free and visible from p.

    Raises:
        GeometryError: If p is occupied (a UAV can never be inside a building)
    """
    return frozenset(PermissibleRegion(building_map, p, step_limit))


def clamp_to_path(
    building_map: BuildingMap,
    source: tuple[int, int],
    target: tuple[int, int],
    step_limit: int,
) -> GridPoint:
    """
    Move from source toward target as far as the permissibility rule allows.

    Walks the cells of the source-target segment and returns the farthest one
    (in traversal order) that is permissible from source. Returns target when it
    is itself permissible and source when no forward cell is.

    Raises:
        GeometryError: If source is occupied
    """
    region = PermissibleRegion(building_map, source, step_limit)
    cells = supercover_cells(region.origin, target)
    for cell in reversed(cells[1:]):
        if cell in region:
            return cell
    return region.origin
