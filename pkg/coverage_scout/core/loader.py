"""Raster and manifest loaders.

Rasters use the CHGRID/1 text format::

    CHGRID 1
    kind=heights
    L=121 resolution_m=4.0 altitude_m=2.0
    <L rows of L whitespace-separated values, row-major>

Corpora are described by CSV manifests that sit next to the raster files.
"""

import csv
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from coverage_scout.core.types import BaseStation, BuildingMap, CoverageMap, GridPoint
from coverage_scout.exceptions import CorpusError, GridFormatError, ValidationError
from coverage_scout.utils.logging import get_logger

logger = get_logger(__name__)

MAGIC = "CHGRID 1"
GridKind = Literal["heights", "rsrp"]

CORPUS_MANIFEST = "manifest.csv"
COVERAGE_MANIFEST = "coverage.csv"


@dataclass(frozen=True)
class GridHeader:
    """Metadata line of a CHGRID/1 file."""

    kind: GridKind
    side: int
    resolution_m: float
    altitude_m: float


class GridLoader:
    """
    Reads and writes CHGRID/1 rasters.

    Values are written with ``repr`` so that a save/load cycle is lossless;
    the "no measurement" sentinel is written as ``nan``.
    """

    @staticmethod
    def read(file_path: str | Path) -> tuple[GridHeader, NDArray[np.float64]]:
        """
        Parse a raster file.

        Args:
            file_path: Path to a CHGRID/1 file

        Returns:
            Header and the L x L value array

        Raises:
            GridFormatError: If the file is missing or malformed (message carries
                the path and 1-based line number)
        """
        path = Path(file_path)
        if not path.exists():
            raise GridFormatError(f"Grid file not found: {path}")

        try:
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
        except OSError as e:
            raise GridFormatError(f"Error reading grid file {path}: {e}") from e

        if not lines or lines[0].strip() != MAGIC:
            raise GridFormatError(f"{path}:1: expected '{MAGIC}'")
        if len(lines) < 3:
            raise GridFormatError(f"{path}: truncated header")

        header = GridLoader._parse_header(path, lines[1], lines[2])

        rows = [line for line in lines[3:] if line.strip()]
        if len(rows) != header.side:
            raise GridFormatError(f"{path}: expected {header.side} rows, found {len(rows)}")

        values = np.empty((header.side, header.side), dtype=np.float64)
        for offset, line in enumerate(rows):
            line_num = offset + 4
            tokens = line.split()
            if len(tokens) != header.side:
                raise GridFormatError(
                    f"{path}:{line_num}: expected {header.side} values, found {len(tokens)}"
                )
            try:
                values[offset] = [float(tok) for tok in tokens]
            except ValueError as e:
                raise GridFormatError(f"{path}:{line_num}: {e}") from e

        return header, values

    @staticmethod
    def _parse_header(path: Path, kind_line: str, dims_line: str) -> GridHeader:
        key, _, kind = kind_line.strip().partition("=")
        if key != "kind" or kind not in ("heights", "rsrp"):
            raise GridFormatError(f"{path}:2: expected 'kind=<heights|rsrp>', got {kind_line!r}")

        fields: dict[str, str] = {}
        for token in dims_line.split():
            name, sep, value = token.partition("=")
            if not sep:
                raise GridFormatError(f"{path}:3: malformed field {token!r}")
            fields[name] = value

        try:
            side = int(fields["L"])
            resolution_m = float(fields["resolution_m"])
            altitude_m = float(fields["altitude_m"])
        except KeyError as e:
            raise GridFormatError(f"{path}:3: missing field {e.args[0]}") from e
        except ValueError as e:
            raise GridFormatError(f"{path}:3: {e}") from e

        if side < 1:
            raise GridFormatError(f"{path}:3: L must be >= 1, got {side}")

        return GridHeader(
            kind=kind,  # type: ignore[arg-type]
            side=side,
            resolution_m=resolution_m,
            altitude_m=altitude_m,
        )

    @staticmethod
    def write(
        file_path: str | Path,
        header: GridHeader,
        values: NDArray[np.float64],
    ) -> None:
        """Write a raster; parent directories are created as needed."""
        path = Path(file_path)
        if values.shape != (header.side, header.side):
            raise GridFormatError(
                f"Cannot write {path}: array shape {values.shape} does not match L={header.side}"
            )
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                f.write(MAGIC + "\n")
                f.write(f"kind={header.kind}\n")
                f.write(
                    f"L={header.side} resolution_m={header.resolution_m!r} "
                    f"altitude_m={header.altitude_m!r}\n"
                )
                for row in values:
                    f.write(" ".join(repr(float(v)) for v in row) + "\n")
        except OSError as e:
            raise GridFormatError(f"Error writing grid file {path}: {e}") from e

    @staticmethod
    def load_heights(file_path: str | Path) -> BuildingMap:
        """Load a building map."""
        header, values = GridLoader.read(file_path)
        if header.kind != "heights":
            raise GridFormatError(f"{file_path}:2: expected kind=heights, got kind={header.kind}")
        try:
            return BuildingMap(
                heights=values, resolution_m=header.resolution_m, altitude_m=header.altitude_m
            )
        except ValidationError as e:
            raise GridFormatError(f"{file_path}: {e}") from e

    @staticmethod
    def load_rsrp(file_path: str | Path) -> tuple[GridHeader, NDArray[np.float64]]:
        """Load a raw RSRP raster (NaN on occupied cells)."""
        header, values = GridLoader.read(file_path)
        if header.kind != "rsrp":
            raise GridFormatError(f"{file_path}:2: expected kind=rsrp, got kind={header.kind}")
        return header, values

    @staticmethod
    def load_coverage(
        file_path: str | Path, bs: BaseStation, ch_threshold_db: float = -100.0
    ) -> CoverageMap:
        """Load an RSRP raster as a CoverageMap for a known base station."""
        header, values = GridLoader.load_rsrp(file_path)
        return CoverageMap(
            rsrp=values, bs=bs, resolution_m=header.resolution_m, ch_threshold_db=ch_threshold_db
        )

    @staticmethod
    def save_heights(building_map: BuildingMap, file_path: str | Path) -> None:
        header = GridHeader(
            kind="heights",
            side=building_map.side,
            resolution_m=building_map.resolution_m,
            altitude_m=building_map.altitude_m,
        )
        GridLoader.write(file_path, header, building_map.heights)

    @staticmethod
    def save_rsrp(cm: CoverageMap, file_path: str | Path, altitude_m: float = 2.0) -> None:
        header = GridHeader(
            kind="rsrp", side=cm.side, resolution_m=cm.resolution_m, altitude_m=altitude_m
        )
        GridLoader.write(file_path, header, cm.rsrp)


@dataclass(frozen=True)
class CorpusEntry:
    """One generated map."""

    file: str
    occupied_fraction: float
    seed: int


@dataclass
class CorpusManifest:
    """
    Listing of a map corpus (CSV header ``file,occupied_fraction,seed``).

    File names are relative to ``root``, the directory holding the manifest.
    """

    root: Path
    entries: list[CorpusEntry] = field(default_factory=list)

    FIELDS = ("file", "occupied_fraction", "seed")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CorpusEntry]:
        return iter(self.entries)

    def path_of(self, entry: CorpusEntry) -> Path:
        return self.root / entry.file

    def load_map(self, entry: CorpusEntry) -> BuildingMap:
        return GridLoader.load_heights(self.path_of(entry))

    def filter(self, min_fraction: float = 0.0, max_fraction: float = 1.0) -> "CorpusManifest":
        """Keep only maps whose occupied fraction lies in [min_fraction, max_fraction]."""
        kept = [e for e in self.entries if min_fraction <= e.occupied_fraction <= max_fraction]
        if len(kept) < len(self.entries):
            logger.info(
                f"Corpus filter [{min_fraction}, {max_fraction}] kept "
                f"{len(kept)}/{len(self.entries)} maps"
            )
        return CorpusManifest(root=self.root, entries=kept)

    @classmethod
    def load(cls, file_path: str | Path) -> "CorpusManifest":
        """
        Load a corpus manifest.

        Args:
            file_path: Manifest CSV, or the corpus directory containing manifest.csv

        Raises:
            CorpusError: If the manifest is missing or malformed
        """
        path = Path(file_path)
        if path.is_dir():
            path = path / CORPUS_MANIFEST
        if not path.exists():
            raise CorpusError(f"Corpus manifest not found: {path}")

        entries = []
        try:
            with open(path, encoding="utf-8", newline="") as f:
                reader = csv.DictReader(f)
                if tuple(reader.fieldnames or ()) != cls.FIELDS:
                    raise CorpusError(
                        f"{path}: expected header {','.join(cls.FIELDS)}, got {reader.fieldnames}"
                    )
                for line_num, row in enumerate(reader, start=2):
                    try:
                        entries.append(
                            CorpusEntry(
                                file=row["file"],
                                occupied_fraction=float(row["occupied_fraction"]),
                                seed=int(row["seed"]),
                            )
                        )
                    except (TypeError, ValueError) as e:
                        raise CorpusError(f"{path}:{line_num}: {e}") from e
        except OSError as e:
            raise CorpusError(f"Error reading manifest {path}: {e}") from e

        return cls(root=path.parent, entries=entries)

    def save(self, file_path: str | Path | None = None) -> Path:
        """Write the manifest (default: root/manifest.csv) and return its path."""
        path = Path(file_path) if file_path is not None else self.root / CORPUS_MANIFEST
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(self.FIELDS)
                for e in self.entries:
                    writer.writerow([e.file, repr(e.occupied_fraction), e.seed])
        except OSError as e:
            raise CorpusError(f"Error writing manifest {path}: {e}") from e
        return path


@dataclass(frozen=True)
class CoverageEntry:
    """One (building map, base station, coverage raster) triple."""

    map_file: str
    coverage_file: str
    bs_i: int
    bs_j: int
    bs_height_m: float
    ch_count: int

    @property
    def base_station(self) -> BaseStation:
        return BaseStation(cell=GridPoint(self.bs_i, self.bs_j), antenna_height_m=self.bs_height_m)


@dataclass
class CoverageManifest:
    """
    Listing written by gen-coverage (CSV header
    ``map_file,coverage_file,bs_i,bs_j,bs_height_m,ch_count``).
    """

    root: Path
    entries: list[CoverageEntry] = field(default_factory=list)

    FIELDS = ("map_file", "coverage_file", "bs_i", "bs_j", "bs_height_m", "ch_count")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CoverageEntry]:
        return iter(self.entries)

    def load_pair(
        self, entry: CoverageEntry, ch_threshold_db: float = -100.0
    ) -> tuple[BuildingMap, CoverageMap]:
        """Load the building map and coverage map of one entry."""
        building_map = GridLoader.load_heights(self.root / entry.map_file)
        cm = GridLoader.load_coverage(
            self.root / entry.coverage_file, entry.base_station, ch_threshold_db
        )
        if cm.side != building_map.side:
            raise CorpusError(
                f"{entry.coverage_file}: side {cm.side} does not match map side {building_map.side}"
            )
        return building_map, cm

    @classmethod
    def load(cls, file_path: str | Path) -> "CoverageManifest":
        """
        Load a coverage manifest.

        Args:
            file_path: coverage.csv, or the corpus directory containing it

        Raises:
            CorpusError: If the manifest is missing or malformed
        """
        path = Path(file_path)
        if path.is_dir():
            path = path / COVERAGE_MANIFEST
        if not path.exists():
            raise CorpusError(
                f"Coverage manifest not found: {path} (run gen-coverage on the corpus first)"
            )

        entries = []
        try:
            with open(path, encoding="utf-8", newline="") as f:
                reader = csv.DictReader(f)
                if tuple(reader.fieldnames or ()) != cls.FIELDS:
                    raise CorpusError(
                        f"{path}: expected header {','.join(cls.FIELDS)}, got {reader.fieldnames}"
                    )
                for line_num, row in enumerate(reader, start=2):
                    try:
                        entries.append(
                            CoverageEntry(
                                map_file=row["map_file"],
                                coverage_file=row["coverage_file"],
                                bs_i=int(row["bs_i"]),
                                bs_j=int(row["bs_j"]),
                                bs_height_m=float(row["bs_height_m"]),
                                ch_count=int(row["ch_count"]),
                            )
                        )
                    except (TypeError, ValueError) as e:
                        raise CorpusError(f"{path}:{line_num}: {e}") from e
        except OSError as e:
            raise CorpusError(f"Error reading manifest {path}: {e}") from e

        return cls(root=path.parent, entries=entries)

    def save(self, file_path: str | Path | None = None) -> Path:
        path = Path(file_path) if file_path is not None else self.root / COVERAGE_MANIFEST
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(self.FIELDS)
                for e in self.entries:
                    writer.writerow(
                        [
                            e.map_file,
                            e.coverage_file,
                            e.bs_i,
                            e.bs_j,
                            repr(e.bs_height_m),
                            e.ch_count,
                        ]
                    )
        except OSError as e:
            raise CorpusError(f"Error writing manifest {path}: {e}") from e
        return path
