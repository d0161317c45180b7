"""Unit tests for the raster and manifest loaders."""

import math

import numpy as np
import pytest

from coverage_scout.core.loader import (
    CorpusEntry,
    CorpusManifest,
    CoverageManifest,
    GridHeader,
    GridLoader,
)
from coverage_scout.exceptions import CorpusError, GridFormatError
from tests.fixtures.maps import make_coverage, make_map, write_coverage_corpus


class TestGridLoader:
    """Tests for CHGRID/1 rasters."""

    def test_heights_round_trip(self, tmp_path):
        """Test that saved heights load back exactly."""
        rng = np.random.default_rng(3)
        building_map = make_map(5)
        heights = rng.uniform(0, 40, size=(5, 5))
        building_map = type(building_map)(heights=heights, resolution_m=2.5, altitude_m=3.0)
        path = tmp_path / "map.chgrid"

        GridLoader.save_heights(building_map, path)
        loaded = GridLoader.load_heights(path)

        assert np.array_equal(loaded.heights, heights)
        assert loaded.resolution_m == 2.5
        assert loaded.altitude_m == 3.0

    def test_rsrp_nan_sentinel(self, tmp_path):
        """Test that occupied cells survive as NaN."""
        building_map = make_map(3, occupied=[(1, 1)])
        cm = make_coverage(building_map, np.full((3, 3), -75.0))
        path = tmp_path / "cov.rsrp.chgrid"

        GridLoader.save_rsrp(cm, path)
        header, values = GridLoader.load_rsrp(path)

        assert header.kind == "rsrp"
        assert math.isnan(values[1, 1])
        assert values[0, 0] == -75.0

    def test_file_layout(self, tmp_path):
        """Test the header lines written to disk."""
        path = tmp_path / "g.chgrid"
        GridLoader.write(path, GridHeader("heights", 2, 4.0, 2.0), np.zeros((2, 2)))

        lines = path.read_text().splitlines()

        assert lines[0] == "CHGRID 1"
        assert lines[1] == "kind=heights"
        assert lines[2] == "L=2 resolution_m=4.0 altitude_m=2.0"
        assert len(lines) == 5

    def test_bad_magic(self, tmp_path):
        """Test that a wrong first line is reported at line 1."""
        path = tmp_path / "bad.chgrid"
        path.write_text("GRID 2\nkind=heights\nL=1 resolution_m=4 altitude_m=2\n0\n")

        with pytest.raises(GridFormatError, match=":1:"):
            GridLoader.read(path)

    def test_bad_value_line_number(self, tmp_path):
        """Test that a malformed value names its line."""
        path = tmp_path / "bad.chgrid"
        path.write_text("CHGRID 1\nkind=heights\nL=2 resolution_m=4 altitude_m=2\n0 0\n0 x\n")

        with pytest.raises(GridFormatError, match=":5:"):
            GridLoader.read(path)

    def test_wrong_row_width(self, tmp_path):
        """Test that a short row is rejected."""
        path = tmp_path / "bad.chgrid"
        path.write_text("CHGRID 1\nkind=heights\nL=2 resolution_m=4 altitude_m=2\n0 0\n0\n")

        with pytest.raises(GridFormatError, match="expected 2 values"):
            GridLoader.read(path)

    def test_missing_header_field(self, tmp_path):
        """Test that header fields are required."""
        path = tmp_path / "bad.chgrid"
        path.write_text("CHGRID 1\nkind=heights\nL=1 resolution_m=4\n0\n")

        with pytest.raises(GridFormatError, match="altitude_m"):
            GridLoader.read(path)

    def test_kind_mismatch(self, tmp_path):
        """Test that an RSRP raster is not accepted as heights."""
        path = tmp_path / "cov.chgrid"
        GridLoader.write(path, GridHeader("rsrp", 1, 4.0, 2.0), np.array([[-80.0]]))

        with pytest.raises(GridFormatError, match="kind=heights"):
            GridLoader.load_heights(path)

    def test_missing_file(self, tmp_path):
        """Test the missing-file error."""
        with pytest.raises(GridFormatError, match="not found"):
            GridLoader.read(tmp_path / "nope.chgrid")


class TestManifests:
    """Tests for corpus and coverage manifests."""

    def test_corpus_round_trip_and_filter(self, tmp_path):
        """Test saving, loading and filtering a corpus manifest."""
        manifest = CorpusManifest(
            root=tmp_path,
            entries=[
                CorpusEntry("map_0000.chgrid", 0.1, 0),
                CorpusEntry("map_0001.chgrid", 0.3, 1),
                CorpusEntry("map_0002.chgrid", 0.5, 2),
            ],
        )
        manifest.save()

        loaded = CorpusManifest.load(tmp_path)
        kept = loaded.filter(0.2, 0.5)

        assert loaded.entries == manifest.entries
        assert [e.file for e in kept] == ["map_0001.chgrid", "map_0002.chgrid"]

    def test_corpus_bad_header(self, tmp_path):
        """Test header validation."""
        (tmp_path / "manifest.csv").write_text("name,fraction\nx,0.1\n")

        with pytest.raises(CorpusError, match="expected header"):
            CorpusManifest.load(tmp_path)

    def test_coverage_load_pair(self, tmp_path):
        """Test loading a map and its coverage raster together."""
        building_map = make_map(4, occupied=[(0, 3)])
        rsrp = np.full((4, 4), -60.0)
        rsrp[3, 0] = -120.0
        cm = make_coverage(building_map, rsrp, bs=(1, 1))
        write_coverage_corpus(tmp_path, [(building_map, cm)])

        manifest = CoverageManifest.load(tmp_path / "coverage.csv")
        loaded_map, loaded_cm = manifest.load_pair(manifest.entries[0], -100.0)

        assert manifest.entries[0].ch_count == 1
        assert manifest.entries[0].base_station.cell == (1, 1)
        assert loaded_map.is_occupied((0, 3))
        assert loaded_cm.measure((3, 0)) == -120.0

    def test_missing_coverage_manifest(self, tmp_path):
        """Test the hint for corpora without coverage."""
        with pytest.raises(CorpusError, match="gen-coverage"):
            CoverageManifest.load(tmp_path)
