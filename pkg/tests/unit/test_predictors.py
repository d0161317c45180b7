"""Unit tests for waypoint predictors."""

import math

import numpy as np
import pytest
from scipy.stats import chisquare

from coverage_scout.core.config import AgentConfig
from coverage_scout.core.types import GridPoint, MeasurementLog
from coverage_scout.exceptions import ConfigurationError, GeometryError, ValidationError
from coverage_scout.nn.qnet import QNetwork
from coverage_scout.predictors import (
    BNPPredictor,
    BnpConfig,
    CoverageAccess,
    CoverageView,
    DDQNPredictor,
    GBNPPredictor,
    GRSPPredictor,
    PredictionContext,
    RSPPredictor,
    bnp_sample,
    build_predictor,
    gbnp_step,
    grsp_step,
    parse_method,
    rsp_sample,
)
from coverage_scout.predictors.sampling import neighborhood_cells
from tests.fixtures.maps import make_coverage, make_map, ramp_coverage


def _brute_neighborhood(building_map, d_b_m: float) -> set[tuple[int, int]]:
    occupied = [tuple(c) for c in np.argwhere(building_map.occupied).tolist()]
    res = building_map.resolution_m
    cells = set()
    for i in range(building_map.side):
        for j in range(building_map.side):
            if building_map.occupied[i, j]:
                continue
            if any(math.hypot(i - a, j - b) * res <= d_b_m for a, b in occupied):
                cells.add((i, j))
    return cells


class TestParseMethod:
    """Tests for method names."""

    @pytest.mark.parametrize(
        "name,expected",
        [
            ("rsp", ("rsp", None)),
            ("bnp", ("bnp", 8.0)),
            ("bnp@16", ("bnp", 16.0)),
            ("GBNP@32", ("gbnp", 32.0)),
            ("ddqn", ("ddqn", None)),
        ],
    )
    def test_valid(self, name, expected):
        """Test accepted names."""
        assert parse_method(name) == expected

    @pytest.mark.parametrize("name", ["random", "rsp@8", "bnp@x", "bnp@-4"])
    def test_invalid(self, name):
        """Test rejected names."""
        with pytest.raises(ConfigurationError):
            parse_method(name)

    def test_build(self):
        """Test the registry."""
        assert isinstance(build_predictor("rsp"), RSPPredictor)
        assert isinstance(build_predictor("grsp"), GRSPPredictor)
        bnp = build_predictor("bnp@16")
        assert isinstance(bnp, BNPPredictor)
        assert bnp.cfg.d_b_m == 16.0
        assert bnp.name == "bnp@16"
        assert isinstance(build_predictor("gbnp", default_d_b_m=32.0), GBNPPredictor)

    def test_ddqn_needs_checkpoint(self):
        """Test that ddqn without weights is a configuration error."""
        with pytest.raises(ConfigurationError, match="checkpoint"):
            build_predictor("ddqn")


class TestSampling:
    """Tests for RSP and BNP sampling."""

    def test_rsp_open_map_uniform(self):
        """Test that every cell of an open map is drawn about equally often."""
        building_map = make_map(3)
        rng = np.random.default_rng(0)
        counts = np.zeros((3, 3))
        for _ in range(9000):
            p = rsp_sample(building_map, rng)
            counts[p] += 1

        assert counts.min() > 800
        assert counts.max() < 1200

    def test_rsp_single_free_cell(self):
        """Test a map with one unoccupied cell."""
        building_map = make_map(2, occupied=[(0, 0), (0, 1), (1, 0)])
        assert rsp_sample(building_map, np.random.default_rng(0)) == GridPoint(1, 1)

    def test_bnp_membership(self):
        """Test that BNP draws lie within d_B of a building."""
        rng = np.random.default_rng(1)
        building_map = make_map(15, occupied=[(3, 3), (3, 4), (10, 11)])
        expected = _brute_neighborhood(building_map, 8.0)

        assert {tuple(c) for c in neighborhood_cells(building_map, 8.0).tolist()} == expected
        for _ in range(200):
            assert tuple(bnp_sample(building_map, BnpConfig(8.0), rng)) in expected

    def test_bnp_needs_buildings(self):
        """Test the empty-map precondition."""
        with pytest.raises(GeometryError, match="building"):
            bnp_sample(make_map(5), BnpConfig(), np.random.default_rng(0))

    def test_bnp_uniform_over_neighborhood(self):
        """Test that BNP draws are uniform over the neighborhood by a chi-square test."""
        rng = np.random.default_rng(12)
        building_map = make_map(12, occupied=[(2, 2), (2, 3), (9, 8)])
        cells = [tuple(c) for c in neighborhood_cells(building_map, 8.0).tolist()]
        index = {c: n for n, c in enumerate(cells)}
        counts = np.zeros(len(cells))
        for _ in range(200 * len(cells)):
            counts[index[tuple(bnp_sample(building_map, BnpConfig(8.0), rng))]] += 1

        assert chisquare(counts).pvalue > 1e-4

    def test_bad_radius(self):
        """Test d_B validation."""
        with pytest.raises(ValidationError):
            BnpConfig(0.0)


class TestGradientSteps:
    """Tests for G-RSP and G-BNP steps."""

    def test_grsp_ramp(self):
        """Test a unit downhill step."""
        cm = ramp_coverage(make_map(11))
        assert grsp_step(cm, (5, 5), 3) == GridPoint(4, 5)

    def test_grsp_constant(self):
        """Test the fixed point of a flat field."""
        cm = make_coverage(make_map(11), np.full((11, 11), -70.0))
        assert grsp_step(cm, (5, 5), 3) == GridPoint(5, 5)

    def test_grsp_clamped(self):
        """Test that a steep ramp is clamped to the step limit."""
        cm = ramp_coverage(make_map(40), slope_i=20.0)
        assert grsp_step(cm, (30, 5), 15) == GridPoint(15, 5)

    def test_grsp_rounds_half_away(self):
        """Test rounding of half-cell gradients."""
        rows = np.indices((11, 11))[0].astype(float)
        cm = make_coverage(make_map(11), 0.5 * rows)
        assert grsp_step(cm, (5, 5), 3) == GridPoint(4, 5)

    def test_grsp_never_climbs_convex_bowl(self):
        """Test that one step never raises RSRP on a convex bowl and lowers it somewhere."""
        rows, cols = np.indices((21, 21)).astype(float)

        def bowl(i, j):
            return -120.0 + 0.3 * ((i - 10.3) ** 2 + (j - 7.6) ** 2)

        cm = make_coverage(make_map(21), bowl(rows, cols))
        decreased = False
        for i in range(21):
            for j in range(21):
                q = grsp_step(cm, (i, j), 15)
                assert bowl(q.i, q.j) <= bowl(i, j)
                decreased |= bowl(q.i, q.j) < bowl(i, j)

        assert decreased

    def test_gbnp_inside_unchanged(self):
        """Test that a neighborhood candidate is kept."""
        building_map = make_map(11, occupied=[(3, 5)])
        cm = ramp_coverage(building_map)
        assert gbnp_step(building_map, cm, (5, 5), BnpConfig(8.0), 3) == GridPoint(4, 5)

    def test_gbnp_projects_to_nearest(self):
        """Test the projection of an outside candidate."""
        building_map = make_map(20, occupied=[(10, 10)])
        cm = ramp_coverage(building_map, slope_i=5.0)
        cfg = BnpConfig(8.0)
        members = _brute_neighborhood(building_map, 8.0)

        q = gbnp_step(building_map, cm, (12, 10), cfg, 5)

        candidate = (7, 10)
        best = min(math.hypot(a - candidate[0], b - candidate[1]) for a, b in members)
        assert tuple(q) in members
        assert math.hypot(q.i - candidate[0], q.j - candidate[1]) == best
        assert q == GridPoint(8, 10)

    def test_gbnp_tie_is_row_major(self):
        """Test that equally near members resolve to the first in row-major order."""
        building_map = make_map(20, occupied=[(10, 10)])
        cm = make_coverage(building_map, np.full((20, 20), -70.0))
        cfg = BnpConfig(4.0)
        # Flat field keeps p; (10, 11) and (11, 10) are both sqrt(13) away
        q = gbnp_step(building_map, cm, (13, 13), cfg, 3)

        assert q == GridPoint(10, 11)


class TestPredictors:
    """Tests for predictor objects."""

    def _context(self, building_map, cm, access, p=(5, 5)) -> PredictionContext:
        log = MeasurementLog()
        log.append(GridPoint(*p), cm.measure(p))
        return PredictionContext(building_map, CoverageView(cm, access), GridPoint(*p), log, 3)

    def test_one_shot_flags(self):
        """Test which predictors move."""
        assert RSPPredictor().one_shot and BNPPredictor().one_shot
        assert not GRSPPredictor().one_shot and not GBNPPredictor().one_shot

    def test_point_access_hides_map(self):
        """Test that measurement-only access cannot read the raster."""
        building_map = make_map(11)
        view = CoverageView(ramp_coverage(building_map), CoverageAccess.POINT_MEASUREMENTS)

        assert view.measure((2, 2)) == -48.0
        with pytest.raises(ConfigurationError):
            view.full_map

    def test_grsp_predict(self):
        """Test the predictor wrapper."""
        building_map = make_map(11)
        cm = ramp_coverage(building_map)
        context = self._context(building_map, cm, CoverageAccess.FULL_MAP)

        assert GRSPPredictor().predict(context) == GridPoint(4, 5)

    def test_ddqn_predict_in_window(self):
        """Test that the learned predictor stays inside the movement window."""
        building_map = make_map(11, occupied=[(2, 2)])
        cm = ramp_coverage(building_map)
        net = QNetwork(step_limit=3, seed=0, dtype=np.float64)
        predictor = DDQNPredictor(net, AgentConfig(step_limit=3, dtype="float64"))

        q = predictor.predict(self._context(building_map, cm, predictor.coverage_access))

        assert abs(q.i - 5) <= 3 and abs(q.j - 5) <= 3
        assert predictor.coverage_access is CoverageAccess.POINT_MEASUREMENTS

    def test_ddqn_window_mismatch(self):
        """Test that a network for another step limit is refused."""
        building_map = make_map(11)
        cm = ramp_coverage(building_map)
        predictor = DDQNPredictor(QNetwork(step_limit=2), AgentConfig(step_limit=2))

        with pytest.raises(ConfigurationError):
            predictor.predict(self._context(building_map, cm, predictor.coverage_access))
