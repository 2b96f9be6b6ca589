import math

import pytest

from gearphy.cell import CellScenario, area_weighted_ebit, median_distance
from gearphy.errors import InvalidParameterError


class TestMedianDistance:
    def test_uniform_disk_limit(self):
        scn = CellScenario(d_min=1e-6, d_max=400.0, delta_d=40.0)
        assert median_distance(scn) == pytest.approx(400.0 / math.sqrt(2.0), rel=1e-9)

    def test_reference_scenario(self):
        scn = CellScenario(d_min=20.0, d_max=400.0, delta_d=40.0)
        assert median_distance(scn) == pytest.approx(math.sqrt(80200.0), rel=1e-12)
        assert median_distance(scn) == pytest.approx(283.196, rel=1e-4)

    def test_degenerate_annulus(self):
        scn = CellScenario(d_min=100.0, d_max=100.0 + 1e-6, delta_d=1.0)
        assert median_distance(scn) == pytest.approx(100.0, rel=1e-6)


class TestRings:
    def test_reference_ring_layout(self):
        scn = CellScenario(d_min=20.0, d_max=400.0, delta_d=40.0)
        rings = scn.rings()
        assert len(rings) == 10
        assert rings[0].distance == pytest.approx(40.0)
        assert rings[0].width == pytest.approx(40.0)
        # last ring is truncated: [380, 400)
        assert rings[-1].width == pytest.approx(20.0)
        assert rings[-1].distance == pytest.approx(390.0)

    def test_weights_close_cell_area(self):
        scn = CellScenario(d_min=20.0, d_max=400.0, delta_d=40.0)
        total = sum(r.area for r in scn.rings())
        assert total == pytest.approx(scn.cell_area, rel=1e-12)

    def test_weights_grow_with_distance(self):
        scn = CellScenario(d_min=20.0, d_max=380.0, delta_d=40.0)
        areas = [r.area for r in scn.rings()]
        assert areas == sorted(areas)

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            CellScenario(d_min=0.0, d_max=100.0, delta_d=10.0)
        with pytest.raises(InvalidParameterError):
            CellScenario(d_min=100.0, d_max=50.0, delta_d=10.0)


class TestAreaWeighting:
    def test_constant_energy_recovered_exactly(self):
        scn = CellScenario(d_min=20.0, d_max=400.0, delta_d=40.0)
        e0 = 3.7e-8
        result = area_weighted_ebit([e0] * len(scn.rings()), scn)
        assert result == pytest.approx(e0, rel=1e-12)

    def test_outer_rings_dominate(self):
        scn = CellScenario(d_min=20.0, d_max=400.0, delta_d=40.0)
        n = len(scn.rings())
        outer_heavy = [1.0] * (n - 1) + [10.0]
        inner_heavy = [10.0] + [1.0] * (n - 1)
        assert area_weighted_ebit(outer_heavy, scn) > area_weighted_ebit(inner_heavy, scn)

    def test_infeasible_ring_poisons_total(self):
        scn = CellScenario(d_min=20.0, d_max=400.0, delta_d=40.0)
        values = [1.0] * len(scn.rings())
        values[3] = math.inf
        assert area_weighted_ebit(values, scn) == math.inf

    def test_ring_count_mismatch_rejected(self):
        scn = CellScenario(d_min=20.0, d_max=400.0, delta_d=40.0)
        with pytest.raises(InvalidParameterError):
            area_weighted_ebit([1.0, 2.0], scn)
