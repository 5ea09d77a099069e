import json
from fractions import Fraction

import numpy as np
import pytest

from ucbos.cells import enumerate_cells, make_cell
from ucbos.driver import (
    CellSolveError,
    default_field_range,
    field_grid,
    ground_state_at_field,
    prepare_models,
    saturation_bound,
    sweep_staircase,
)
from ucbos.lattice import make_triangular
from ucbos.model import build_problem, energy_per_site, magnetization
from ucbos.samplers import SamplerConfig

EXACT = SamplerConfig("exhaustive")


@pytest.fixture(scope="module")
def tri_cells():
    return enumerate_cells(make_triangular(), 6, 12)


def test_saturated_field(triangular, tri_cells):
    point = ground_state_at_field(triangular, tri_cells, 3.0, 1.0, 20.0, EXACT)
    assert point.K == 1 and point.winning_config == (-1,)
    assert point.magnetization == -1.0


def test_central_plateau_three_sublattice(triangular, tri_cells):
    point = ground_state_at_field(triangular, tri_cells, 3.0, 1.0, 4.0, EXACT)
    assert point.K == 3 and point.magnetization_fraction == Fraction(-1, 3)
    assert sorted(point.winning_config) == [-1, -1, 1]


def test_kagome_twelve_site_state(kagome):
    cells = enumerate_cells(kagome, 6, 24)
    point = ground_state_at_field(kagome, cells, 3.0, 1.0, 0.0, EXACT)
    assert point.K == 12
    assert point.spin_sum == 0


def test_winner_reevaluation(kagome):
    cells = enumerate_cells(kagome, 6, 12)
    point = ground_state_at_field(kagome, cells, 3.0, 1.0, 0.7, EXACT)
    fresh = build_problem(kagome, make_cell(kagome, point.cell_coeffs), 3.0, h=0.7)
    assert energy_per_site(fresh, point.winning_config) == pytest.approx(point.best_energy_per_site, abs=1e-12)
    assert point.magnetization == magnetization(point.winning_config)


def test_no_interaction_single_step(triangular):
    lattice = triangular.without_bonds()
    cells = enumerate_cells(lattice, 3, 4)
    report = sweep_staircase(lattice, cells, 3.0, 0.0, (-1.0, 1.0, 0.25), EXACT)
    m = [p.magnetization for p in report.points]
    # h = 0 is fully degenerate; the tie-break lands on the smallest cell and spin tuple
    assert m == [1.0] * 4 + [-1.0] * 5
    assert [r[0] for r in report.plateaus()] == [1, -1]


def test_cell_set_monotonicity(triangular, tri_cells):
    small = [c for c in tri_cells if c.K <= 4]
    for h in (0.0, 1.0, 3.0, 7.0):
        a = ground_state_at_field(triangular, small, 3.0, 1.0, h, EXACT)
        b = ground_state_at_field(triangular, tri_cells, 3.0, 1.0, h, EXACT)
        assert b.best_energy_per_site <= a.best_energy_per_site + 1e-12


def test_duality_on_symmetric_grid(triangular, tri_cells):
    cells = [c for c in tri_cells if c.K <= 6]
    report = sweep_staircase(triangular, cells, 3.0, 1.0, (-8.0, 8.0, 0.5), EXACT)
    m = report.magnetizations()
    assert np.array_equal(m, -m[::-1])
    assert report.monotone


def test_cross_sampler_agreement(ssl):
    cells = enumerate_cells(ssl, 6, 12)
    models = prepare_models(ssl, cells, 3.0)
    for h in (0.0, 2.0):
        exact = ground_state_at_field(ssl, cells, 3.0, 1.0, h, EXACT, models=models)
        sa = ground_state_at_field(ssl, cells, 3.0, 1.0, h, SamplerConfig(num_reads=200), models=models)
        assert sa.best_energy_per_site == pytest.approx(exact.best_energy_per_site, abs=1e-9)


def test_errors_identify_cell(kagome):
    big = [make_cell(kagome, ((5, 0), (0, 2)))]
    with pytest.raises(CellSolveError, match="5:0:0:2"):
        ground_state_at_field(kagome, big, 3.0, 1.0, 0.0, EXACT)
    with pytest.raises(ValueError):
        ground_state_at_field(kagome, [], 3.0, 1.0, 0.0, EXACT)


def test_field_grid():
    grid = field_grid(-0.03, 0.025, 0.01)
    assert grid.tolist() == [-0.03, -0.02, -0.01, 0.0, 0.01, 0.02]
    with pytest.raises(ValueError):
        field_grid(0, 1, 0)


def test_default_range_covers_saturation(triangular):
    bound = saturation_bound(triangular, 3.0, 1.0)
    lo, hi = default_field_range(triangular, 3.0, 1.0)
    assert hi > bound and lo == -hi
    assert bound == pytest.approx(11.03417573491481, abs=1e-9)


def test_report_outputs(tmp_path, triangular, tri_cells):
    cells = [c for c in tri_cells if c.K <= 3]
    report = sweep_staircase(triangular, cells, 3.0, 1.0, (-0.5, 0.5, 0.5), EXACT, run_config={"seed": 0})
    out = report.write(tmp_path)
    lines = (out / "staircase.csv").read_text().splitlines()
    assert lines[0] == "h,energyPerSite,magnetization,cellKey,K"
    assert len(lines) == 4
    h, e, m, key, K = lines[1].split(",")
    assert float(h) == -0.5 and float(e) == pytest.approx(report.points[0].best_energy_per_site, abs=1e-14)
    assert Fraction(m) == report.points[0].magnetization_fraction and int(K) == report.points[0].K
    configs = json.loads((out / "configurations.json").read_text())
    assert len(configs) == 3 and all(len(c["spins"]) == c["K"] for c in configs)
    prov = json.loads((out / "provenance.json").read_text())
    assert prov["runConfig"]["alpha"] == 3.0 and prov["runConfig"]["cells"][0] == "1:0:0:1"
