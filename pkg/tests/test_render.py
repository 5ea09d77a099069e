import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from ucbos.cells import enumerate_cells, make_cell
from ucbos.driver import ground_state_at_field
from ucbos.render import DOWN_COLOR, UP_COLOR, render_pattern
from ucbos.samplers import SamplerConfig

NS = "{http://www.w3.org/2000/svg}"


def circles(svg):
    root = ET.fromstring(svg)
    return [c for c in root.iter(f"{NS}circle")]


def polygon_area(svg):
    root = ET.fromstring(svg)
    poly = next(p for p in root.iter(f"{NS}polygon") if p.get("class") == "unit-cell")
    pts = np.array([[float(v) for v in pair.split(",")] for pair in poly.get("points").split()])
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def test_single_site_tiling(triangular):
    svg = render_pattern(triangular, make_cell(triangular, ((1, 0), (0, 1))), [1], (3, 3))
    cs = circles(svg)
    assert len(cs) == 9
    assert {c.get("fill") for c in cs} == {UP_COLOR}


def test_kagome_winner_tiling(kagome):
    point = ground_state_at_field(kagome, enumerate_cells(kagome, 6, 12), 3.0, 1.0, 0.0, SamplerConfig("exhaustive"))
    assert point.K == 12
    svg = render_pattern(kagome, make_cell(kagome, point.cell_coeffs), point.winning_config, (2, 2))
    cs = circles(svg)
    assert len(cs) == 48
    assert sum(c.get("class") == "spin-up" for c in cs) == 24
    assert sum(c.get("fill") == DOWN_COLOR for c in cs) == 24


@pytest.mark.parametrize("coeffs", [((1, 0), (0, 1)), ((2, 1), (0, 3)), ((4, 0), (0, 1))])
def test_shaded_area(kagome, coeffs):
    cell = make_cell(kagome, coeffs)
    svg = render_pattern(kagome, cell, [1] * cell.K)
    det = abs(coeffs[0][0] * coeffs[1][1] - coeffs[0][1] * coeffs[1][0])
    assert polygon_area(svg) == pytest.approx(det * kagome.cell_area, rel=1e-5)


def test_title_escaped(triangular):
    svg = render_pattern(triangular, make_cell(triangular, ((1, 0), (0, 1))), [-1], title="a<b")
    assert "a&lt;b" in svg
    assert re.search(r'class="spin-down"', svg)


def test_invalid_config(triangular):
    with pytest.raises(ValueError):
        render_pattern(triangular, make_cell(triangular, ((1, 0), (0, 1))), [0])
