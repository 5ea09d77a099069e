import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ucbos.lattice import (
    Lattice,
    ShortRangeBond,
    distance_classes,
    lattice_from_config,
    make_kagome,
    make_shastry_sutherland,
    patch_positions,
    site_position,
)


def neighbour_count(lattice, b, dist, tol=1e-9):
    pts = patch_positions(lattice, 3)
    d = np.linalg.norm(pts - site_position(lattice, (0, 0), b), axis=1)
    return int(np.sum(np.abs(d - dist) < tol))


def test_triangular_definition(triangular):
    assert np.linalg.norm(triangular.t1) == pytest.approx(1.0, abs=1e-15)
    assert np.linalg.norm(triangular.t2) == pytest.approx(1.0, abs=1e-15)
    assert triangular.n_basis == 1
    assert neighbour_count(triangular, 0, 1.0) == 6


def test_kagome_definition(kagome):
    assert kagome.n_basis == 3
    for b in range(3):
        assert neighbour_count(kagome, b, 1.0) == 4
    pts = patch_positions(kagome, 2)
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    assert d[d > 1e-9].min() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "cell, basis, expected",
    [
        ((0, 0), 0, (0.0, 0.0)),
        ((1, 1), 0, (1.5, math.sqrt(3) / 2)),
    ],
)
def test_site_position_triangular(triangular, cell, basis, expected):
    np.testing.assert_allclose(site_position(triangular, cell, basis), expected, atol=1e-15)


def test_site_position_kagome(kagome):
    np.testing.assert_allclose(site_position(kagome, (0, 0), 1), (0.5, math.sqrt(3) / 2), atol=1e-15)


def test_site_position_bad_basis(kagome):
    with pytest.raises(IndexError):
        site_position(kagome, (0, 0), 3)


def test_site_position_matches_vector_addition(kagome):
    # bit-for-bit over a 7x7 patch
    t1, t2 = kagome.t1, kagome.t2
    for i in range(-3, 4):
        for j in range(-3, 4):
            for b, (bx, by) in enumerate(kagome.basis):
                p = site_position(kagome, (i, j), b)
                assert p[0] == i * t1[0] + j * t2[0] + bx
                assert p[1] == i * t1[1] + j * t2[1] + by


def test_reduced_basis_in_primitive_cell(kagome):
    frac = kagome.fractional(kagome.basis_array)
    assert np.all(frac >= 0) and np.all(frac < 1)
    again = Lattice.create("k2", kagome.t1, kagome.t2, kagome.basis)
    assert again.basis == kagome.basis


def test_coincident_basis_rejected():
    with pytest.raises(ValueError):
        Lattice.create("bad", (1, 0), (0, 1), [(0, 0), (1, 0)])


def test_colinear_vectors_rejected():
    with pytest.raises(ValueError):
        Lattice.create("bad", (1, 0), (2, 0), [(0, 0)])


def test_bonds_closed_under_reversal(ssl):
    keys = {b.key for b in ssl.bonds}
    for b in ssl.bonds:
        assert b.reversed().key in keys


def test_bond_shift_follows_basis_reduction():
    # basis offset (1.5, 0) reduces to (0.5, 0) with shift 1; a bond to it
    # in cell 0 must then point to reduced cell (1, 0)
    lat = Lattice.create("c", (1, 0), (0, 1), [(0, 0), (1.5, 0)], [ShortRangeBond(0, 1, (0, 0), 1.0)])
    fwd = [b for b in lat.bonds if b.basis_from == 0][0]
    assert fwd.cell_displacement == (1, 0)
    p_from = site_position(lat, (0, 0), 0)
    p_to = site_position(lat, fwd.cell_displacement, 1)
    assert np.linalg.norm(p_to - p_from) == pytest.approx(1.5)


def test_duplicate_and_self_bonds_rejected():
    with pytest.raises(ValueError):
        Lattice.create("c", (1, 0), (0, 1), [(0, 0)], [(0, 0, 0, 0, 1.0)])
    with pytest.raises(ValueError):
        Lattice.create("c", (1, 0), (0, 1), [(0, 0)], [(0, 0, 1, 0, 1.0), (0, 0, -1, 0, 1.0)])


@pytest.mark.parametrize("bad", [math.nan, math.inf])
def test_ssl_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        make_shastry_sutherland(J1=bad)


def test_ssl_geometry(ssl):
    assert np.linalg.norm(ssl.t1) == pytest.approx(np.linalg.norm(ssl.t2), abs=1e-15)
    assert ssl.n_basis == 4
    d = ssl.bond_classes
    assert d["J1"] < d["J1p"] < d["J2"] < d["J2p"]
    assert d["J1"] == pytest.approx(1.0, abs=1e-6)
    by_amp = {}
    for b in ssl.bonds:
        by_amp.setdefault(b.amplitude, 0)
        by_amp[b.amplitude] += 1
    # directed bond counts per class: 2, 2, and 8 + 8 sharing amplitude 0.3
    assert by_amp == {1.0: 2, 0.5: 2, 0.3: 16}


def test_ssl_class_order_permutes_amplitudes():
    lat = make_shastry_sutherland(1.0, 2.0, 3.0, 4.0, class_order=("J2", "J1", "J1p", "J2p"))
    dist = {b.amplitude: (b.basis_from, b.basis_to, b.cell_displacement) for b in lat.bonds}
    # shortest class now carries J2
    shortest = distance_classes(lat, 1)[0][1]
    for b_from, b_to, n, m in shortest:
        match = [b for b in lat.bonds if b.key == (b_from, b_to, n, m)]
        assert match[0].amplitude == 3.0
    assert set(dist) == {1.0, 2.0, 3.0, 4.0}


def test_config_builtin_and_custom():
    assert lattice_from_config({"name": "kagome"}).n_basis == 3
    ssl = lattice_from_config({"name": "shastry-sutherland", "J1": 2.0})
    assert {b.amplitude for b in ssl.bonds} == {2.0, 0.0}
    custom = lattice_from_config({"t1": [1, 0], "t2": [0, 1], "basis": [[0, 0]], "bonds": [[0, 0, 1, 0, 0.5]]})
    assert len(custom.bonds) == 2
    with pytest.raises(ValueError):
        lattice_from_config({"name": "honeycomb"})


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_reduction_is_idempotent(x, y):
    t1, t2 = (1.0, 0.0), (0.3, 1.1)
    frac = np.linalg.solve(np.array([t1, t2]).T, [x, y])
    assume(np.any(np.abs(frac - np.round(frac)) > 1e-6))
    lat = Lattice.create("p", t1, t2, [(0.0, 0.0), (x, y)])
    frac = lat.fractional(lat.basis_array)
    assert np.all(frac >= 0) and np.all(frac < 1)
    again = Lattice.create("p", lat.t1, lat.t2, lat.basis)
    np.testing.assert_allclose(again.basis, lat.basis, rtol=0, atol=1e-14)
