import math

import numpy as np
import pytest

from bentlattice import (
    LatticeLayout,
    UnreachableTargetError,
    beyond_nn_ratio,
    build_layout,
    coupling_matrix,
    pst_profile,
    relative_coupling_map,
    solve_separation,
)
from bentlattice.lattice import LatticeHamiltonian

from .conftest import pi32


def test_pst_profile_values():
    g = pst_profile(9, 10.0)
    assert g[0] == pytest.approx(math.pi / 20 * math.sqrt(8))
    assert g[0] == pytest.approx(0.4443, abs=1e-4)
    assert g[3] == pytest.approx(0.7025, abs=1e-4)
    np.testing.assert_allclose(g, g[::-1], rtol=1e-15)
    assert pst_profile(2, 3.0) == pytest.approx([math.pi / 6])
    with pytest.raises(ValueError):
        pst_profile(1, 10.0)


def test_solve_separation_round_trip(asym_mode):
    from bentlattice.lattice import _pair_coupling_cm

    for target in (0.3, 0.4443, 0.7025):
        for theta in (0.0, 0.6, pi32(19)):
            r = solve_separation(target, theta, asym_mode)
            got = _pair_coupling_cm(asym_mode, asym_mode, r * math.cos(theta), r * math.sin(theta))
            assert got == pytest.approx(target, rel=1e-8)


def test_anisotropy_breaks_separation_symmetry(asym_mode):
    assert solve_separation(0.7, 0.0, asym_mode) != pytest.approx(solve_separation(0.7, pi32(16), asym_mode), rel=1e-3)


def test_unreachable_targets(asym_mode):
    with pytest.raises(UnreachableTargetError):
        solve_separation(1e3, 0.0, asym_mode)
    with pytest.raises(UnreachableTargetError):
        solve_separation(1e-30, 0.0, asym_mode)


def test_unbent_layout_is_collinear_and_mirror_symmetric(layouts):
    lay = layouts(0)
    np.testing.assert_allclose(lay.positions[:, 1], 0.0, atol=1e-12)
    np.testing.assert_allclose(lay.separations, lay.separations[::-1], rtol=1e-9)


@pytest.mark.parametrize("n", [0, 8, 16, 19, 20])
def test_layout_geometry(layouts, n):
    lay = layouts(n)
    steps = np.linalg.norm(np.diff(lay.positions, axis=0), axis=1)
    np.testing.assert_allclose(steps, lay.separations, rtol=1e-12)
    c = lay.corner_index
    np.testing.assert_allclose(lay.positions[c], 0.0)
    # first arm on the negative x axis, second arm along the bend direction
    assert np.all(lay.positions[:c, 1] == 0) and np.all(lay.positions[:c, 0] < 0)
    d = np.array([math.cos(lay.bend_angle), math.sin(lay.bend_angle)])
    arm2 = lay.positions[c + 1 :]
    cross = arm2[:, 0] * d[1] - arm2[:, 1] * d[0]
    np.testing.assert_allclose(cross, 0.0, atol=1e-9)


@pytest.mark.parametrize("n", [0, 16, 19, 20])
def test_engineered_nearest_neighbours(layouts, n):
    lay = layouts(n)
    h = coupling_matrix(lay)
    nn = h.nearest_neighbour()
    target = pst_profile(9, 10.0)
    assert np.max(np.abs(nn - target) / target) < 1e-8


def test_corner_neighbours_approach_with_angle(layouts):
    def gap(lay):
        return np.linalg.norm(lay.positions[3] - lay.positions[5])

    assert gap(layouts(20)) < gap(layouts(16))


def test_hamiltonian_properties(layouts):
    h = coupling_matrix(layouts(19))
    m = h.matrix
    np.testing.assert_array_equal(m, m.T)
    assert np.all(np.diag(m) == 0)
    assert np.all(m >= 0)
    d = h.with_detuning(-0.3).matrix
    assert d[4, 4] == pytest.approx(-0.3)
    assert np.count_nonzero(np.diag(d)) == 1
    with pytest.raises(ValueError):
        LatticeHamiltonian(np.array([[0.0, 1.0], [0.0, 0.0]]), 1)


def test_unbent_beyond_nn_small(layouts):
    m = coupling_matrix(layouts(0)).matrix
    far = max(m[i, j] for i in range(9) for j in range(i + 2, 9))
    assert far < 0.1 * np.diag(m, 1).max()


def test_critical_angle_structure(layouts):
    for n in (0, 8, 12, 16):
        assert beyond_nn_ratio(coupling_matrix(layouts(n))) < 0.15
    for n in (19, 20):
        assert beyond_nn_ratio(coupling_matrix(layouts(n))) > 0.3


def test_sharp_bend_next_nearest_comparable(layouts):
    m = coupling_matrix(layouts(20)).matrix
    c = 4
    assert m[c - 1, c + 1] > 0.3 * min(m[c, c - 1], m[c, c + 1])


def test_square_guides_resist_bends(layouts):
    m = coupling_matrix(layouts(20, "sym")).matrix
    c = 4
    assert m[c - 1, c + 1] <= min(m[c, c - 1], m[c, c + 1]) / 5


def test_relative_map(layouts):
    h = coupling_matrix(layouts(0))
    rel = relative_coupling_map(h)
    assert rel.max() == 1.0
    np.testing.assert_array_equal(rel, rel.T)
    assert np.all(np.diag(rel) == 0)
    g = pst_profile(9, 10.0)
    np.testing.assert_allclose(np.diag(rel, 1), g / g.max(), rtol=1e-8)
    assert np.argmax(np.diag(rel, 1)) in (3, 4)
    with pytest.raises(ValueError):
        relative_coupling_map(np.zeros((3, 3)))


def test_layout_json_round_trip(layouts):
    lay = layouts(19)
    text = lay.to_json()
    d = lay.to_dict()
    assert set(d) >= {"n_sites", "corner", "bend_angle_rad", "length_cm", "positions_um", "sites"}
    assert d["sites"][0]["delta_n"] == 1e-3
    assert d["sites"][0]["area_um2"] == pytest.approx(12.0)
    back = LatticeLayout.from_json(text)
    np.testing.assert_allclose(coupling_matrix(back).matrix, coupling_matrix(lay).matrix, rtol=1e-12)


def test_layout_validation(asym_spec):
    with pytest.raises(ValueError):
        build_layout(9, 1, 0.0, 10.0, asym_spec, 0.8e-6)
    with pytest.raises(ValueError):
        build_layout(9, 9, 0.0, 10.0, asym_spec, 0.8e-6)


def test_even_chain_and_other_corner(asym_spec):
    lay = build_layout(6, 3, pi32(12), 10.0, asym_spec, 0.8e-6)
    nn = coupling_matrix(lay).nearest_neighbour()
    np.testing.assert_allclose(nn, pst_profile(6, 10.0), rtol=1e-8)
