import math
import warnings

import numpy as np
import pytest

from bentlattice import (
    UnreachableTargetError,
    detuning_to_index_change,
    detuning_to_size_change,
    optimize_detuning,
    solve_mode,
    transfer_loss,
)
from bentlattice.defect_opt import NonUnimodalWarning, _scan_and_polish, corner_coupling

WL = 0.8e-6


@pytest.fixture(scope="module")
def results(layouts):
    return {n: optimize_detuning(layouts(n)) for n in (0, 18, 19, 20)}


def beta_cm(spec):
    return solve_mode(spec, WL, normalize=False).beta * 1e-2


def test_unbent_needs_no_defect(results):
    r = results[0]
    assert abs(r.detuning) < 0.02 * r.corner_coupling
    assert r.loss_after < 0.005


def test_detuning_grows_with_angle(results):
    d = [results[n].detuning for n in (18, 19, 20)]
    assert all(x < 0 for x in d)
    assert abs(d[0]) < abs(d[1]) < abs(d[2])


@pytest.mark.parametrize("n", [0, 18, 19, 20])
def test_optimization_never_hurts(results, layouts, n):
    r = results[n]
    assert r.loss_after <= r.loss_before
    assert r.loss_after <= 0.10
    assert r.loss_before == pytest.approx(transfer_loss(layouts(n)).loss, abs=1e-12)
    assert r.loss_after == pytest.approx(transfer_loss(layouts(n), r.detuning).loss, abs=1e-12)


def test_optimum_is_local_minimum(results, layouts):
    r = results[19]
    for step in (-1e-3, 1e-3):
        assert transfer_loss(layouts(19), r.detuning + step).loss >= r.loss_after - 1e-12


def test_corner_coupling(layouts, results):
    assert corner_coupling(layouts(20)) == pytest.approx(math.pi / 20 * math.sqrt(4 * 5), rel=1e-12)
    assert results[20].ratio == pytest.approx(abs(results[20].detuning) / results[20].corner_coupling)


def test_fabrication_bands(results):
    r = results[20]
    assert abs(r.index_change - 5.15) <= 2.0
    assert abs(r.size_change - 2.50) <= 1.5
    assert abs(results[18].size_change - 0.25) <= 0.3
    assert 0 < results[18].index_change < results[19].index_change < r.index_change


def test_fabrication_at_reported_detuning(asym_spec):
    # reference optimum quoted for 20 pi/32
    d = -1.0733
    assert abs(detuning_to_index_change(asym_spec, WL, d) - 5.15) <= 2.0
    assert abs(detuning_to_size_change(asym_spec, WL, d) - 2.50) <= 1.5


def test_zero_detuning_maps_to_zero(asym_spec):
    assert detuning_to_index_change(asym_spec, WL, 0.0) == 0.0
    assert detuning_to_size_change(asym_spec, WL, 0.0) == 0.0


@pytest.mark.parametrize("d", [-0.9647, -0.3949, -0.1])
def test_fabrication_round_trip(asym_spec, d):
    b0 = beta_cm(asym_spec)
    idx = detuning_to_index_change(asym_spec, WL, d)
    dn_c = asym_spec.delta_n * (1 - idx / 100)
    assert beta_cm(asym_spec.with_delta_n(dn_c)) - b0 == pytest.approx(d, rel=1e-3)
    size = detuning_to_size_change(asym_spec, WL, d)
    s = math.sqrt(1 - size / 100)
    assert beta_cm(asym_spec.scaled(s)) - b0 == pytest.approx(d, rel=1e-3)


def test_square_guide_round_trip(sym_spec):
    b0 = beta_cm(sym_spec)
    idx = detuning_to_index_change(sym_spec, WL, -0.5)
    dn_c = sym_spec.delta_n * (1 - idx / 100)
    assert beta_cm(sym_spec.with_delta_n(dn_c)) - b0 == pytest.approx(-0.5, rel=1e-3)


def test_unreachable_detuning(asym_spec):
    with pytest.raises(UnreachableTargetError):
        detuning_to_index_change(asym_spec, WL, -1e4)
    with pytest.raises(UnreachableTargetError):
        detuning_to_size_change(asym_spec, WL, 1e4)


def test_bad_bracket(layouts):
    with pytest.raises(ValueError):
        optimize_detuning(layouts(0), bracket=(1.0, -1.0))


def test_multimodal_landscape_warns():
    def loss(d):
        return min((d + 1) ** 2, (d - 1) ** 2 + 0.05)

    with pytest.warns(NonUnimodalWarning):
        x, v = _scan_and_polish(loss, -3, 3, 64, 1e-8)
    assert x == pytest.approx(-1, abs=1e-6)
    assert v == pytest.approx(0, abs=1e-10)


def test_unimodal_landscape_is_quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("error", NonUnimodalWarning)
        x, _ = _scan_and_polish(lambda d: (d - 0.3) ** 2, -2, 2, 64, 1e-9)
    assert x == pytest.approx(0.3, abs=1e-7)


def test_bracket_expands_at_edge(layouts):
    r = optimize_detuning(layouts(20), bracket=(-0.5, 0.5), fabrication=False)
    assert r.detuning < -0.5
    assert math.isnan(r.index_change)
