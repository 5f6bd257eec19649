"""Corner-defect optimization and its translation to fabrication parameters."""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.signal import find_peaks

from .errors import BentLatticeError, UnreachableTargetError
from .lattice import coupling_matrix, pst_profile
from .mode_solver import solve_mode
from .propagation import transfer_loss

__all__ = [
    "DefectResult",
    "NonUnimodalWarning",
    "optimize_detuning",
    "detuning_to_index_change",
    "detuning_to_size_change",
    "corner_coupling",
]


class NonUnimodalWarning(UserWarning):
    """The loss landscape has more than one significant local minimum."""


@dataclass(frozen=True)
class DefectResult:
    bend_angle: float
    detuning: float
    loss_before: float
    loss_after: float
    corner_coupling: float
    index_change: float
    size_change: float

    @property
    def ratio(self):
        """|detuning| relative to the corner's target coupling."""
        return abs(self.detuning) / self.corner_coupling


def corner_coupling(layout):
    """Target coupling (1/cm) of the link between the corner and its predecessor."""
    return float(pst_profile(layout.n_sites, layout.length)[layout.corner - 2])


def _scan_and_polish(loss, lo, hi, n_scan, xatol):
    grid = np.linspace(lo, hi, n_scan)
    values = np.array([loss(d) for d in grid])
    minima, _ = find_peaks(-values, prominence=1e-3)
    if len(minima) > 1:
        warnings.warn(
            f"{len(minima)} local minima in the detuning scan; polishing the global one",
            NonUnimodalWarning,
            stacklevel=3,
        )
    i = int(np.argmin(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n_scan - 1)]
    res = minimize_scalar(loss, bounds=(a, b), method="bounded", options={"xatol": xatol})
    best = (res.x, res.fun) if res.fun <= values[i] else (grid[i], values[i])
    return best


def optimize_detuning(layout, bracket=None, xatol=1e-6, n_scan=64, fabrication=True):
    """Corner detuning minimizing the transfer loss of ``layout``.

    A 64-point scan over the bracket locates the basin, then bounded
    golden-section/parabolic search polishes it. If the optimum sits within
    1% of a bracket edge the bracket is doubled once.

    Args:
        layout: engineered lattice.
        bracket: (lo, hi) in 1/cm; defaults to three corner couplings either side.
        xatol: absolute tolerance on the detuning (1/cm).
        fabrication: also map the optimum to index and size changes.
    """
    g = corner_coupling(layout)
    h0 = coupling_matrix(layout)
    lo, hi = bracket if bracket is not None else (-3.0 * g, 3.0 * g)
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")

    def loss(d):
        return transfer_loss(layout, d, hamiltonian=h0).loss

    best, val = _scan_and_polish(loss, lo, hi, n_scan, xatol)
    width = hi - lo
    if min(best - lo, hi - best) < 0.01 * width:
        mid = 0.5 * (lo + hi)
        lo, hi = mid - width, mid + width
        best, val = _scan_and_polish(loss, lo, hi, n_scan, xatol)
    before = loss(0.0)
    if before <= val:
        best, val = 0.0, before
    spec, wl = layout.specs[layout.corner - 1], layout.wavelength
    idx = size = math.nan
    if fabrication:
        idx = detuning_to_index_change(spec, wl, best)
        size = detuning_to_size_change(spec, wl, best)
    return DefectResult(layout.bend_angle, float(best), before, float(val), g, idx, size)


def _beta_cm(spec, wavelength):
    return solve_mode(spec, wavelength, normalize=False).beta * 1e-2


def _solve_monotone(f, lo, hi, what):
    # f increases on [lo, hi]
    try:
        f_lo, f_hi = f(lo), f(hi)
    except BentLatticeError as exc:
        raise UnreachableTargetError(f"mode solve failed while bracketing the {what}") from exc
    if f_lo > 0 or f_hi < 0:
        raise UnreachableTargetError(f"detuning not achievable by {what} in the allowed range")
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-13)


def detuning_to_index_change(spec, wavelength, detuning):
    """Relative index change (%) of the corner guide realizing ``detuning`` (1/cm).

    Solves for the corner's ``delta_n_C`` in (0, 2 delta_n) such that its
    propagation constant differs from the bulk by ``detuning``, and returns
    ``100 (delta_n - delta_n_C) / delta_n``.
    """
    if detuning == 0:
        return 0.0
    beta0 = _beta_cm(spec, wavelength)
    dn = spec.delta_n

    def f(d):
        return _beta_cm(spec.with_delta_n(d), wavelength) - beta0 - detuning

    hi = min(2.0 * dn, 0.4999) * (1 - 1e-12)
    # thin guides: beta(delta_n) has a minimum below the bulk value; stay on the
    # increasing branch that contains the bulk guide
    turn = minimize_scalar(
        lambda d: _beta_cm(spec.with_delta_n(d), wavelength),
        bounds=(dn * 1e-6, dn),
        method="bounded",
        options={"xatol": dn * 1e-9},
    ).x
    dn_c = _solve_monotone(f, turn, hi, "index change")
    return 100.0 * (dn - dn_c) / dn


def detuning_to_size_change(spec, wavelength, detuning):
    """Relative cross-section change (%) realizing ``detuning`` by isotropic scaling.

    Both extents scale by ``s`` in (0.5, 1.5); returns ``100 (1 - s^2)``.
    """
    if detuning == 0:
        return 0.0
    beta0 = _beta_cm(spec, wavelength)

    def f(s):
        return _beta_cm(spec.scaled(s), wavelength) - beta0 - detuning

    s = _solve_monotone(f, 0.5, 1.5, "size change")
    return 100.0 * (1.0 - s * s)
