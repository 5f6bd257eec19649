"""Evanescent coupling between two rectangular waveguides.

The coupling is the overlap of one mode with the index perturbation of the
other waveguide, weighted by the other mode:

    J_ml = (omega eps0 / 4) * integral over core l of E_m * (n_g^2 - n_s^2) * E_l

Both fields are separable products of even 1D profiles and the
perturbation is the indicator of a rectangle, so the integral factorizes
into two 1D overlaps with closed forms. Lengths are metres, couplings 1/m.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import NotNormalizedError
from .mode_solver import field_at

__all__ = [
    "fold_angle",
    "PairGeometry",
    "CouplingLaw",
    "overlap_1d",
    "coupling_analytic",
    "coupling_quadrature",
    "fit_exponential",
    "coupling_law",
    "anisotropy_scan",
    "DEFAULT_FIT_RANGE",
]

DEFAULT_FIT_RANGE = np.arange(15.0, 40.0 + 0.5, 1.0) * 1e-6


def fold_angle(theta):
    """Fold an angle into [0, pi/2]; couplings are even in both axes."""
    t = math.fmod(abs(theta), math.pi)
    return min(t, math.pi - t)


@dataclass(frozen=True)
class PairGeometry:
    """Centre-to-centre separation ``r`` (m) and folded pair angle ``theta``."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("separation must be positive")
        object.__setattr__(self, "theta", fold_angle(self.theta))

    @classmethod
    def from_offset(cls, dx, dy):
        return cls(math.hypot(dx, dy), math.atan2(dy, dx))

    @property
    def offset(self):
        return self.r * math.cos(self.theta), self.r * math.sin(self.theta)


@dataclass(frozen=True)
class CouplingLaw:
    """Exponential law ``J(r) = prefactor * exp(-decay * r)`` at one angle."""

    theta: float
    prefactor: float
    decay: float
    residual: float
    r_min: float
    r_max: float

    def __call__(self, r):
        return self.prefactor * np.exp(-self.decay * np.asarray(r))


def _int_cos(w, phi, u0, u1):
    # integral of cos(w u + phi) over [u0, u1], stable as w -> 0
    span = u1 - u0
    return span * math.cos(w * 0.5 * (u0 + u1) + phi) * np.sinc(w * span / (2.0 * math.pi))


def _int_cos_exp(kt, s, anchor, u0, u1):
    # integral of cos(kt u) * exp(s (u - anchor)) over [u0, u1]
    def prim(u):
        return math.exp(s * (u - anchor)) * (s * math.cos(kt * u) + kt * math.sin(kt * u))

    return (prim(u1) - prim(u0)) / (s * s + kt * kt)


def overlap_1d(d, k_m, g_m, a_m, k_l, g_l, a_l):
    """Integral over ``|u| <= a_l/2`` of ``f_m(u - d) * cos(k_l u)``.

    ``f_m`` is the even slab profile of extent ``a_m`` (wavenumber ``k_m``,
    decay ``g_m``) centred at ``d``.
    """
    h_m, h_l = 0.5 * a_m, 0.5 * a_l
    c_m = math.cos(k_m * h_m)
    lo, hi = -h_l, h_l
    left, right = d - h_m, d + h_m
    total = 0.0
    # left tail of f_m: c_m exp(g_m (u - left))
    u0, u1 = lo, min(hi, left)
    if u1 > u0:
        total += c_m * _int_cos_exp(k_l, g_m, left, u0, u1)
    # core of f_m: cos(k_m (u - d))
    u0, u1 = max(lo, left), min(hi, right)
    if u1 > u0:
        total += 0.5 * (
            _int_cos(k_l - k_m, k_m * d, u0, u1) + _int_cos(k_l + k_m, -k_m * d, u0, u1)
        )
    # right tail: c_m exp(-g_m (u - right))
    u0, u1 = max(lo, right), hi
    if u1 > u0:
        total += c_m * _int_cos_exp(k_l, -g_m, right, u0, u1)
    return total


def _check_pair(mode_m, mode_l):
    if not (mode_m.normalized and mode_l.normalized):
        raise NotNormalizedError("coupling requires power-normalized modes")
    if not math.isclose(mode_m.wavelength, mode_l.wavelength, rel_tol=1e-12):
        raise ValueError("modes solved at different wavelengths")


def _prefactor(mode_m, mode_l):
    spec_l = mode_l.spec
    dn2 = spec_l.core_index**2 - spec_l.n_substrate**2
    return mode_l.omega * mode_l.constants.epsilon_0 / 4.0 * dn2 * mode_m.amplitude * mode_l.amplitude


def coupling_analytic(mode_m, mode_l, geom):
    """Coupling J_ml (1/m) from the closed-form overlap integral.

    Waveguide ``m`` sits at offset ``geom.offset`` from waveguide ``l``; the
    integral runs over the core rectangle of ``l``.
    """
    _check_pair(mode_m, mode_l)
    dx, dy = geom.offset
    sm, sl = mode_m.spec, mode_l.spec
    ox = overlap_1d(dx, mode_m.kx, mode_m.gamma_x, sm.width, mode_l.kx, mode_l.gamma_x, sl.width)
    oy = overlap_1d(dy, mode_m.ky, mode_m.gamma_y, sm.height, mode_l.ky, mode_l.gamma_y, sl.height)
    return _prefactor(mode_m, mode_l) * ox * oy


def coupling_quadrature(mode_m, mode_l, geom, step=1e-8):
    """Same coupling by 2D trapezoidal quadrature over the core of ``l``.

    Independent of the separable closed forms; ``step`` is the grid spacing
    in metres (default 0.01 um).
    """
    _check_pair(mode_m, mode_l)
    dx, dy = geom.offset
    sl = mode_l.spec
    nx = int(math.ceil(sl.width / step)) + 1
    ny = int(math.ceil(sl.height / step)) + 1
    x = np.linspace(-0.5 * sl.width, 0.5 * sl.width, nx)
    y = np.linspace(-0.5 * sl.height, 0.5 * sl.height, ny)
    X, Y = np.meshgrid(x, y, indexing="ij")
    integrand = field_at(mode_m, X - dx, Y - dy) * field_at(mode_l, X, Y)
    # field_at already includes amplitudes
    spec_l = mode_l.spec
    dn2 = spec_l.core_index**2 - spec_l.n_substrate**2
    pref = mode_l.omega * mode_l.constants.epsilon_0 / 4.0 * dn2
    return pref * np.trapezoid(np.trapezoid(integrand, y, axis=1), x)


def fit_exponential(r, couplings, theta=0.0):
    """Least-squares fit of ``ln J = ln(mu) - xi r``.

    Args:
        r: separations (m), at least five.
        couplings: coupling values (1/m), all positive and finite.
        theta: angle the samples were taken at (stored only).
    """
    r = np.asarray(r, dtype=float)
    j = np.asarray(couplings, dtype=float)
    if r.shape != j.shape or r.size < 5:
        raise ValueError("need at least five (r, J) samples of matching shape")
    if not np.all(np.isfinite(j)) or np.any(j <= 0):
        raise ValueError("couplings must be positive and finite for a log fit")
    if j.max() / j.min() < 10.0:
        raise ValueError("samples must span at least a decade of coupling values")
    slope, intercept = np.polyfit(r, np.log(j), 1)
    resid = np.log(j) - (intercept + slope * r)
    return CouplingLaw(
        theta=fold_angle(theta),
        prefactor=math.exp(intercept),
        decay=-slope,
        residual=float(np.sqrt(np.mean(resid**2))),
        r_min=float(r.min()),
        r_max=float(r.max()),
    )


def coupling_law(mode, theta, r_samples=None):
    """Fit the exponential law for two identical waveguides at angle ``theta``."""
    r = DEFAULT_FIT_RANGE if r_samples is None else np.asarray(r_samples, dtype=float)
    j = [coupling_analytic(mode, mode, PairGeometry(ri, theta)) for ri in r]
    return fit_exponential(r, j, theta)


def anisotropy_scan(mode, r, thetas):
    """Couplings (1/m) of two identical waveguides at separation ``r`` over ``thetas``.

    Returns an array of shape (n, 2) with columns (theta, J).
    """
    if not r > 0:
        raise ValueError("separation must be positive")
    thetas = np.asarray(thetas, dtype=float)
    j = [coupling_analytic(mode, mode, PairGeometry(r, t)) for t in thetas]
    return np.column_stack([thetas, j])
