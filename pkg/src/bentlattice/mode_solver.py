"""Lowest guided mode of a rectangular waveguide in the Marcatili approximation.

The transverse problem separates into two symmetric slab problems, one per
axis. Each slab has a cosine profile inside the core and a decaying
exponential outside. All quantities here are SI (metres, 1/m, rad/s).
"""
from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy import constants as _sc

from .errors import ConvergenceError, NoGuidedModeError

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "WaveguideSpec",
    "ModeSolution",
    "transverse_wavenumber",
    "solve_mode",
    "normalize_power",
    "carried_power",
    "profile_1d",
    "field_at",
]

# 'continuity': tan(k*a/2) = gamma/k, forced by C1 matching of the cosine/exponential profile.
# 'printed':    k*a = arctan(gamma/k), kept for comparison only.
MATCHING_FORMS = ("continuity", "printed")


@dataclass(frozen=True)
class PhysicalConstants:
    epsilon_0: float = _sc.epsilon_0
    mu_0: float = _sc.mu_0
    c: float = _sc.c


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class WaveguideSpec:
    """Geometry and index of one rectangular waveguide (SI units).

    The core index follows from the substrate index and the index
    modification as ``n_s / sqrt(1 - 2*delta_n)``.
    """

    width: float
    height: float
    n_substrate: float
    delta_n: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("waveguide extents must be positive")
        if self.width < self.height:
            raise ValueError("width must be >= height (major axis along x)")
        if not self.n_substrate > 0:
            raise ValueError("substrate index must be positive")
        if not 0 <= self.delta_n < 0.5:
            raise ValueError("delta_n must lie in [0, 1/2)")

    @classmethod
    def from_microns(cls, width_um, height_um, n_substrate, delta_n):
        return cls(width_um * 1e-6, height_um * 1e-6, n_substrate, delta_n)

    @property
    def core_index(self):
        return self.n_substrate / math.sqrt(1.0 - 2.0 * self.delta_n)

    @property
    def area(self):
        return self.width * self.height

    def scaled(self, factor):
        """Copy with both extents multiplied by ``factor``."""
        return replace(self, width=self.width * factor, height=self.height * factor)

    def with_delta_n(self, delta_n):
        return replace(self, delta_n=delta_n)


@dataclass(frozen=True)
class ModeSolution:
    """Lowest (E11) mode of one waveguide.

    ``amplitude`` is the peak of the transverse electric field in V/m that
    makes the mode carry 1 W; it is ``None`` for an unnormalized solution.
    """

    spec: WaveguideSpec
    wavelength: float
    kx: float
    ky: float
    gamma_x: float
    gamma_y: float
    beta: float
    k: float
    omega: float
    amplitude: float | None = None
    matching: str = "continuity"
    constants: PhysicalConstants = field(default=CONSTANTS, repr=False)

    @property
    def normalized(self):
        return self.amplitude is not None

    @property
    def index_contrast(self):
        """k^2 (n_g^2 - n_s^2), the squared slab 'V' per unit length."""
        return self.k**2 * (self.spec.core_index**2 - self.spec.n_substrate**2)


def _matching_factor(matching):
    if matching == "continuity":
        return 0.5
    if matching == "printed":
        return 1.0
    raise ValueError(f"unknown matching form {matching!r}; expected one of {MATCHING_FORMS}")


def transverse_wavenumber(extent, k, n_core, n_sub, matching="continuity", rtol=1e-12):
    """Smallest positive transverse wavenumber of the symmetric slab mode.

    Solves ``tan(k_t * extent * f) = gamma_t / k_t`` with
    ``gamma_t = sqrt(k^2 (n_core^2 - n_sub^2) - k_t^2)``; ``f`` is 1/2 for the
    derivative-continuity form and 1 for the printed arctan form.

    Bisection on the bracket ``(0, min(pi/(2 f extent), V))`` followed by two
    Newton polish steps.

    Returns:
        (k_t, gamma_t) in 1/m.
    """
    if not (extent > 0 and k > 0):
        raise ValueError("extent and k must be positive")
    v2 = k * k * (n_core * n_core - n_sub * n_sub)
    if not v2 > 0:
        raise NoGuidedModeError("no index contrast between core and substrate")
    f = _matching_factor(matching)
    a = extent * f
    v = math.sqrt(v2)

    # q sin(qa) - gamma cos(qa): tan form without its pole.
    def g(q):
        gam = math.sqrt(max(v2 - q * q, 0.0))
        return q * math.sin(q * a) - gam * math.cos(q * a)

    def dg(q):
        gam = math.sqrt(max(v2 - q * q, 0.0))
        s, c = math.sin(q * a), math.cos(q * a)
        return s + q * a * c + (q / gam) * c + gam * a * s

    lo, hi = 0.0, min(math.pi / (2.0 * a), v)
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo < 0 < g_hi):
        raise ConvergenceError("matching function does not change sign on the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0:
            lo = hi = mid
            break
        if g_mid < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    else:
        raise ConvergenceError("bisection did not converge")
    q = 0.5 * (lo + hi)
    for _ in range(2):
        d = dg(q)
        if d == 0 or not math.isfinite(d):
            break
        q_new = q - g(q) / d
        if 0 < q_new < v:
            q = q_new
    gam = math.sqrt(v2 - q * q)
    if not (q > 0 and gam > 0):
        raise ConvergenceError("transverse root left the guided bracket")
    return q, gam


def normalize_power(mode):
    """Field amplitude (V/m) for which the mode carries 1 W.

    Uses the closed-form 1D integrals of the squared profiles, so the
    power ``beta/(2 omega mu_0) * A^2 * Ix * Iy`` equals one.
    """
    ix = _profile_norm(mode.kx, mode.gamma_x, mode.spec.width)
    iy = _profile_norm(mode.ky, mode.gamma_y, mode.spec.height)
    return math.sqrt(2.0 * mode.omega * mode.constants.mu_0 / (mode.beta * ix * iy))


def carried_power(mode, amplitude=None):
    """Power (W) carried along z for a given field amplitude."""
    if amplitude is None:
        amplitude = mode.amplitude if mode.normalized else 1.0
    ix = _profile_norm(mode.kx, mode.gamma_x, mode.spec.width)
    iy = _profile_norm(mode.ky, mode.gamma_y, mode.spec.height)
    return mode.beta / (2.0 * mode.omega * mode.constants.mu_0) * amplitude**2 * ix * iy


def _profile_norm(kt, gamma, extent):
    # integral of the squared 1D profile over the real line
    h = 0.5 * extent
    return h + math.sin(kt * extent) / (2.0 * kt) + math.cos(kt * h) ** 2 / gamma


def solve_mode(spec, wavelength, matching="continuity", normalize=True, constants=CONSTANTS):
    """Solve the lowest guided mode of ``spec`` at vacuum ``wavelength`` (m)."""
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    k = 2.0 * math.pi / wavelength
    omega = constants.c * k
    ng, ns = spec.core_index, spec.n_substrate
    kx, gx = transverse_wavenumber(spec.width, k, ng, ns, matching)
    ky, gy = transverse_wavenumber(spec.height, k, ng, ns, matching)
    beta2 = k * k * ng * ng - kx * kx - ky * ky
    if not beta2 > 0:
        raise NoGuidedModeError("mode is cut off (beta^2 <= 0)")
    mode = ModeSolution(
        spec=spec,
        wavelength=wavelength,
        kx=kx,
        ky=ky,
        gamma_x=gx,
        gamma_y=gy,
        beta=math.sqrt(beta2),
        k=k,
        omega=omega,
        matching=matching,
        constants=constants,
    )
    if normalize:
        mode = replace(mode, amplitude=normalize_power(mode))
    return mode


def profile_1d(t, kt, gamma, extent):
    """Even slab profile: cos inside ``|t| <= extent/2``, matched exponential outside."""
    t = np.abs(np.asarray(t, dtype=float))
    h = 0.5 * extent
    inside = np.cos(kt * np.minimum(t, h))
    outside = math.cos(kt * h) * np.exp(-gamma * np.maximum(t - h, 0.0))
    return np.where(t <= h, inside, outside)


def field_at(mode, x, y):
    """Transverse electric field E_x (V/m) at ``(x, y)`` relative to the core centre.

    Broadcasts over array inputs. Unnormalized modes use unit amplitude.
    """
    amp = mode.amplitude if mode.normalized else 1.0
    fx = profile_1d(x, mode.kx, mode.gamma_x, mode.spec.width)
    fy = profile_1d(y, mode.ky, mode.gamma_y, mode.spec.height)
    return amp * fx * fy
