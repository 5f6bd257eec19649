"""Bent-chain geometry, coupling engineering and the all-pairs coupling matrix.

Lattice-level quantities use laboratory units: positions and separations in
micrometres, device length in centimetres, couplings and propagation
constants in 1/cm. Conversion to SI happens only at calls into
:mod:`bentlattice.mode_solver` and :mod:`bentlattice.coupling`.
"""
from dataclasses import dataclass
import json
import math

import numpy as np
from scipy.optimize import brentq

from .coupling import PairGeometry, coupling_analytic, fold_angle
from .errors import UnreachableTargetError
from .mode_solver import WaveguideSpec, solve_mode

__all__ = [
    "pst_profile",
    "solve_separation",
    "LatticeLayout",
    "LatticeHamiltonian",
    "build_layout",
    "coupling_matrix",
    "relative_coupling_map",
    "beyond_nn_ratio",
]

UM = 1e-6
PER_CM = 1e-2  # 1/m -> 1/cm


def pst_profile(n_sites, length):
    """Nearest-neighbour couplings (1/cm) for perfect transfer over ``length`` cm.

    Link ``j`` (between sites j and j+1, 1-based) gets
    ``pi/(2L) * sqrt((N - j) * j)``.
    """
    if n_sites < 2:
        raise ValueError("need at least two sites")
    if not length > 0:
        raise ValueError("length must be positive")
    j = np.arange(1, n_sites)
    return math.pi / (2.0 * length) * np.sqrt((n_sites - j) * j)


def _pair_coupling_cm(mode_m, mode_l, dx_um, dy_um):
    geom = PairGeometry.from_offset(dx_um * UM, dy_um * UM)
    j = coupling_analytic(mode_m, mode_l, geom)
    if mode_m is not mode_l and mode_m != mode_l:
        j = 0.5 * (j + coupling_analytic(mode_l, mode_m, geom))
    return j * PER_CM


def solve_separation(target, theta, mode, r_floor=8.0, r_ceiling=100.0, rtol=1e-12):
    """Centre separation (um) at which two identical guides couple with ``target`` (1/cm).

    The coupling decays monotonically on ``[r_floor, r_ceiling]``; the root
    of ``ln J(r) - ln target`` is bracketed there.
    """
    if not target > 0:
        raise UnreachableTargetError("target coupling must be positive")
    theta = fold_angle(theta)
    c, s = math.cos(theta), math.sin(theta)

    def log_mismatch(r):
        return math.log(_pair_coupling_cm(mode, mode, r * c, r * s)) - math.log(target)

    f_lo, f_hi = log_mismatch(r_floor), log_mismatch(r_ceiling)
    if f_lo < 0:
        raise UnreachableTargetError(
            f"target {target:g}/cm exceeds the coupling at r_floor={r_floor} um"
        )
    if f_hi > 0:
        raise UnreachableTargetError(
            f"target {target:g}/cm is below the coupling at r_ceiling={r_ceiling} um"
        )
    return brentq(log_mismatch, r_floor, r_ceiling, xtol=1e-14, rtol=rtol)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LatticeLayout:
    """A bent chain of ``n_sites`` waveguides.

    ``corner`` is the 1-based label of the corner site. Sites 1..C lie on the
    first arm along -x, sites C..N on the second arm at ``bend_angle`` from
    the first arm's continuation.
    """

    n_sites: int
    corner: int
    bend_angle: float
    length: float
    wavelength: float
    positions: np.ndarray
    specs: tuple
    modes: tuple
    separations: np.ndarray

    def __post_init__(self):
        if self.n_sites < 3:
            raise ValueError("a bent chain needs at least three sites")
        if not 1 < self.corner < self.n_sites:
            raise ValueError("corner must be an interior site")
        if self.positions.shape != (self.n_sites, 2):
            raise ValueError("positions must have shape (N, 2)")
        if not (len(self.specs) == len(self.modes) == self.n_sites):
            raise ValueError("one spec and one mode per site required")

    @property
    def corner_index(self):
        """0-based array index of the corner site."""
        return self.corner - 1

    @property
    def betas(self):
        """Propagation constants per site (1/cm)."""
        return np.array([m.beta * PER_CM for m in self.modes])

    @property
    def beta_ref(self):
        """Bulk propagation constant (1/cm), taken from the first site."""
        return self.modes[0].beta * PER_CM

    @property
    def targets(self):
        return pst_profile(self.n_sites, self.length)

    def to_dict(self):
        return {
            "n_sites": self.n_sites,
            "corner": self.corner,
            "bend_angle_rad": self.bend_angle,
            "length_cm": self.length,
            "wavelength_um": self.wavelength / UM,
            "positions_um": [[float(x), float(y)] for x, y in self.positions],
            "sites": [
                {
                    "delta_n": s.delta_n,
                    "area_um2": s.area / UM**2,
                    "width_um": s.width / UM,
                    "height_um": s.height / UM,
                    "n_substrate": s.n_substrate,
                }
                for s in self.specs
            ],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        wavelength = d["wavelength_um"] * UM
        specs = tuple(
            WaveguideSpec.from_microns(s["width_um"], s["height_um"], s["n_substrate"], s["delta_n"])
            for s in d["sites"]
        )
        cache = {}
        modes = []
        for s in specs:
            if s not in cache:
                cache[s] = solve_mode(s, wavelength)
            modes.append(cache[s])
        pos = np.asarray(d["positions_um"], dtype=float)
        return cls(
            n_sites=int(d["n_sites"]),
            corner=int(d["corner"]),
            bend_angle=float(d["bend_angle_rad"]),
            length=float(d["length_cm"]),
            wavelength=wavelength,
            positions=_frozen(pos),
            specs=specs,
            modes=tuple(modes),
            separations=_frozen(np.linalg.norm(np.diff(pos, axis=0), axis=1)),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def build_layout(n_sites, corner, bend_angle, length, spec, wavelength, r_floor=8.0, r_ceiling=100.0):
    """Place the chain so every nearest-neighbour coupling hits the PST profile.

    Args:
        n_sites: number of waveguides N.
        corner: 1-based corner label C, with 1 < C < N.
        bend_angle: radians; 0 is the straight chain.
        length: device length (cm).
        spec: waveguide spec shared by all sites.
        wavelength: vacuum wavelength (m).
    """
    if not 1 < corner < n_sites:
        raise ValueError("corner must be an interior site")
    mode = solve_mode(spec, wavelength)
    targets = pst_profile(n_sites, length)
    arm2 = np.array([math.cos(bend_angle), math.sin(bend_angle)])
    c = corner - 1
    pos = np.zeros((n_sites, 2))
    seps = np.zeros(n_sites - 1)
    for i in range(c - 1, -1, -1):
        seps[i] = solve_separation(targets[i], 0.0, mode, r_floor, r_ceiling)
        pos[i] = pos[i + 1] + seps[i] * np.array([-1.0, 0.0])
    for i in range(c, n_sites - 1):
        seps[i] = solve_separation(targets[i], bend_angle, mode, r_floor, r_ceiling)
        pos[i + 1] = pos[i] + seps[i] * arm2
    return LatticeLayout(
        n_sites=n_sites,
        corner=corner,
        bend_angle=bend_angle,
        length=length,
        wavelength=wavelength,
        positions=_frozen(pos),
        specs=(spec,) * n_sites,
        modes=(mode,) * n_sites,
        separations=_frozen(seps),
    )


@dataclass(frozen=True, eq=False)
class LatticeHamiltonian:
    """Real symmetric coupling matrix (1/cm) with diagonal detunings."""

    matrix: np.ndarray
    corner: int

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        scale = max(np.abs(m).max(), 1e-300)
        if np.abs(m - m.conj().T).max() > 1e-12 * scale:
            raise ValueError("matrix is not Hermitian")

    @property
    def n_sites(self):
        return self.matrix.shape[0]

    def with_detuning(self, detuning):
        """Copy with ``detuning`` (1/cm) added to the corner diagonal element."""
        m = np.array(self.matrix)
        m[self.corner - 1, self.corner - 1] += detuning
        return LatticeHamiltonian(_frozen(m), self.corner)

    def nearest_neighbour(self):
        return np.diag(self.matrix, 1).copy()


def coupling_matrix(layout, detuning=0.0):
    """All-pairs coupling matrix of ``layout`` (1/cm).

    Off-diagonals are the overlap couplings for every pair at its actual
    distance and folded angle. The diagonal holds ``beta_j - beta_ref`` plus
    ``detuning`` on the corner site.
    """
    n = layout.n_sites
    h = np.zeros((n, n))
    pos = layout.positions
    for m in range(n):
        for l in range(m + 1, n):
            dx, dy = pos[m] - pos[l]
            h[m, l] = h[l, m] = _pair_coupling_cm(layout.modes[m], layout.modes[l], dx, dy)
    h[np.diag_indices(n)] = layout.betas - layout.beta_ref
    h[layout.corner - 1, layout.corner - 1] += detuning
    return LatticeHamiltonian(_frozen(h), layout.corner)


def relative_coupling_map(hamiltonian):
    """Off-diagonal magnitudes divided by their maximum; zero diagonal."""
    m = np.abs(np.asarray(getattr(hamiltonian, "matrix", hamiltonian), dtype=complex))
    m = np.array(m.real)
    np.fill_diagonal(m, 0.0)
    peak = m.max()
    if not peak > 0:
        raise ValueError("matrix has no nonzero off-diagonal element")
    return m / peak


def beyond_nn_ratio(hamiltonian):
    """Largest beyond-nearest-neighbour coupling over the smallest nearest-neighbour one."""
    m = np.abs(np.asarray(getattr(hamiltonian, "matrix", hamiltonian)))
    n = m.shape[0]
    far = max(m[i, j] for i in range(n) for j in range(i + 2, n)) if n > 2 else 0.0
    return far / np.diag(m, 1).min()
