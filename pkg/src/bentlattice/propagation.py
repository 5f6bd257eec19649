"""Amplitude evolution along z and derived power/loss quantities.

Amplitudes obey ``dA/dz = -i H A`` with ``H`` the real symmetric coupling
matrix in 1/cm, so z is in cm. Diagonal entries are detunings in the frame
co-rotating with the bulk propagation constant.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import NonHermitianError
from .lattice import coupling_matrix
from .mode_solver import field_at

__all__ = [
    "TransferReport",
    "evolve",
    "evolve_ode",
    "propagator",
    "power_distribution",
    "transfer_loss",
    "corner_power_trace",
    "output_intensity_map",
    "IntensityMap",
]


def _as_matrix(h):
    m = np.asarray(getattr(h, "matrix", h))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitianError("generator must be a square matrix")
    scale = max(float(np.abs(m).max()), 1e-300)
    if np.abs(m - m.conj().T).max() > 1e-10 * scale:
        raise NonHermitianError("generator is not Hermitian")
    return m


def _basis(n, j=0):
    a = np.zeros(n, dtype=complex)
    a[j] = 1.0
    return a


def propagator(h, z):
    """Unitary ``exp(-i H z)`` from the eigendecomposition of ``H``."""
    m = _as_matrix(h)
    w, v = np.linalg.eigh(m)
    return (v * np.exp(-1j * w * z)) @ v.conj().T


def evolve(h, z, a0):
    """Amplitudes after propagating ``a0`` a distance ``z`` (cm)."""
    if z < 0:
        raise ValueError("z must be non-negative")
    return propagator(h, z) @ np.asarray(a0, dtype=complex)


def evolve_ode(h, z, a0, step=None):
    """Classical RK4 integration of ``dA/dz = -i H A``; oracle for :func:`evolve`.

    The default step is ``1e-3 / max|H|`` rounded so it divides ``z``.
    """
    if z < 0:
        raise ValueError("z must be non-negative")
    m = -1j * _as_matrix(h)
    a = np.array(a0, dtype=complex)
    if z == 0:
        return a
    if step is None:
        step = 1e-3 / max(float(np.abs(m).max()), 1e-300)
    n = max(1, int(math.ceil(z / step)))
    dz = z / n
    for _ in range(n):
        k1 = m @ a
        k2 = m @ (a + 0.5 * dz * k1)
        k3 = m @ (a + 0.5 * dz * k2)
        k4 = m @ (a + dz * k3)
        a = a + dz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return a


def power_distribution(a):
    return np.abs(np.asarray(a)) ** 2


@dataclass(frozen=True, eq=False)
class TransferReport:
    bend_angle: float
    detuning: float
    powers: np.ndarray
    optimized: bool = False

    @property
    def loss(self):
        return 1.0 - float(self.powers[-1])

    @property
    def target_power(self):
        return float(self.powers[-1])


def transfer_loss(layout, detuning=0.0, hamiltonian=None, optimized=False):
    """Inject into site 1, propagate to the exit and report ``1 - P_N``.

    ``hamiltonian`` may be passed to skip rebuilding the undetuned matrix; the
    detuning is then added to its corner element.
    """
    h = coupling_matrix(layout) if hamiltonian is None else hamiltonian
    h = h.with_detuning(detuning)
    a = evolve(h, layout.length, _basis(layout.n_sites))
    return TransferReport(layout.bend_angle, detuning, power_distribution(a), optimized)


def corner_power_trace(layout, detuning, z_grid, hamiltonian=None):
    """Corner-site power along z; array of shape (n, 2) with columns (z, P_C)."""
    z_grid = np.asarray(z_grid, dtype=float)
    if np.any(z_grid < 0) or np.any(z_grid > layout.length * (1 + 1e-12)):
        raise ValueError("z_grid must lie within [0, L]")
    h = coupling_matrix(layout) if hamiltonian is None else hamiltonian
    m = _as_matrix(h.with_detuning(detuning))
    w, v = np.linalg.eigh(m)
    c = layout.corner - 1
    # A_C(z) = sum_k V[c,k] exp(-i w_k z) conj(V[0,k])
    coef = v[c, :] * v[0, :].conj()
    amp = np.exp(-1j * np.outer(z_grid, w)) @ coef
    return np.column_stack([z_grid, np.abs(amp) ** 2])


@dataclass(frozen=True, eq=False)
class IntensityMap:
    """Intensity (W/cm^2) on a rectangular grid; ``x``/``y`` in um."""

    x: np.ndarray
    y: np.ndarray
    intensity: np.ndarray

    def integrated_power(self):
        """Total power (W) by trapezoidal quadrature."""
        dx_cm = 1e-4
        return float(np.trapezoid(np.trapezoid(self.intensity, self.y, axis=1), self.x)) * dx_cm**2

    def power_within(self, centre, radius):
        """Power (W) inside a disc of ``radius`` um around ``centre``."""
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        mask = (X - centre[0]) ** 2 + (Y - centre[1]) ** 2 <= radius**2
        masked = np.where(mask, self.intensity, 0.0)
        return float(np.trapezoid(np.trapezoid(masked, self.y, axis=1), self.x)) * 1e-8

    def to_rows(self):
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel(), self.intensity.ravel()])


def output_intensity_map(layout, amplitudes, step=0.1, margin=10.0):
    """Intensity of the superposed modal fields at the device exit.

    Args:
        layout: the lattice.
        amplitudes: complex modal amplitudes at z = L.
        step: grid spacing (um), at most 0.5.
        margin: extra border around the outermost sites (um).
    """
    if step > 0.5:
        raise ValueError("grid too coarse: step must be <= 0.5 um")
    amplitudes = np.asarray(amplitudes, dtype=complex)
    pos = layout.positions
    x = np.arange(pos[:, 0].min() - margin, pos[:, 0].max() + margin + 0.5 * step, step)
    y = np.arange(pos[:, 1].min() - margin, pos[:, 1].max() + margin + 0.5 * step, step)
    field = np.zeros((x.size, y.size), dtype=complex)
    um = 1e-6
    for j, mode in enumerate(layout.modes):
        if amplitudes[j] == 0:
            continue
        phase = np.exp(-1j * mode.beta * layout.length * 1e-2)
        fx = field_at(mode, (x - pos[j, 0]) * um, 0.0)
        fy = field_at(mode, 0.0, (y - pos[j, 1]) * um) / mode.amplitude
        field += amplitudes[j] * phase * np.outer(fx, fy)
    mode0 = layout.modes[0]
    w_m2 = mode0.beta / (2.0 * mode0.omega * mode0.constants.mu_0) * np.abs(field) ** 2
    return IntensityMap(x, y, w_m2 * 1e-4)
