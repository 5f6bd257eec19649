"""
Guided modes of a rectangular channel waveguide
===============================================

Solve the fundamental mode of a thin 6 x 2 um guide and a square 6 x 6 um
guide in fused silica at 800 nm, then look at how the field decays outside
the core along each axis.
"""
import numpy as np

from bentlattice import WaveguideSpec, field_at, solve_mode

# %%
# Two guides with the same index step, differing only in height
thin = WaveguideSpec.from_microns(6.0, 2.0, n_substrate=1.444, delta_n=1e-3)
square = WaveguideSpec.from_microns(6.0, 6.0, n_substrate=1.444, delta_n=1e-3)
wl = 0.8e-6

for name, spec in [("6x2", thin), ("6x6", square)]:
    m = solve_mode(spec, wl)
    print(f"{name}: beta = {m.beta * 1e-2:.5e} 1/cm, k n_s = {m.k * spec.n_substrate * 1e-2:.5e} 1/cm")
    print(f"     decay gamma_x = {m.gamma_x * 1e-6:.4f} /um, gamma_y = {m.gamma_y * 1e-6:.4f} /um")

# %%
# The thin guide confines less along y, so its tail reaches further vertically.
m = solve_mode(thin, wl)
d = np.array([5.0, 10.0, 15.0]) * 1e-6
along_x = field_at(m, thin.width / 2 + d, 0.0)
along_y = field_at(m, 0.0, thin.height / 2 + d)
for di, ex, ey in zip(d * 1e6, along_x, along_y):
    print(f"{di:4.0f} um outside the core: E(x) = {ex:.3e}, E(y) = {ey:.3e} V/m")
