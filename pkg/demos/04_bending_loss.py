"""
Transfer loss around the bend
=============================

Inject light in the first guide and read how much arrives in the last one at
the device exit. The loss stays small up to a right angle and grows quickly
beyond it.
"""
import math

import numpy as np

from bentlattice import WaveguideSpec, build_layout, corner_power_trace, transfer_loss

spec = WaveguideSpec.from_microns(6.0, 2.0, 1.444, 1e-3)

# %%
for n in range(0, 22, 2):
    lay = build_layout(9, 5, n * math.pi / 32, 10.0, spec, 0.8e-6)
    print(f"{n:2d} pi/32  loss {100 * transfer_loss(lay).loss:6.2f} %")

# %%
# Power passing through the corner along the chain at 19 pi/32
lay = build_layout(9, 5, 19 * math.pi / 32, 10.0, spec, 0.8e-6)
trace = corner_power_trace(lay, 0.0, np.linspace(0, 10, 11))
for z, p in trace:
    print(f"z = {z:4.1f} cm  P_C = {p:.3f}")
