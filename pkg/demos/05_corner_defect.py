"""
Recovering transfer with a corner defect
========================================

Detune the corner guide's propagation constant to restore an evenly spaced
spectrum, then translate the detuning into a change of index step or of
cross-section that a writing process could realize.
"""
import math

from bentlattice import (
    WaveguideSpec,
    build_layout,
    coupling_matrix,
    optimize_detuning,
    spectrum_spacings,
)

spec = WaveguideSpec.from_microns(6.0, 2.0, 1.444, 1e-3)

# %%
for n in (16, 18, 19, 20):
    lay = build_layout(9, 5, n * math.pi / 32, 10.0, spec, 0.8e-6)
    res = optimize_detuning(lay)
    h = coupling_matrix(lay)
    before = spectrum_spacings(h).rms_deviation
    after = spectrum_spacings(h.with_detuning(res.detuning)).rms_deviation
    print(f"{n} pi/32: detuning {res.detuning:+.4f} 1/cm ({res.ratio:.2f} G), "
          f"loss {100 * res.loss_before:.2f} % -> {100 * res.loss_after:.2f} %")
    print(f"         index change {res.index_change:.2f} %, area change {res.size_change:.2f} %, "
          f"spacing rms {before:.4f} -> {after:.4f} 1/cm")
