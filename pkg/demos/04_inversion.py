"""
From reflection coefficient to potential
========================================

Solve the Marchenko equation for every x on a grid and differentiate the
diagonal of its kernel.  The reflection table comes straight from the
forward solver here; see 05 for the full phaseless chain.
"""
import numpy as np

from phaseless1d import forward, inversion, potential

v = potential.square_barrier(1.0, 1.0)
ks = np.linspace(0.05, 40, 2000)
table = inversion.ReflectionTable.from_sweep(forward.scatter_sweep(v, ks))

x = np.arange(-1.0, 3.0 + 1e-9, 0.01)
rec = inversion.reconstruct_potential(table, x)

for xx in (-0.5, 0.25, 0.5, 0.75, 1.5, 2.5):
    j = int(np.argmin(abs(x - xx)))
    print(f"v({xx:5.2f}) = {potential.evaluate(v, xx):.1f}   vhat = {rec.v[j]:+.4f}")
print(f"\nrelative L1 error on [-1, 3]: {inversion.roundtrip_error(v, rec):.4f}")
for key in ("kernel_imag_residue", "kernel_tail_bound", "min_rcond", "left_mean_abs"):
    print(f"{key:>22}: {rec.diagnostics[key]:.3e}")
