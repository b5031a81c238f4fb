"""
Convergence of the round trip
=============================

How the reconstruction error of the unit square barrier depends on the
k-cutoff, the grid step, and the spectral window.  The jump edges of a
barrier make the k-cutoff the dominant error, and Gibbs ringing near the
edges is what the Lanczos window suppresses.
"""
import time

import numpy as np

from phaseless1d import forward, inversion, potential

v = potential.square_barrier(1.0, 1.0)

print(f"{'kmax':>5} {'N':>5} {'step':>6} {'window':>8} {'L1':>8} {'rescatter':>10} {'time':>6}")
for kmax, n, step in [(20, 1000, 0.02), (40, 2000, 0.01), (40, 2000, 0.005), (80, 4000, 0.005)]:
    ks = np.linspace(kmax / n, kmax, n)
    table = inversion.ReflectionTable.from_sweep(forward.scatter_sweep(v, ks))
    x = np.arange(-1.0, 3.0 + 1e-9, step)
    for window in ("none", "lanczos"):
        t0 = time.perf_counter()
        rec = inversion.reconstruct_potential(table, x, window=window)
        again = inversion.rescatter(rec, ks[::20]).s21
        ref = table.s21[::20]
        rs = np.linalg.norm(again - ref) / np.linalg.norm(ref)
        dt = time.perf_counter() - t0
        print(f"{kmax:5d} {n:5d} {step:6.3f} {window:>8} {inversion.roundtrip_error(v, rec):8.4f} "
              f"{rs:10.4f} {dt:6.1f}")
