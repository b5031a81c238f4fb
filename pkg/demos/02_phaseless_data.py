"""
Phaseless measurements
======================

Phaseless data are intensities |psi+(x,k)|^2 measured left of the
potential, optionally with |s21|^2 or the intensity slope.  This script
builds one dataset per scheme and shows why |s21|^2 alone says nothing
about where the potential sits.
"""
import numpy as np

from phaseless1d import phaseless, potential

v = potential.truncated_gaussian(1.5, 1.0, 0.3)
ks = phaseless.kgrid(0.5, 5.0, 4)

s1 = phaseless.build_s1(v, -1.0, -1.25, ks)
s2 = phaseless.build_s2(v, -1.0, -1.3, -1.7, ks)
s3 = phaseless.build_s3(v, -1.0, ks)

for rec in s1:
    print(f"S1 k={rec.k:.2f}  |s21|^2={rec.r2:.6f}  i1={rec.i1:.6f}  i2={rec.i2:.6f}")
for rec in s2:
    print(f"S2 k={rec.k:.2f}  i=({rec.i1:.6f}, {rec.i2:.6f}, {rec.i3:.6f})")
for rec in s3:
    print(f"S3 k={rec.k:.2f}  i={rec.i:.6f}  di/dx={rec.di:.6f}")

# Shift the potential to the right: |s21|^2 does not move at all.
moved = phaseless.build_s1(potential.translate(v, 0.7), -1.0, -1.25, ks)
print("\n|s21|^2 change under translation:",
      max(abs(a.r2 - b.r2) for a, b in zip(s1, moved)))
print("intensity change at x1:         ",
      max(abs(a.i1 - b.i1) for a, b in zip(s1, moved)))

# Noise is relative, seeded, and independent of evaluation order.
noisy = phaseless.build_s3(v, -1.0, ks, phaseless.NoiseModel(1e-3, seed=1))
print("\nnoisy vs clean intensity:", [f"{a.i - b.i:+.2e}" for a, b in zip(noisy, s3)])
