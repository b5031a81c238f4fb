"""Quick invariant checks behind ``phaseless1d selftest``.

Each check returns ``(passed, detail)``.  The full acceptance suite lives in
the test tree; these are the cheap versions meant for an installed copy.
"""
from __future__ import annotations

import numpy as np

from . import forward, inversion, phaseless, potential, recovery


def _presets():
    xs = np.linspace(0.0, 2.0, 41)
    return [
        potential.square_barrier(2.0, 1.0),
        potential.double_barrier(1.5, 0.5, 0.7),
        potential.truncated_gaussian(1.5, 1.0, 0.3),
        potential.grid_sampled(xs, 1 + np.sin(3 * xs) ** 2),
        potential.piecewise_constant([(0.0, 0.5, 5.0), (0.5, 1.2, -1.0), (1.2, 2.0, 3.0)]),
    ]


def check_unitarity():
    ks = np.linspace(0.1, 20, 25)
    worst = max(forward.scatter_sweep(v, ks, method="ode").defect.max() for v in _presets())
    return worst <= 1e-8, f"max defect {worst:.2e}"


def check_barrier_oracle():
    V0, L = 2.0, 1.0
    worst = 0.0
    for k in (0.5, 1.0, 1.5, 3.0, 10.0):
        q = np.sqrt(complex(k * k - V0))
        eq, ek = np.exp(1j * q * L), np.exp(1j * k * L)
        M = np.array([[1, -1, -1, 0],
                      [-1j * k, -1j * q, 1j * q, 0],
                      [0, eq, 1 / eq, -ek],
                      [0, 1j * q * eq, -1j * q / eq, -1j * k * ek]])
        r = np.linalg.solve(M, [-1, -1j * k, 0, 0])[0]
        worst = max(worst, abs(forward.scatter(potential.square_barrier(V0, L), k, method="ode").s21 - r))
    return worst <= 1e-8, f"max |s21 - oracle| {worst:.2e}"


def check_recovery():
    z = 0.5 * np.exp(1j * np.pi / 3)
    errs = [
        abs(recovery.recover_from_s1(phaseless.synthesize_s1(1.0, z, -1.0, -2.0)[0]).s21_est - z),
        abs(recovery.recover_from_s2(phaseless.synthesize_s2(1.0, z, -1.0, -2.0, -3.5)[0]).s21_est - z),
        abs(recovery.recover_from_s3(phaseless.synthesize_s3(1.0, z, -1.0)[0]).s21_est - z),
    ]
    return max(errs) <= 1e-10, "errors " + ", ".join(f"{e:.1e}" for e in errs)


def check_determinant():
    rng = np.random.default_rng(0)
    x = -rng.uniform(0.1, 5, size=(3, 1000))
    k = rng.uniform(0.1, 10, size=1000)
    gap = np.abs(recovery.determinant_expanded(*x, k) - recovery.determinant_product(*x, k)).max()
    return gap <= 1e-12, f"max gap {gap:.1e}"


def check_translation():
    v, y = potential.square_barrier(1.0, 1.0), 0.7
    ks = np.linspace(0.2, 10, 20)
    a = forward.scatter_sweep(v, ks, method="ode")
    b = forward.scatter_sweep(potential.translate(v, y), ks, method="ode")
    gap = np.abs(b.s21 - np.exp(2j * ks * y) * a.s21).max()
    return gap <= 1e-8, f"max gap {gap:.1e}"


def check_reduction():
    v = potential.truncated_gaussian(1.0, 0.8, 0.25)
    worst = 0.0
    for k in (0.5, 2.0, 5.0):
        x = -1.3
        s21 = forward.scatter(v, k).s21
        worst = max(worst, abs(recovery.s21_from_field(forward.psi_plus(v, x, k), x, k) - s21))
    return worst <= 1e-10, f"max gap {worst:.1e}"


def check_zero_map():
    ks = np.linspace(0.05, 10, 200)
    table = inversion.ReflectionTable(ks, np.zeros_like(ks))
    rec = inversion.reconstruct_potential(table, np.linspace(-0.5, 1.0, 31), window="none")
    return bool(np.all(rec.v == 0)), f"max |v| {np.abs(rec.v).max():.1e}"


CHECKS = [
    ("unitarity |s21|^2 + |s22|^2 = 1", check_unitarity),
    ("square barrier vs plane-wave matching", check_barrier_oracle),
    ("exact recovery S1/S2/S3", check_recovery),
    ("three-point determinant identity", check_determinant),
    ("translation phase factor e^{2iky}", check_translation),
    ("s21 from one field value", check_reduction),
    ("zero reflection -> zero potential", check_zero_map),
]


def run_selftest(stream=None) -> bool:
    import sys

    stream = stream or sys.stdout
    ok_all = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        ok_all &= bool(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name:<40s} {detail}", file=stream)
    return ok_all
