"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line with the measured value; the lines are
printed in the terminal summary under "acceptance criteria".
"""
import json
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES, barrier_closed_form, preset_suite
from phaseless1d import forward as F
from phaseless1d import phaseless as PH
from phaseless1d import potential as P
from phaseless1d import recovery as R
from phaseless1d.cli import run
from phaseless1d.errors import DegenerateConfiguration


def report(number, title, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}")
    assert passed, detail


PIECEWISE = ("square", "double", "steps", "shifted")


def test_01_unitarity():
    ks = np.linspace(0.05, 40, 50)
    ode = prop = 0.0
    for name, v in preset_suite().items():
        ode = max(ode, F.scatter_sweep(v, ks, method="ode").defect.max())
        if name in PIECEWISE:
            prop = max(prop, F.scatter_sweep(v, ks, method="propagator").defect.max())
    report(1, "unitarity, 6 presets x 50 k", ode <= 1e-8 and prop <= 1e-12,
           f"ODE max defect {ode:.2e} (<= 1e-8), propagator {prop:.2e} (<= 1e-12)")


def test_02_square_barrier_oracle():
    V0, L = 4.0, 1.0
    below = np.linspace(0.1, 1.95, 40)   # E = k^2 < V0
    above = np.linspace(2.05, 15, 40)
    worst = {}
    for label, ks in (("tunnelling", below), ("over-barrier", above)):
        for method in ("ode", "propagator"):
            sw = F.scatter_sweep(P.square_barrier(V0, L), ks, method=method)
            ref = np.array([barrier_closed_form(V0, L, k) for k in ks])
            err = max(np.abs(sw.s21 - ref[:, 0]).max(), np.abs(sw.s22 - ref[:, 1]).max())
            worst[f"{label}/{method}"] = err
    top = max(worst.values())
    report(2, "square barrier vs closed form", top <= 1e-8,
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def _reference(ks):
    return F.scatter_sweep(P.truncated_gaussian(1.5, 1.0, 0.3), ks).s21


def test_03_s1_exact():
    ks = np.linspace(0.05, 40, 200)
    s21 = _reference(ks)
    res, summ = R.sweep_recover(PH.synthesize_s1(ks, s21, -1.0, -1.25), reference=s21)
    (bad,) = PH.synthesize_s1(1.0, 0.3, -1.0, -1.0 - np.pi / 2).records
    try:
        R.recover_from_s1(bad)
        raised = False
    except DegenerateConfiguration:
        raised = True
    report(3, "S1 recovery over 200 k", summ.max_error <= 1e-8 and raised,
           f"max error {summ.max_error:.2e} on {summ.n_ok} k ({len(summ.flagged)} degenerate excluded), "
           f"degenerate triple raises: {raised}")


def test_04_s2_exact():
    ks = np.linspace(0.05, 40, 200)
    s21 = _reference(ks)
    res, summ = R.sweep_recover(PH.synthesize_s2(ks, s21, -1.0, -1.3, -1.7), reference=s21)
    norm_gap = max(abs(abs(r.s21_est) - abs(z)) for r, z in zip(res, s21) if r.ok)
    report(4, "S2 recovery over 200 k", summ.max_error <= 1e-8 and norm_gap <= 1e-8,
           f"max error {summ.max_error:.2e}, max ||vector| - |s21|| {norm_gap:.2e} "
           f"({len(summ.flagged)} degenerate excluded)")


def test_05_s3_exact_and_fd_order():
    ks = np.linspace(0.05, 40, 200)
    s21 = _reference(ks)
    _, summ = R.sweep_recover(PH.synthesize_s3(ks, s21, -1.0), reference=s21)
    kfd = np.linspace(0.5, 5, 50)
    sfd = _reference(kfd)
    errs = []
    for h in (1e-2, 1e-3, 1e-4):
        _, s = R.sweep_recover(PH.synthesize_s3(kfd, sfd, -1.0, derivative="central", h=h), reference=sfd)
        errs.append(s.max_error)
    orders = [math.log10(errs[i] / errs[i + 1]) for i in range(2)]
    ok = summ.max_error <= 1e-10 and all(1.8 <= p <= 2.2 for p in orders)
    report(5, "S3 recovery and central-difference order", ok,
           f"analytic max error {summ.max_error:.2e}; FD errors "
           + ", ".join(f"{e:.2e}" for e in errs) + "; orders " + ", ".join(f"{p:.3f}" for p in orders))


def test_06_determinant_identity():
    rng = np.random.default_rng(2024)
    x = -rng.uniform(0.01, 10, size=(3, 10_000))
    k = rng.uniform(0.01, 20, size=10_000)
    gap = float(np.abs(R.determinant_expanded(*x, k) - R.determinant_product(*x, k)).max())
    report(6, "determinant identity on 1e4 samples", gap <= 1e-12, f"max gap {gap:.2e}")


def test_07_translation():
    v, y = P.truncated_gaussian(1.5, 1.0, 0.3), 0.7
    w = P.translate(v, y)
    ks = np.linspace(0.2, 20, 100)
    a, b = F.scatter_sweep(v, ks).s21, F.scatter_sweep(w, ks).s21
    mod_gap = np.abs(np.abs(a) - np.abs(b)).max()
    dphi = np.angle(b) - np.angle(a) - 2 * ks * y
    phase_gap = np.abs((dphi + np.pi) % (2 * np.pi) - np.pi).max()
    # |s21|^2 is identical, the recovered complex coefficient is not
    r2_gap = max(abs(p.r2 - q.r2) for p, q in zip(PH.build_s1(v, -1, -1.25, ks), PH.build_s1(w, -1, -1.25, ks)))
    ra, _ = R.sweep_recover(PH.build_s3(v, -1.0, ks))
    rb, _ = R.sweep_recover(PH.build_s3(w, -1.0, ks))
    separation = max(abs(p.s21_est - q.s21_est) for p, q in zip(ra, rb))
    ok = mod_gap <= 1e-8 and phase_gap <= 1e-8 and r2_gap <= 1e-8 and separation > 0.1
    report(7, "translation covariance", ok,
           f"||s21| gap| {mod_gap:.1e}, phase gap mod 2pi {phase_gap:.1e}, |s21|^2 gap {r2_gap:.1e}, "
           f"recovered s21 separation {separation:.3f}")


def test_08_reduction_identity():
    rng = np.random.default_rng(8)
    presets = list(preset_suite().values())
    worst = 0.0
    for _ in range(100):
        v = presets[rng.integers(len(presets))]
        x, k = -rng.uniform(0.01, 5), rng.uniform(0.05, 20)
        est = R.s21_from_field(F.psi_plus(v, x, k), x, k)
        worst = max(worst, abs(est - F.scatter(v, k).s21))
    report(8, "s21 from one field value, 100 cases", worst <= 1e-10, f"max gap {worst:.2e}")


def test_09_intensity_identity_and_branch():
    ks = np.linspace(0.05, 40, 200)
    gap, min_rad, min_re1 = 0.0, np.inf, np.inf
    for v in preset_suite().values():
        s21 = F.scatter_sweep(v, ks).s21
        for x in (-0.3, -1.0, -2.7):
            for rec, z in zip(PH.synthesize_s3(ks, s21, x), s21):
                u = z * np.exp(-2j * rec.k * x)
                gap = max(gap, abs((u.real + 1) ** 2 + u.imag**2 - rec.i))
                im = rec.di / (4 * rec.k)
                rad = rec.i - im * im
                min_rad = min(min_rad, rad)
                min_re1 = min(min_re1, math.sqrt(max(rad, 0.0)))
    ok = gap <= 1e-12 and min_rad >= 0 and min_re1 > 0
    report(9, "intensity identity and positive root", ok,
           f"max gap {gap:.2e}, min radicand {min_rad:.3e}, min Re+1 {min_re1:.3e}")


def test_10_round_trip(tmp_path):
    t0 = time.perf_counter()
    code = run(["pipeline", "--potential", '{"kind": "square-barrier", "params": {"V0": 1, "L": 1}}',
                "--method", "s3", "--kmin", "0.05", "--kmax", "40", "--kcount", "2000",
                "--xmin", "-1", "--xmax", "3", "--xstep", "0.01", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - t0
    rep = json.loads((tmp_path / "report.json").read_text())
    l1, rs = rep["roundtrip_l1_error"], rep["rescatter_relative_l2_error"]
    ok = code == 0 and l1 <= 0.05 and rs <= 0.05 and elapsed <= 120
    report(10, "square barrier round trip via S3", ok,
           f"L1 error {l1:.4f} (<= 0.05), re-scatter error {rs:.4f} (<= 0.05), runtime {elapsed:.1f} s")


def test_11_noise_smoke():
    sigma = 1e-3
    # a slowly decaying |s21| keeps the error from being capped by 2|s21|
    ks = np.linspace(0.05, 10, 400)
    s21 = F.scatter_sweep(P.square_barrier(1.0, 1.0), ks).s21
    ds = PH.synthesize_s1(ks, s21, -1.0, -1.25, PH.NoiseModel(sigma, seed=11))
    res, _ = R.sweep_recover(ds)
    ratio = np.array([abs(r.s21_est - z) * r.conditioning / sigma for r, z in zip(res, s21) if r.ok])
    med = float(np.median(ratio))
    report(11, "S1 with 1e-3 noise", med <= 10,
           f"median error / (sigma / conditioning) = {med:.2f} (<= 10), 90th percentile {np.quantile(ratio, 0.9):.2f}")
