"""Potential reconstruction from the left reflection coefficient.

Left Marchenko equation, for a potential with no bound states::

    B(x, y) + F(x + y) + int_{-inf}^{x} B(x, z) F(z + y) dz = 0,   y < x,
    F(t) = (1 / 2pi) int R(k) exp(-ikt) dk,
    v(x) = 2 d/dx B(x, x).

Here ``R`` is the reflection coefficient to the left and
``f(x, k) = exp(-ikx) + int_{-inf}^{x} B(x, y) exp(-iky) dy`` is the Jost
solution normalised at -infinity.  Since v vanishes on x < 0, R is analytic
in the upper half plane and F(t) = 0 for t < 0.  B(x, .) is then supported
on [-x, x], so each Nystrom solve lives on that interval, and B(x, x) =
-F(2x) for x <= 0.  The convention is checked by the round trip
``scatter -> reconstruct -> scatter`` in the tests.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import dgecon

from . import io
from .errors import ConfigError, IllConditioned, InversionError, TruncationError
from .forward import scatter_sweep
from .potential import PotentialSpec, evaluate, grid_sampled, zero

logger = logging.getLogger(__name__)

__all__ = [
    "ReflectionTable",
    "ReconstructedPotential",
    "marchenko_kernel",
    "kernel_tail_bound",
    "reconstruct_potential",
    "roundtrip_error",
    "rescatter",
    "derivative4",
    "write_potential",
]

RCOND_MIN = 1e-12
WINDOWS = ("lanczos", "none")


@dataclass
class ReflectionTable:
    """R(k) on a uniform, strictly positive, increasing k-grid."""

    k: np.ndarray
    s21: np.ndarray
    bound_state_free: bool = True
    filled: int = 0  # entries interpolated over flagged recoveries

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=float)
        self.s21 = np.asarray(self.s21, dtype=complex)
        k = self.k
        if k.ndim != 1 or k.size < 2 or k.shape != self.s21.shape:
            raise ConfigError("reflection table needs matching k and s21 arrays (>= 2 entries)")
        if k[0] <= 0 or np.any(np.diff(k) <= 0):
            raise ConfigError("reflection table k-grid must be positive and strictly increasing")
        dk = np.diff(k)
        if np.ptp(dk) > 1e-8 * dk.mean():
            raise ConfigError("reflection table k-grid must be uniform")
        if not np.all(np.isfinite(self.s21)) or np.any(np.abs(self.s21) >= 1):
            raise ConfigError("reflection table entries must be finite with |s21| < 1")

    @property
    def dk(self) -> float:
        return float((self.k[-1] - self.k[0]) / (self.k.size - 1))

    @property
    def kmax(self) -> float:
        return float(self.k[-1])

    @classmethod
    def from_sweep(cls, sweep) -> "ReflectionTable":
        return cls(sweep.k, sweep.s21)

    @classmethod
    def from_recovery(cls, results) -> "ReflectionTable":
        """Build from recovery results.

        Flagged entries, and estimates with |s21| >= 1 (noise can push them
        there), are linearly interpolated from their usable neighbours.
        """
        k = np.array([r.k for r in results])
        z = np.array([r.s21_est for r in results], dtype=complex)
        ok = np.array([r.status == "ok" for r in results]) & np.isfinite(z)
        ok[ok] &= np.abs(z[ok]) < 1
        if ok.sum() < 2:
            raise InversionError("fewer than two usable recovered coefficients")
        bad = ~ok
        if bad.any():
            z[bad] = (np.interp(k[bad], k[ok], z[ok].real)
                      + 1j * np.interp(k[bad], k[ok], z[ok].imag))
        return cls(k, z, filled=int(bad.sum()))


@dataclass
class ReconstructedPotential:
    x: np.ndarray
    v: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def to_spec(self) -> PotentialSpec:
        """Grid potential from the x >= 0 part (the x < 0 part is a self-check only)."""
        keep = self.x >= 0
        if keep.sum() < 2:
            raise InversionError("reconstruction grid has fewer than two points in x >= 0")
        return grid_sampled(self.x[keep], self.v[keep], label="reconstruction")


def _weights(table: ReflectionTable) -> np.ndarray:
    # trapezoid on the symmetric nodes -k_N..-k_1, k_1..k_N; the centre panel
    # [-k_1, k_1] is shared between the two innermost nodes
    w = np.full(table.k.size, table.dk)
    w[-1] = table.dk / 2
    w[0] = (table.dk + 2 * table.k[0]) / 2
    return w


def _window(table: ReflectionTable, window: str) -> np.ndarray:
    if window == "none":
        return np.ones_like(table.k)
    if window == "lanczos":
        return np.sinc(table.k / table.kmax)
    raise ConfigError(f"unknown spectral window {window!r}; choose from {WINDOWS}")


def marchenko_kernel(table: ReflectionTable, t, window: str = "none", return_residue: bool = False):
    """F(t) by trapezoidal quadrature over the grid extended by R(-k) = conj R(k).

    With ``return_residue`` the largest imaginary part of the (analytically
    real) symmetric sum is returned as well.
    """
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(np.abs(ta) > np.pi / table.dk):
        raise TruncationError(
            f"|t| up to {np.abs(ta).max():.4g} exceeds the alias-free range pi/dk = {np.pi / table.dk:.4g}")
    wr = _weights(table) * _window(table, window) * table.s21
    out = np.empty(ta.size)
    residue = 0.0
    for s in range(0, ta.size, 1024):
        phase = np.outer(ta[s:s + 1024], table.k)
        pos = np.exp(-1j * phase) @ wr
        neg = np.exp(1j * phase) @ np.conj(wr)
        total = (pos + neg) / (2 * np.pi)
        out[s:s + 1024] = total.real
        residue = max(residue, float(np.abs(total.imag).max()))
    if np.ndim(t) == 0:
        out = float(out[0])
    return (out, residue) if return_residue else out


def kernel_tail_bound(table: ReflectionTable) -> float:
    """Estimate of |F| lost beyond k_max, assuming |R| ~ 1/k^2 past the grid."""
    return float(abs(table.s21[-1]) * table.kmax / np.pi)


def derivative4(f, h):
    """Fourth-order finite-difference derivative on a uniform grid."""
    f = np.asarray(f, dtype=float)
    n = f.size
    if n < 5:
        return np.gradient(f, h)
    d = np.empty(n)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return d


def _uniform(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 5:
        raise ConfigError("reconstruction grid needs at least five points")
    dx = np.diff(x)
    if np.any(dx <= 0) or np.ptp(dx) > 1e-8 * dx.mean():
        raise ConfigError("reconstruction grid must be uniform and increasing")
    return x, float((x[-1] - x[0]) / (x.size - 1))


def reconstruct_potential(table: ReflectionTable, xgrid, step: float | None = None,
                          window: str = "lanczos", rcond_min: float = RCOND_MIN) -> ReconstructedPotential:
    """Solve the Marchenko equation at every grid point and differentiate.

    ``step`` is the Nystrom node spacing (default: the grid spacing);
    ``window`` multiplies R(k) by Lanczos sigma factors (``"lanczos"``) to
    damp Gibbs ringing from the cut at k_max, or leaves it as is (``"none"``).
    """
    if not table.bound_state_free:
        raise InversionError("reconstruction supports bound-state-free tables only")
    x, hx = _uniform(xgrid)
    h = hx if step is None else float(step)
    if h <= 0:
        raise ConfigError("Nystrom step must be positive")
    if h > np.pi / (2 * table.kmax):
        raise TruncationError(
            f"step {h:.4g} too coarse for k_max = {table.kmax:g}; need <= pi/(2 k_max) = {np.pi / (2 * table.kmax):.4g}")
    X = float(np.abs(x).max())

    # tabulate F once and interpolate; F is band-limited to k_max
    dt = min(h, np.pi / table.kmax) / 8
    tt = np.arange(-2 * X - 4 * dt, 2 * X + 5 * dt, dt)
    Ft, residue = marchenko_kernel(table, tt, window, return_residue=True)
    spline = CubicSpline(tt, Ft)

    diag = np.empty(x.size)
    worst_rcond = 1.0
    max_resid = 0.0
    for j, xx in enumerate(x):
        if xx <= 0:
            diag[j] = -spline(2 * xx)
            continue
        n = max(1, int(np.ceil(2 * xx / h - 1e-9)))
        y = np.linspace(-xx, xx, n + 1)
        w = np.full(n + 1, 2 * xx / n)
        w[0] = w[-1] = xx / n
        A = np.eye(n + 1) + spline(y[:, None] + y[None, :]) * w[None, :]
        rhs = -spline(xx + y)
        lu = lu_factor(A, check_finite=False)
        rcond, info = dgecon(lu[0], np.abs(A).sum(axis=0).max(), norm="1")
        if info != 0 or rcond < rcond_min:
            raise IllConditioned(f"Nystrom system at x={xx:.4g} has rcond {rcond:.3e}", rcond=rcond)
        worst_rcond = min(worst_rcond, float(rcond))
        B = lu_solve(lu, rhs, check_finite=False)
        max_resid = max(max_resid, float(np.abs(A @ B - rhs).max()))
        diag[j] = B[-1]

    vhat = 2.0 * derivative4(diag, hx)
    peak = float(np.abs(vhat).max())
    left = x < -0.5
    diagnostics = {
        "k_min": float(table.k[0]),
        "k_max": table.kmax,
        "k_count": int(table.k.size),
        "window": window,
        "nystrom_step": h,
        "kernel_imag_residue": residue,
        "kernel_tail_bound": kernel_tail_bound(table),
        "integral_equation_residual": max_resid,
        "min_rcond": worst_rcond,
        "left_mean_abs": float(np.abs(vhat[left]).mean()) if left.any() else 0.0,
        "peak_abs": peak,
        "filled_entries": table.filled,
    }
    return ReconstructedPotential(x, vhat, diagnostics)


def roundtrip_error(spec: PotentialSpec, rec: ReconstructedPotential, floor: float = 1e-12,
                    interval: tuple | None = None) -> float:
    """Relative L1 distance  int|v - vhat| / max(int|v|, floor)  on the grid."""
    x, vh = rec.x, rec.v
    if interval is not None:
        sel = (x >= interval[0]) & (x <= interval[1])
        x, vh = x[sel], vh[sel]
    if x.size < 2:
        raise ConfigError("no overlap between the reconstruction grid and the interval")
    vt = evaluate(spec, x)
    return float(np.trapezoid(np.abs(vt - vh), x) / max(np.trapezoid(np.abs(vt), x), floor))


def rescatter(rec: ReconstructedPotential, k, **forward_kw):
    """Forward sweep of the reconstructed potential (its x >= 0 part)."""
    if not np.any(rec.v[rec.x >= 0]):
        return scatter_sweep(zero(), k, **forward_kw)
    return scatter_sweep(rec.to_spec(), k, **forward_kw)


def write_potential(path, rec: ReconstructedPotential, header=()) -> None:
    """Two-column CSV (x, v) and a ``.json`` diagnostics sidecar."""
    path = Path(path)
    io.write_table(path, ("x", "v"), zip(rec.x, rec.v), header)
    path.with_suffix(".json").write_text(json.dumps(rec.diagnostics, indent=2, sort_keys=True) + "\n")
