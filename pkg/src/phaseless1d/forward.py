"""Forward scattering for  -psi'' + v psi = k^2 psi  with v supported on [0, L].

The solution ``g`` with ``g = exp(ikx)`` for ``x >= L`` is carried back to
``x = 0`` and split there as ``g = A exp(ikx) + B exp(-ikx)``.  Then

    psi+ = g / A,    s22 = 1 / A,    s21 = B / A.

Two propagators are available:

* ``"propagator"``: exact 2x2 transfer matrices, piecewise-constant v only;
* ``"ode"``: adaptive Runge-Kutta 4(5) on the first-order system, any v.

``method="auto"`` picks the exact propagator when it applies.  All sweep
functions are vectorised over k: one integration advances every wavenumber.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigError, IntegrationFailure
from .potential import PotentialSpec, evaluate

logger = logging.getLogger(__name__)

RTOL = 1e-11
ATOL = 1e-13
UNITARITY_TOL = 1e-8

__all__ = [
    "ScatteringCoefficients",
    "Sweep",
    "scatter",
    "scatter_sweep",
    "psi_plus",
    "intensity",
    "intensity_derivative",
    "intensity_from_s21",
    "intensity_derivative_from_s21",
    "unitarity_defect",
]


@dataclass(frozen=True)
class ScatteringCoefficients:
    k: float
    s21: complex
    s22: complex
    defect: float = 0.0
    flagged: bool = False


@dataclass
class Sweep:
    """Scattering coefficients over a k-grid (arrays of equal length)."""

    k: np.ndarray
    s21: np.ndarray
    s22: np.ndarray
    defect: np.ndarray

    def __len__(self):
        return len(self.k)

    def __getitem__(self, i) -> ScatteringCoefficients:
        return ScatteringCoefficients(float(self.k[i]), complex(self.s21[i]), complex(self.s22[i]),
                                      float(self.defect[i]), bool(self.defect[i] > UNITARITY_TOL))

    def rows(self):
        for k, r, t, d in zip(self.k, self.s21, self.s22, self.defect):
            yield (k, r.real, r.imag, t.real, t.imag, d)

    COLUMNS = ("k", "re_s21", "im_s21", "re_s22", "im_s22", "unitarity_defect")


def _check_k(k) -> np.ndarray:
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    if ks.ndim != 1 or ks.size == 0:
        raise ConfigError("wavenumbers must form a non-empty 1-D array")
    if not np.all(np.isfinite(ks)) or np.any(ks <= 0):
        raise ConfigError("wavenumber k must be positive (k = 0 is excluded)")
    return ks


def _choose(spec: PotentialSpec, method: str) -> str:
    if method == "auto":
        return "propagator" if spec.kind == "piecewise" else "ode"
    if method == "propagator" and spec.kind != "piecewise":
        raise ConfigError("the exact propagator needs a piecewise-constant potential")
    if method not in ("ode", "propagator"):
        raise ConfigError(f"unknown forward method {method!r}")
    return method


def _transfer(k, V, h):
    """Exact map [g(b), g'(b)] -> [g(b-h), g'(b-h)] on a segment where v = V."""
    q = np.sqrt((k * k - V).astype(complex))
    c = np.cos(q * h)
    small = np.abs(q) < 1e-14
    qs = np.where(small, 1.0, q)
    s_over_q = np.where(small, h, np.sin(qs * h) / qs)
    q_s = np.where(small, 0.0, qs * np.sin(qs * h))
    return c, s_over_q, q_s


def _intervals(spec: PotentialSpec):
    """(a, b, constant value or None) covering [0, L], left to right."""
    if spec.kind == "piecewise":
        return [(a, b, v) for a, b, v in spec.pieces()]
    bp = spec.breakpoints()
    out = []
    for a, b in zip(bp[:-1], bp[1:]):
        mid = 0.5 * (a + b)
        out.append((a, b, 0.0 if mid < spec.support_start else None))
    return out


def _integrate(spec, ks, method="auto", rtol=RTOL, atol=ATOL, xs=None):
    """Carry g from L back to 0.

    Returns ``(g0, dg0, g_at)`` where ``g_at[j, :]`` is g at ``xs[j]`` (each
    ``xs[j]`` in [0, L]) for every k, or ``None`` without ``xs``.
    """
    method = _choose(spec, method)
    L = spec.support_end
    gL = np.exp(1j * ks * L)
    g, dg = gL.copy(), 1j * ks * gL
    xs = None if xs is None else np.asarray(xs, dtype=float)
    g_at = None if xs is None else np.empty((xs.size, ks.size), dtype=complex)
    if xs is not None:
        at_end = xs >= L
        g_at[at_end] = gL

    for a, b, V in reversed(_intervals(spec)):
        if b <= a:
            continue
        if method == "propagator":
            c, sq, qs = _transfer(ks, V, b - a)
            if xs is not None:
                for j in np.flatnonzero((xs >= a) & (xs < b)):
                    cj, sj, _ = _transfer(ks, V, b - xs[j])
                    g_at[j] = cj * g - sj * dg
            g, dg = c * g - sq * dg, qs * g + c * dg
            continue
        g, dg, sol = _ode_piece(spec, ks, a, b, V, g, dg, rtol, atol, dense=xs is not None)
        if xs is not None:
            sel = np.flatnonzero((xs >= a) & (xs < b))
            if sel.size:
                states = sol(xs[sel])
                g_at[sel] = states[: ks.size].T
    return g, dg, g_at


def _ode_piece(spec, ks, a, b, V, g, dg, rtol, atol, dense=False):
    # state [g, g'/k] keeps both halves at comparable magnitude
    n = ks.size
    k2 = ks * ks
    if V is None:
        def rhs(x, y):
            vx = evaluate(spec, x)
            return np.concatenate((ks * y[n:], (vx - k2) / ks * y[:n]))
    else:
        def rhs(x, y):
            return np.concatenate((ks * y[n:], (V - k2) / ks * y[:n]))

    y0 = np.concatenate((g, dg / ks))
    sol = solve_ivp(rhs, (b, a), y0, method="RK45", rtol=rtol, atol=atol, dense_output=dense)
    if not sol.success:
        raise IntegrationFailure(f"integration failed on [{a}, {b}]: {sol.message}")
    y = sol.y[:, -1]
    return y[:n], y[n:] * ks, sol.sol


def _split(ks, g0, dg0):
    A = 0.5 * (g0 + dg0 / (1j * ks))
    B = 0.5 * (g0 - dg0 / (1j * ks))
    return A, B


def unitarity_defect(c) -> float | np.ndarray:
    """| |s21|^2 + |s22|^2 - 1 |  for coefficients or a sweep."""
    return np.abs(np.abs(c.s21) ** 2 + np.abs(c.s22) ** 2 - 1.0)


def scatter_sweep(spec: PotentialSpec, k, method="auto", rtol=RTOL, atol=ATOL,
                  unitarity_tol=UNITARITY_TOL) -> Sweep:
    ks = _check_k(k)
    if spec.support_end == 0.0 or spec.is_zero:
        one = np.ones_like(ks, dtype=complex)
        return Sweep(ks, 0 * one, one, np.zeros_like(ks))
    g0, dg0, _ = _integrate(spec, ks, method, rtol, atol)
    A, B = _split(ks, g0, dg0)
    sweep = Sweep(ks, B / A, 1.0 / A, np.zeros_like(ks))
    sweep.defect = unitarity_defect(sweep)
    bad = sweep.defect > unitarity_tol
    if np.any(bad):
        logger.warning("unitarity defect above %.1e at %d of %d wavenumbers (max %.3e)",
                       unitarity_tol, bad.sum(), ks.size, sweep.defect.max())
    return sweep


def scatter(spec: PotentialSpec, k: float, method="auto", rtol=RTOL, atol=ATOL,
            unitarity_tol=UNITARITY_TOL) -> ScatteringCoefficients:
    """Reflection (to the left) and transmission coefficients at one k."""
    if np.ndim(k) != 0:
        raise ConfigError("scatter takes a scalar k; use scatter_sweep for grids")
    sw = scatter_sweep(spec, k, method, rtol, atol, unitarity_tol)
    c = sw[0]
    if c.defect > unitarity_tol:
        c = ScatteringCoefficients(c.k, c.s21, c.s22, c.defect, True)
    return c


def psi_plus(spec: PotentialSpec, x, k: float, method="auto", rtol=RTOL, atol=ATOL):
    """The scattering solution psi+(x, k) at positions ``x`` (scalar or array)."""
    ks = _check_k(k)
    if ks.size != 1:
        raise ConfigError("psi_plus takes a scalar k")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    L = spec.support_end
    inside = (xa >= 0) & (xa <= L)
    if spec.support_end == 0.0 or spec.is_zero:
        out = np.exp(1j * ks[0] * xa)
        return out[0] if np.ndim(x) == 0 else out
    g0, dg0, g_at = _integrate(spec, ks, method, rtol, atol, xs=xa[inside])
    A, B = _split(ks, g0, dg0)
    k0, s21, s22 = ks[0], (B / A)[0], (1.0 / A)[0]
    out = np.empty(xa.shape, dtype=complex)
    left = xa < 0
    out[left] = np.exp(1j * k0 * xa[left]) + s21 * np.exp(-1j * k0 * xa[left])
    out[xa > L] = s22 * np.exp(1j * k0 * xa[xa > L])
    out[inside] = g_at[:, 0] / A[0]
    return out[0] if np.ndim(x) == 0 else out


def _check_left(x):
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa >= 0):
        raise ConfigError("measurement positions must lie in x < 0")
    return xa


def intensity_from_s21(s21, x, k):
    """|psi+(x,k)|^2 = 1 + 2 Re(s21 e^{-2ikx}) + |s21|^2 for x < 0."""
    x = _check_left(x)
    return 1.0 + 2.0 * np.real(s21 * np.exp(-2j * k * x)) + np.abs(s21) ** 2


def intensity_derivative_from_s21(s21, x, k):
    """d|psi+|^2/dx = 4k Im(s21 e^{-2ikx}) for x < 0."""
    x = _check_left(x)
    return 4.0 * k * np.imag(s21 * np.exp(-2j * k * x))


def intensity(spec: PotentialSpec, x, k: float, **kw):
    _check_left(x)
    return intensity_from_s21(scatter(spec, k, **kw).s21, x, k)


def intensity_derivative(spec: PotentialSpec, x, k: float, **kw):
    _check_left(x)
    return intensity_derivative_from_s21(scatter(spec, k, **kw).s21, x, k)
