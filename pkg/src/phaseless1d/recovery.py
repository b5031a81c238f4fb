"""Explicit recovery of the complex reflection coefficient from phaseless data.

For x < 0 the intensity is  1 + 2|s21| cos(2kx - alpha) + |s21|^2,  so
``a = i - 1`` is linear in the unknown vector |s21| (cos alpha, sin alpha):

* two points plus |s21|^2 give a 2x2 system with determinant sin(2k(x2 - x1));
* three points give, after differencing, a 2x2 system with determinant
  4 sin(k(x2 - x3)) sin(k(x2 - x1)) sin(k(x1 - x3));
* one point plus the slope of the intensity gives s21 e^{-2ikx} in closed form.

The single-point formulas use the factor e^{-2ikx} throughout.  Printed
versions with e^{-ikx} do not satisfy the intensity identity and are not
used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import io
from .errors import ConfigError, DegenerateConfiguration, NonPhysicalIntensity
from .phaseless import Dataset, S1Record, S2Record, S3Record

__all__ = [
    "PhaseSplit",
    "RecoveryResult",
    "SweepSummary",
    "EPS_DET",
    "recover",
    "recover_from_s1",
    "recover_from_s2",
    "recover_from_s3",
    "s21_from_field",
    "conditioning",
    "determinant_expanded",
    "determinant_product",
    "sweep_recover",
    "write_recovery",
    "read_recovery",
]

EPS_DET = 1e-6


@dataclass(frozen=True)
class PhaseSplit:
    """Polar form  s21 = modulus * exp(i alpha),  alpha in (-pi, pi]."""

    modulus: float
    alpha: float

    @classmethod
    def from_complex(cls, z: complex) -> "PhaseSplit":
        alpha = math.atan2(z.imag, z.real)
        if alpha == -math.pi:
            alpha = math.pi
        return cls(abs(z), alpha)

    def to_complex(self) -> complex:
        return self.modulus * complex(math.cos(self.alpha), math.sin(self.alpha))


@dataclass(frozen=True)
class RecoveryResult:
    k: float
    s21_est: complex
    conditioning: float
    method: str
    residual: float = 0.0
    status: str = "ok"
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class SweepSummary:
    n_total: int
    n_ok: int
    flagged: list = field(default_factory=list)  # (k, status, message)
    max_error: float | None = None
    median_error: float | None = None
    max_residual: float = 0.0

    def as_dict(self) -> dict:
        return {
            "n_total": self.n_total,
            "n_ok": self.n_ok,
            "flagged": [{"k": k, "status": s, "message": m} for k, s, m in self.flagged],
            "max_error": self.max_error,
            "median_error": self.median_error,
            "max_residual": self.max_residual,
        }


# ----------------------------------------------------------- determinants

def determinant_expanded(x1, x2, x3, k):
    """Determinant of the differenced three-point system, as a sum of sines."""
    return (np.sin(2 * k * (x3 - x2)) + np.sin(2 * k * (x2 - x1))
            + np.sin(2 * k * (x1 - x3)))


def determinant_product(x1, x2, x3, k):
    """The same determinant in product form."""
    return 4 * np.sin(k * (x2 - x3)) * np.sin(k * (x2 - x1)) * np.sin(k * (x1 - x3))


def conditioning(method: str, positions, k: float) -> float:
    """|determinant| of the linear system solved by ``method`` (1 for s3)."""
    method = method.lower()
    if method == "s1":
        x1, x2 = positions
        return abs(math.sin(2 * k * (x2 - x1)))
    if method == "s2":
        return abs(float(determinant_product(*positions, k)))
    if method == "s3":
        return 1.0
    raise ConfigError(f"unknown recovery method {method!r}")


# -------------------------------------------------------------- formulas

def recover_from_s1(rec: S1Record, eps_det: float = EPS_DET) -> RecoveryResult:
    k, x1, x2 = rec.k, rec.x1, rec.x2
    det = math.sin(2 * k * (x2 - x1))
    if abs(det) <= eps_det:
        raise DegenerateConfiguration(
            f"S1 positions degenerate at k={k}: |sin(2k(x2-x1))| = {abs(det):.3e} <= {eps_det:g} "
            "(need x1 != x2 mod pi/(2k))", value=det)
    b1 = (rec.i1 - 1.0) - rec.r2
    b2 = (rec.i2 - 1.0) - rec.r2
    c = (math.sin(2 * k * x2) * b1 - math.sin(2 * k * x1) * b2) / (2 * det)
    s = (-math.cos(2 * k * x2) * b1 + math.cos(2 * k * x1) * b2) / (2 * det)
    modulus = math.sqrt(max(rec.r2, 0.0))
    residual = abs(math.hypot(c, s) - modulus)
    s21 = PhaseSplit(modulus, math.atan2(s, c)).to_complex()
    return RecoveryResult(k, s21, abs(det), "s1", residual)


def recover_from_s2(rec: S2Record, eps_det: float = EPS_DET) -> RecoveryResult:
    k, x1, x2, x3 = rec.k, rec.x1, rec.x2, rec.x3
    det = float(determinant_product(x1, x2, x3, k))
    if abs(det) <= eps_det:
        pairs = {"x1,x2": x2 - x1, "x1,x3": x3 - x1, "x2,x3": x3 - x2}
        worst = min(pairs, key=lambda p: abs(math.sin(k * pairs[p])))
        raise DegenerateConfiguration(
            f"S2 positions degenerate at k={k}: |det| = {abs(det):.3e} <= {eps_det:g} "
            f"(pair {worst} close to 0 mod pi/k)", value=det)
    d2 = rec.i2 - rec.i1
    d3 = rec.i3 - rec.i1
    s1, s2, s3 = (math.sin(2 * k * x) for x in (x1, x2, x3))
    c1, c2, c3 = (math.cos(2 * k * x) for x in (x1, x2, x3))
    c = ((s3 - s1) * d2 + (s1 - s2) * d3) / (2 * det)
    s = ((c1 - c3) * d2 + (c2 - c1) * d3) / (2 * det)
    s21 = complex(c, s)
    return RecoveryResult(k, s21, abs(det), "s2", max(0.0, abs(s21) - 1.0))


def recover_from_s3(rec: S3Record) -> RecoveryResult:
    k, x = rec.k, rec.x
    im = rec.di / (4 * k)
    radicand = rec.i - im * im
    if radicand < 0:
        raise NonPhysicalIntensity(
            f"S3 record at k={k}, x={x}: intensity {rec.i:.6g} is below (slope/4k)^2 = {im * im:.6g}",
            radicand=radicand)
    re = -1.0 + math.sqrt(radicand)
    s21 = complex(re, im) * complex(math.cos(2 * k * x), math.sin(2 * k * x))
    return RecoveryResult(k, s21, 1.0, "s3", max(0.0, abs(s21) - 1.0))


def recover(rec, eps_det: float = EPS_DET) -> RecoveryResult:
    if isinstance(rec, S1Record):
        return recover_from_s1(rec, eps_det)
    if isinstance(rec, S2Record):
        return recover_from_s2(rec, eps_det)
    if isinstance(rec, S3Record):
        return recover_from_s3(rec)
    raise TypeError(f"not a phaseless record: {rec!r}")


def s21_from_field(psi, x, k):
    """Reflection coefficient from one complex field value at x < 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa >= 0):
        raise ConfigError("field must be sampled at x < 0")
    return np.exp(1j * k * xa) * psi - np.exp(2j * k * xa)


def sweep_recover(dataset: Dataset, reference=None, eps_det: float = EPS_DET):
    """Recover every record; failures are flagged, not raised.

    ``reference`` (array aligned with the records) enables the error summary.
    Returns ``(results, summary)``.
    """
    results = []
    flagged = []
    for rec in dataset:
        try:
            results.append(recover(rec, eps_det))
        except DegenerateConfiguration as exc:
            results.append(RecoveryResult(rec.k, complex(np.nan, np.nan), abs(exc.value or 0.0),
                                          dataset.variant, np.nan, "degenerate", str(exc)))
            flagged.append((rec.k, "degenerate", str(exc)))
        except NonPhysicalIntensity as exc:
            results.append(RecoveryResult(rec.k, complex(np.nan, np.nan), 1.0,
                                          dataset.variant, np.nan, "nonphysical", str(exc)))
            flagged.append((rec.k, "nonphysical", str(exc)))
    ok = [r.ok for r in results]
    summary = SweepSummary(len(results), int(sum(ok)), flagged)
    res = [r.residual for r in results if r.ok]
    summary.max_residual = float(max(res)) if res else 0.0
    if reference is not None:
        ref = np.asarray(reference, dtype=complex)
        if ref.shape != (len(results),):
            raise ConfigError("reference table must align with the dataset records")
        err = np.array([abs(r.s21_est - z) for r, z in zip(results, ref) if r.ok])
        if err.size:
            summary.max_error = float(err.max())
            summary.median_error = float(np.median(err))
    return results, summary


RECOVERY_COLUMNS = ("k", "re_s21", "im_s21", "conditioning", "residual", "status")


def write_recovery(path, results, header=()) -> None:
    rows = [(r.k, r.s21_est.real, r.s21_est.imag, r.conditioning, r.residual, r.status)
            for r in results]
    io.write_table(path, RECOVERY_COLUMNS, rows, header)


def read_recovery(path) -> list[RecoveryResult]:
    cols, _ = io.read_table(path)
    missing = set(RECOVERY_COLUMNS) - set(cols)
    if missing:
        raise ConfigError(f"{path} lacks recovery columns {sorted(missing)}")
    return [RecoveryResult(float(k), complex(re, im), float(c), "", float(res), str(st))
            for k, re, im, c, res, st in zip(*(cols[n] for n in RECOVERY_COLUMNS))]
