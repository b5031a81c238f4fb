"""Synthetic phaseless measurements taken to the left of the potential.

Three record types, one per measurement scheme:

* ``S1Record``: |s21|^2 plus intensities at two points;
* ``S2Record``: intensities at three points;
* ``S3Record``: intensity and its x-derivative at one point.

All intensities come from  |psi+(x,k)|^2 = 1 + 2 Re(s21 e^{-2ikx}) + |s21|^2,
exact for x < 0 because v vanishes there.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .errors import CoincidentPositions, ConfigError
from .forward import intensity_derivative_from_s21, intensity_from_s21, scatter_sweep
from .potential import PotentialSpec, to_dict

__all__ = [
    "S1Record",
    "S2Record",
    "S3Record",
    "Dataset",
    "NoiseModel",
    "kgrid",
    "a_of",
    "build_s1",
    "build_s2",
    "build_s3",
    "synthesize_s1",
    "synthesize_s2",
    "synthesize_s3",
    "write_dataset",
    "read_dataset",
]


@dataclass(frozen=True)
class S1Record:
    k: float
    x1: float
    x2: float
    r2: float
    i1: float
    i2: float


@dataclass(frozen=True)
class S2Record:
    k: float
    x1: float
    x2: float
    x3: float
    i1: float
    i2: float
    i3: float


@dataclass(frozen=True)
class S3Record:
    k: float
    x: float
    i: float
    di: float


RECORD_TYPES = {"s1": S1Record, "s2": S2Record, "s3": S3Record}


@dataclass
class Dataset:
    variant: str
    records: list
    meta: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def k(self) -> np.ndarray:
        return np.array([r.k for r in self.records])


@dataclass(frozen=True)
class NoiseModel:
    """Relative Gaussian noise  i -> i (1 + sigma xi).

    ``xi`` is drawn from a generator seeded by (seed, tag, k, x), so every
    value is reproducible and independent of evaluation order.
    """

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ConfigError("noise sigma must be a nonnegative number")

    def perturb(self, value, k, x, tag=0):
        if self.sigma == 0.0:
            return float(value)
        words = [int(self.seed) & 0xFFFFFFFF, int(tag)]
        for f in (k, x):
            bits = int(np.float64(f).view(np.uint64))
            words += [bits & 0xFFFFFFFF, bits >> 32]
        xi = np.random.default_rng(np.random.SeedSequence(words)).standard_normal()
        return float(value * (1.0 + self.sigma * xi))


NO_NOISE = NoiseModel()


def kgrid(kmin: float, kmax: float, count: int) -> np.ndarray:
    """Uniform wavenumber grid; every node strictly positive."""
    if count < 1 or not (0 < kmin <= kmax) or (count > 1 and kmin == kmax):
        raise ConfigError(f"invalid k-grid ({kmin}, {kmax}, {count})")
    return np.linspace(kmin, kmax, int(count))


def a_of(i):
    """a(x,k) = |psi+(x,k)|^2 - 1."""
    return np.asarray(i, dtype=float) - 1.0 if np.ndim(i) else float(i) - 1.0


def _check_positions(xs, name):
    xs = [float(x) for x in xs]
    if any(not np.isfinite(x) or x >= 0 for x in xs):
        raise ConfigError(f"{name} measurement points must lie in x < 0, got {xs}")
    if len(set(xs)) != len(xs):
        if len(xs) == 2:
            raise CoincidentPositions(f"S1 requires distinct positions x1 != x2, got {xs}")
        raise CoincidentPositions(f"S2 requires pairwise distinct positions x_i != x_j, got {xs}")
    return xs


def _check_k(ks):
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if ks.size == 0 or np.any(~np.isfinite(ks)) or np.any(ks <= 0):
        raise ConfigError("k-grid must be strictly positive")
    return ks


def _meta(variant, spec, positions, noise, **extra):
    meta = {"variant": variant, "positions": list(positions),
            "noise_sigma": noise.sigma, "seed": noise.seed}
    if spec is not None:
        meta["potential"] = to_dict(spec)
        meta["potential_label"] = spec.label
    meta.update(extra)
    return meta


# ------------------------------------------------- synthesis from given s21

def synthesize_s1(k, s21, x1, x2, noise: NoiseModel = NO_NOISE, spec=None) -> Dataset:
    x1, x2 = _check_positions((x1, x2), "S1")
    ks = _check_k(k)
    s21 = np.broadcast_to(np.asarray(s21, dtype=complex), ks.shape)
    recs = []
    for kk, r in zip(ks, s21):
        kk = float(kk)
        recs.append(S1Record(
            kk, x1, x2,
            noise.perturb(abs(r) ** 2, kk, 0.0, tag=1),
            noise.perturb(intensity_from_s21(r, x1, kk), kk, x1),
            noise.perturb(intensity_from_s21(r, x2, kk), kk, x2),
        ))
    return Dataset("s1", recs, _meta("s1", spec, (x1, x2), noise))


def synthesize_s2(k, s21, x1, x2, x3, noise: NoiseModel = NO_NOISE, spec=None) -> Dataset:
    xs = _check_positions((x1, x2, x3), "S2")
    ks = _check_k(k)
    s21 = np.broadcast_to(np.asarray(s21, dtype=complex), ks.shape)
    recs = []
    for kk, r in zip(ks, s21):
        kk = float(kk)
        ii = [noise.perturb(intensity_from_s21(r, x, kk), kk, x) for x in xs]
        recs.append(S2Record(kk, *xs, *ii))
    return Dataset("s2", recs, _meta("s2", spec, xs, noise))


def synthesize_s3(k, s21, x, noise: NoiseModel = NO_NOISE, derivative="analytic",
                  h: float | None = None, spec=None) -> Dataset:
    """S3 records; ``derivative`` is ``"analytic"`` or ``"central"`` (step ``h``)."""
    (x,) = _check_positions((x,), "S3")
    ks = _check_k(k)
    s21 = np.broadcast_to(np.asarray(s21, dtype=complex), ks.shape)
    if derivative == "central":
        if h is None or not h > 0:
            raise ConfigError("central-difference mode needs a step h > 0")
        if x + h >= 0:
            raise ConfigError("central-difference stencil x + h must stay in x < 0")
    elif derivative != "analytic":
        raise ConfigError(f"unknown derivative mode {derivative!r}")
    recs = []
    for kk, r in zip(ks, s21):
        kk = float(kk)
        i = noise.perturb(intensity_from_s21(r, x, kk), kk, x)
        if derivative == "analytic":
            di = noise.perturb(intensity_derivative_from_s21(r, x, kk), kk, x, tag=2)
        else:
            ip = noise.perturb(intensity_from_s21(r, x + h, kk), kk, x + h)
            im = noise.perturb(intensity_from_s21(r, x - h, kk), kk, x - h)
            di = (ip - im) / (2 * h)
        recs.append(S3Record(kk, x, i, di))
    return Dataset("s3", recs, _meta("s3", spec, (x,), noise, derivative=derivative, h=h))


# ------------------------------------------------ synthesis from a potential

def build_s1(spec: PotentialSpec, x1, x2, k, noise: NoiseModel = NO_NOISE, **forward_kw) -> Dataset:
    _check_positions((x1, x2), "S1")
    sw = scatter_sweep(spec, _check_k(k), **forward_kw)
    return synthesize_s1(sw.k, sw.s21, x1, x2, noise, spec=spec)


def build_s2(spec: PotentialSpec, x1, x2, x3, k, noise: NoiseModel = NO_NOISE, **forward_kw) -> Dataset:
    _check_positions((x1, x2, x3), "S2")
    sw = scatter_sweep(spec, _check_k(k), **forward_kw)
    return synthesize_s2(sw.k, sw.s21, x1, x2, x3, noise, spec=spec)


def build_s3(spec: PotentialSpec, x, k, noise: NoiseModel = NO_NOISE, derivative="analytic",
             h: float | None = None, **forward_kw) -> Dataset:
    _check_positions((x,), "S3")
    sw = scatter_sweep(spec, _check_k(k), **forward_kw)
    return synthesize_s3(sw.k, sw.s21, x, noise, derivative, h, spec=spec)


# ---------------------------------------------------------------- files

def write_dataset(path, ds: Dataset, header=()) -> None:
    """CSV (one row per k, leading ``variant`` column) plus a ``.json`` sidecar."""
    path = Path(path)
    cls = RECORD_TYPES[ds.variant]
    names = list(cls.__dataclass_fields__)
    rows = [(ds.variant, *(getattr(r, n) for n in names)) for r in ds.records]
    io.write_table(path, ["variant", *names], rows, header)
    path.with_suffix(".json").write_text(json.dumps(ds.meta, indent=2, sort_keys=True) + "\n")


def read_dataset(path) -> Dataset:
    path = Path(path)
    cols, _ = io.read_table(path)
    if "variant" not in cols or len(cols["variant"]) == 0:
        raise ConfigError(f"{path} is not a phaseless dataset")
    variants = set(cols["variant"].tolist())
    if len(variants) != 1:
        raise ConfigError(f"{path} mixes dataset variants {sorted(variants)}")
    variant = variants.pop()
    cls = RECORD_TYPES[variant]
    names = list(cls.__dataclass_fields__)
    recs = [cls(*(float(cols[n][j]) for n in names)) for j in range(len(cols["variant"]))]
    sidecar = path.with_suffix(".json")
    meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
    return Dataset(variant, recs, meta)

