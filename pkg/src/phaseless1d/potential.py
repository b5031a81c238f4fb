"""Real potentials supported on the half-line x >= 0.

Three concrete representations are supported:

``piecewise``
    constant values on disjoint half-open segments ``[a, b)``; the zero,
    square-barrier and double-barrier presets resolve to this kind.
``grid``
    node values on an increasing grid, linearly interpolated, zero outside
    the node range.
``gaussian``
    ``A exp(-(x - c)^2 / (2 w^2))`` restricted to ``[start, end]``.

Every potential has compact support ``[0, L]``; the forward solver starts
its integration at ``L``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import InvalidPotential

__all__ = [
    "PotentialSpec",
    "zero",
    "square_barrier",
    "double_barrier",
    "truncated_gaussian",
    "piecewise_constant",
    "grid_sampled",
    "validate",
    "evaluate",
    "translate",
    "l11_norm",
    "from_dict",
    "to_dict",
    "load",
    "read_grid_csv",
    "write_grid_csv",
]

KINDS = ("piecewise", "grid", "gaussian")

# Decaying presets are cut where |v| drops below this level.
GAUSSIAN_CUTOFF = 1e-12


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    segments: tuple = ()
    nodes: tuple = ()
    values: tuple = ()
    gaussian: tuple = ()  # (amplitude, center, width, start, end)
    label: str = ""
    truncation_bound: float = 0.0

    @cached_property
    def _nodes(self):
        return np.asarray(self.nodes, dtype=float)

    @cached_property
    def _values(self):
        return np.asarray(self.values, dtype=float)

    @property
    def support_end(self) -> float:
        if self.kind == "piecewise":
            return max((b for _, b, _ in self.segments), default=0.0)
        if self.kind == "grid":
            return float(self.nodes[-1])
        return float(self.gaussian[4])

    @property
    def support_start(self) -> float:
        if self.kind == "piecewise":
            return min((a for a, _, _ in self.segments), default=0.0)
        if self.kind == "grid":
            return float(self.nodes[0])
        return float(self.gaussian[3])

    @property
    def is_zero(self) -> bool:
        if self.kind == "piecewise":
            return all(val == 0.0 for _, _, val in self.segments)
        if self.kind == "grid":
            return not np.any(self._values)
        return self.gaussian[0] == 0.0

    def breakpoints(self) -> np.ndarray:
        """Points in [0, L] where v may jump, plus both ends; sorted, unique."""
        pts = {0.0, self.support_end}
        if self.kind == "piecewise":
            for a, b, _ in self.segments:
                pts.update((a, b))
        elif self.kind == "grid":
            pts.update((self.nodes[0], self.nodes[-1]))
        else:
            pts.update(self.gaussian[3:5])
        return np.array(sorted(pts))

    def pieces(self):
        """(a, b, value) covering [0, L] for piecewise potentials, zeros included."""
        if self.kind != "piecewise":
            raise TypeError("pieces() is defined for piecewise potentials only")
        out = []
        pos = 0.0
        for a, b, val in sorted(self.segments):
            if a > pos:
                out.append((pos, a, 0.0))
            out.append((a, b, val))
            pos = b
        return out

    def __call__(self, x):
        return evaluate(self, x)


# ---------------------------------------------------------------- presets

def zero() -> PotentialSpec:
    return PotentialSpec("piecewise", label="zero")


def piecewise_constant(segments, label="piecewise") -> PotentialSpec:
    segs = tuple(sorted((float(a), float(b), float(v)) for a, b, v in segments))
    return validate(PotentialSpec("piecewise", segments=segs, label=label))


def square_barrier(V0: float, L: float) -> PotentialSpec:
    return piecewise_constant([(0.0, L, V0)], label=f"square-barrier(V0={V0}, L={L})")


def double_barrier(V0: float, L: float, gap: float) -> PotentialSpec:
    """Two barriers of height ``V0`` and width ``L`` separated by ``gap``."""
    return piecewise_constant(
        [(0.0, L, V0), (L + gap, 2 * L + gap, V0)],
        label=f"double-barrier(V0={V0}, L={L}, gap={gap})",
    )


def truncated_gaussian(A: float, center: float, width: float, L: float | None = None) -> PotentialSpec:
    """Gaussian bump cut to [0, L].

    With ``L=None`` the support end is placed where ``|v|`` falls below
    ``GAUSSIAN_CUTOFF``; ``truncation_bound`` records the largest value
    discarded by the right-hand cut.
    """
    if width <= 0:
        raise InvalidPotential("gaussian width must be positive")
    if L is None:
        if A == 0:
            L = 0.0
        else:
            L = center + width * math.sqrt(2.0 * math.log(max(abs(A) / GAUSSIAN_CUTOFF, 1.0)))
        L = max(L, 0.0)
    tail = abs(A) if L <= center else abs(A) * math.exp(-((L - center) ** 2) / (2 * width**2))
    spec = PotentialSpec(
        "gaussian",
        gaussian=(float(A), float(center), float(width), 0.0, float(L)),
        label=f"truncated-gaussian(A={A}, center={center}, width={width}, L={L:.6g})",
        truncation_bound=tail,
    )
    return validate(spec)


def grid_sampled(x, v, label="grid") -> PotentialSpec:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise InvalidPotential("grid potential needs matching 1-D x and v arrays")
    return validate(PotentialSpec("grid", nodes=tuple(x.tolist()), values=tuple(v.tolist()), label=label))


# ------------------------------------------------------------- operations

def validate(spec: PotentialSpec) -> PotentialSpec:
    if spec.kind not in KINDS:
        raise InvalidPotential(f"unknown potential kind {spec.kind!r}")
    if spec.kind == "piecewise":
        prev_end = -math.inf
        for a, b, val in sorted(spec.segments):
            if not all(math.isfinite(t) for t in (a, b, val)):
                raise InvalidPotential("non-finite value in segment")
            if a < 0:
                raise InvalidPotential(f"support violates x >= 0: segment starts at {a}")
            if b <= a:
                raise InvalidPotential(f"empty or reversed segment ({a}, {b})")
            if a < prev_end:
                raise InvalidPotential("overlapping segments")
            prev_end = b
    elif spec.kind == "grid":
        x, v = spec._nodes, spec._values
        if x.size < 2 or x.size != v.size:
            raise InvalidPotential("grid potential needs at least two nodes")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise InvalidPotential("non-finite grid value")
        if x[0] < 0:
            raise InvalidPotential(f"support violates x >= 0: first node at {x[0]}")
        if np.any(np.diff(x) <= 0):
            raise InvalidPotential("grid nodes must be strictly increasing")
    else:
        if len(spec.gaussian) != 5 or not all(math.isfinite(t) for t in spec.gaussian):
            raise InvalidPotential("non-finite gaussian parameter")
        _, _, w, start, end = spec.gaussian
        if w <= 0:
            raise InvalidPotential("gaussian width must be positive")
        if start < 0:
            raise InvalidPotential(f"support violates x >= 0: starts at {start}")
        if end < start:
            raise InvalidPotential("gaussian support end precedes start")
    return spec


def evaluate(spec: PotentialSpec, x):
    """v(x), vectorised; exactly zero outside the support."""
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa)
    if spec.kind == "piecewise":
        for a, b, val in spec.segments:
            out[(xa >= a) & (xa < b)] = val
    elif spec.kind == "grid":
        nodes = spec._nodes
        inside = (xa >= nodes[0]) & (xa <= nodes[-1])
        out[inside] = np.interp(xa[inside], nodes, spec._values)
    else:
        A, c, w, start, end = spec.gaussian
        inside = (xa >= start) & (xa <= end)
        out[inside] = A * np.exp(-((xa[inside] - c) ** 2) / (2 * w * w))
    if np.ndim(x) == 0:
        return float(out)
    return out


def translate(spec: PotentialSpec, y: float) -> PotentialSpec:
    """The shifted potential x -> v(x - y); ``y`` must be nonnegative."""
    if not math.isfinite(y) or y < 0:
        raise InvalidPotential(f"shift y={y} would move support into x < 0")
    if y == 0:
        return spec
    label = f"{spec.label} shifted by {y}"
    if spec.kind == "piecewise":
        segs = tuple((a + y, b + y, v) for a, b, v in spec.segments)
        return validate(replace(spec, segments=segs, label=label))
    if spec.kind == "grid":
        return validate(replace(spec, nodes=tuple((spec._nodes + y).tolist()), label=label))
    A, c, w, start, end = spec.gaussian
    return validate(replace(spec, gaussian=(A, c + y, w, start + y, end + y), label=label))


def l11_norm(spec: PotentialSpec) -> float:
    """Weighted norm  int (1 + |x|) |v(x)| dx  over the support."""
    if spec.kind == "piecewise":
        return float(sum(abs(v) * ((b - a) + (b * b - a * a) / 2) for a, b, v in spec.segments))
    if spec.kind == "grid":
        # split at sign changes so |v| is linear on each piece; Simpson is then exact
        x, v = spec._nodes, spec._values
        total = 0.0
        for x0, x1, v0, v1 in zip(x[:-1], x[1:], v[:-1], v[1:]):
            cuts = [x0, x1]
            if v0 * v1 < 0:
                cuts.insert(1, x0 + (x1 - x0) * v0 / (v0 - v1))
            for a, b in zip(cuts[:-1], cuts[1:]):
                fa = (1 + a) * abs(np.interp(a, (x0, x1), (v0, v1)))
                fb = (1 + b) * abs(np.interp(b, (x0, x1), (v0, v1)))
                m = 0.5 * (a + b)
                fm = (1 + m) * abs(np.interp(m, (x0, x1), (v0, v1)))
                total += (b - a) * (fa + 4 * fm + fb) / 6
        return float(total)
    A, c, w, start, end = spec.gaussian
    if end == start or A == 0:
        return 0.0
    val, _ = integrate.quad(
        lambda t: (1 + t) * abs(A) * math.exp(-((t - c) ** 2) / (2 * w * w)),
        start, end, points=[c] if start < c < end else None, epsabs=1e-14, epsrel=1e-12,
    )
    return float(val)


# -------------------------------------------------------------- JSON / CSV

def from_dict(desc: dict, base_dir: Path | None = None) -> PotentialSpec:
    """Build a potential from ``{"kind": ..., "params": {...}}``.

    Accepted kinds: ``zero``, ``square-barrier`` (V0, L), ``double-barrier``
    (V0, L, gap), ``truncated-gaussian`` (A, center, width[, L]),
    ``piecewise`` (segments), ``grid`` (x and v, or path to a CSV file).
    An optional ``shift`` parameter applies ``translate`` afterwards.
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise InvalidPotential("potential description must be an object with a 'kind'")
    kind = desc["kind"]
    p = dict(desc.get("params", {}))
    shift = float(p.pop("shift", 0.0))
    try:
        if kind == "zero":
            spec = zero()
        elif kind == "square-barrier":
            spec = square_barrier(float(p["V0"]), float(p["L"]))
        elif kind == "double-barrier":
            spec = double_barrier(float(p["V0"]), float(p["L"]), float(p["gap"]))
        elif kind == "truncated-gaussian":
            L = p.get("L")
            spec = truncated_gaussian(float(p["A"]), float(p["center"]), float(p["width"]),
                                      None if L is None else float(L))
        elif kind == "piecewise":
            spec = piecewise_constant(p["segments"], label=p.get("label", "piecewise"))
        elif kind == "grid":
            if "path" in p:
                path = Path(p["path"])
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                spec = read_grid_csv(path)
            else:
                spec = grid_sampled(p["x"], p["v"])
        else:
            raise InvalidPotential(f"unknown potential kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise InvalidPotential(f"bad parameters for {kind!r}: {exc}") from exc
    return translate(spec, shift) if shift else spec


def to_dict(spec: PotentialSpec) -> dict:
    """Resolved (lossless) description; ``from_dict(to_dict(s)) == s`` up to labels."""
    if spec.kind == "piecewise":
        params = {"segments": [list(s) for s in spec.segments], "label": spec.label}
    elif spec.kind == "grid":
        params = {"x": list(spec.nodes), "v": list(spec.values)}
    else:
        A, c, w, start, end = spec.gaussian
        if start != 0.0:
            return {"kind": "truncated-gaussian",
                    "params": {"A": A, "center": c - start, "width": w, "L": end - start, "shift": start}}
        params = {"A": A, "center": c, "width": w, "L": end}
        return {"kind": "truncated-gaussian", "params": params}
    return {"kind": spec.kind, "params": params}


def load(text_or_path: str) -> PotentialSpec:
    """Parse an inline JSON description or read one from a file."""
    text = text_or_path.strip()
    if text.startswith("{"):
        return from_dict(json.loads(text))
    path = Path(text_or_path)
    if not path.exists():
        raise InvalidPotential(f"potential file {path} does not exist")
    if path.suffix.lower() == ".csv":
        return read_grid_csv(path)
    return from_dict(json.loads(path.read_text()), base_dir=path.parent)


def read_grid_csv(path) -> PotentialSpec:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(line for line in fh if not line.lstrip().startswith("#")):
            if not row:
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                continue  # header line
    if not rows:
        raise InvalidPotential(f"no numeric rows in {path}")
    x, v = zip(*rows)
    return grid_sampled(x, v, label=Path(path).name)


def write_grid_csv(path, x, v, header_lines=()) -> None:
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("x,v\n")
        for xi, vi in zip(x, v):
            fh.write(f"{xi:.17g},{vi:.17g}\n")
