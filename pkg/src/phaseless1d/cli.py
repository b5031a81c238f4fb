"""Command-line front end: ``phaseless1d <subcommand> [flags]``.

Subcommands: forward, synthesize, recover, invert, pipeline, selftest.
Settings come from ``--config`` (JSON) with individual flags taking
precedence.  Exit codes: 0 ok, 2 configuration error, 3 degenerate
measurement geometry, 4 non-physical data, 5 inversion failure, 1 other
solver failures.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .errors import (ConfigError, DegenerateConfiguration, InversionError, NonPhysicalIntensity,
                     PhaselessError)
from .forward import Sweep, scatter_sweep
from .inversion import ReflectionTable, reconstruct_potential, rescatter, roundtrip_error, write_potential
from .phaseless import NoiseModel, build_s1, build_s2, build_s3, kgrid, read_dataset, write_dataset
from .potential import load as load_potential
from .potential import to_dict
from .recovery import EPS_DET, read_recovery, sweep_recover, write_recovery

EXIT_OK, EXIT_OTHER, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_NONPHYSICAL, EXIT_INVERSION = 0, 1, 2, 3, 4, 5

DEFAULTS = {
    "potential": None,
    "kmin": 0.05,
    "kmax": 40.0,
    "kcount": 2000,
    "positions": None,
    "method": "s3",
    "noise": 0.0,
    "seed": 0,
    "out": ".",
    "eps_det": EPS_DET,
    "derivative": "analytic",
    "fd_step": 1e-4,
    "window": "lanczos",
    "xmin": -1.0,
    "xmax": 3.0,
    "xstep": 0.01,
    "data": None,
}

DEFAULT_POSITIONS = {"s1": [-1.0, -1.25], "s2": [-1.0, -1.3, -1.7], "s3": [-1.0]}

log = logging.getLogger("phaseless1d")


def _positions(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad positions {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with run settings")
    common.add_argument("--potential", help="inline JSON description or path (JSON or grid CSV)")
    common.add_argument("--kmin", type=float)
    common.add_argument("--kmax", type=float)
    common.add_argument("--kcount", type=int)
    common.add_argument("--positions", type=_positions, help="x1[,x2[,x3]], all negative")
    common.add_argument("--method", choices=("s1", "s2", "s3"))
    common.add_argument("--noise", type=float, help="relative noise sigma")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--eps-det", dest="eps_det", type=float)
    common.add_argument("--derivative", choices=("analytic", "central"))
    common.add_argument("--fd-step", dest="fd_step", type=float)
    common.add_argument("--window", choices=("lanczos", "none"))
    common.add_argument("--xmin", type=float)
    common.add_argument("--xmax", type=float)
    common.add_argument("--xstep", type=float)
    common.add_argument("--data", help="input CSV (dataset for recover; recovery or sweep for invert)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="phaseless1d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"phaseless1d {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("forward", "sweep s21, s22 over the k-grid"),
        ("synthesize", "build a phaseless dataset"),
        ("recover", "recover s21 from phaseless data"),
        ("invert", "reconstruct the potential from s21"),
        ("pipeline", "potential -> data -> s21 -> potential, with an error report"),
        ("selftest", "run the invariant checks"),
    ]:
        sub.add_parser(name, parents=[common], help=text)
    return parser


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if isinstance(loaded.get("potential"), dict):
            loaded["potential"] = json.dumps(loaded["potential"])
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg["method"] = str(cfg["method"]).lower()
    if cfg["method"] not in DEFAULT_POSITIONS:
        raise ConfigError(f"unknown method {cfg['method']!r}")
    if cfg["positions"] is None:
        cfg["positions"] = DEFAULT_POSITIONS[cfg["method"]]
    cfg["positions"] = [float(x) for x in cfg["positions"]]
    want = {"s1": 2, "s2": 3, "s3": 1}[cfg["method"]]
    if len(cfg["positions"]) != want:
        raise ConfigError(f"method {cfg['method']} needs {want} position(s), got {cfg['positions']}")
    if any(x >= 0 for x in cfg["positions"]):
        raise ConfigError("measurement positions must be strictly negative")
    return cfg


def _header(cfg):
    hashed = {k: v for k, v in cfg.items() if k != "out"}
    return io.header_lines(hashed)


def _spec(cfg, required=True):
    if cfg["potential"] is None:
        if required:
            raise ConfigError("this subcommand needs --potential")
        return None
    return load_potential(cfg["potential"])


def _ks(cfg):
    return kgrid(cfg["kmin"], cfg["kmax"], cfg["kcount"])


def _dataset(cfg, spec):
    noise = NoiseModel(cfg["noise"], cfg["seed"])
    ks, pos, m = _ks(cfg), cfg["positions"], cfg["method"]
    if m == "s1":
        return build_s1(spec, *pos, ks, noise)
    if m == "s2":
        return build_s2(spec, *pos, ks, noise)
    h = cfg["fd_step"] if cfg["derivative"] == "central" else None
    return build_s3(spec, pos[0], ks, noise, cfg["derivative"], h)


def _xgrid(cfg):
    if cfg["xstep"] <= 0 or cfg["xmax"] <= cfg["xmin"]:
        raise ConfigError("invalid reconstruction grid")
    n = int(round((cfg["xmax"] - cfg["xmin"]) / cfg["xstep"])) + 1
    return np.linspace(cfg["xmin"], cfg["xmax"], n)


def _table_from_file(path) -> ReflectionTable:
    cols, _ = io.read_table(path)
    if "status" in cols:
        return ReflectionTable.from_recovery(read_recovery(path))
    if {"k", "re_s21", "im_s21"} <= set(cols):
        return ReflectionTable(cols["k"], cols["re_s21"] + 1j * cols["im_s21"])
    raise ConfigError(f"{path} is neither a recovery nor a forward sweep CSV")


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- commands

def cmd_forward(cfg, out):
    spec = _spec(cfg)
    sw = scatter_sweep(spec, _ks(cfg))
    io.write_table(out / "forward.csv", Sweep.COLUMNS, sw.rows(), _header(cfg))
    print(f"forward: {len(sw)} wavenumbers, max unitarity defect {sw.defect.max():.3e}")
    return EXIT_OK


def cmd_synthesize(cfg, out):
    ds = _dataset(cfg, _spec(cfg))
    path = out / f"dataset_{ds.variant}.csv"
    write_dataset(path, ds, _header(cfg))
    print(f"synthesize: {len(ds)} {ds.variant.upper()} records -> {path}")
    return EXIT_OK


def _recover(cfg, out):
    spec = None
    if cfg["data"]:
        ds = read_dataset(cfg["data"])
        reference = None
    else:
        spec = _spec(cfg)
        ds = _dataset(cfg, spec)
        reference = scatter_sweep(spec, ds.k).s21
    results, summary = sweep_recover(ds, reference, cfg["eps_det"])
    write_recovery(out / "recovery.csv", results, _header(cfg))
    if summary.n_ok == 0 and summary.flagged:
        status = summary.flagged[0][1]
        exc = DegenerateConfiguration if status == "degenerate" else NonPhysicalIntensity
        raise exc(f"no record could be recovered: {summary.flagged[0][2]}")
    return spec, ds, results, summary


def cmd_recover(cfg, out):
    _, ds, _, summary = _recover(cfg, out)
    _write_json(out / "recovery_summary.json", summary.as_dict())
    msg = f"recover: {summary.n_ok}/{summary.n_total} recovered ({ds.variant.upper()})"
    if summary.max_error is not None:
        msg += f", max |s21 error| {summary.max_error:.3e}"
    print(msg)
    for k, status, text in summary.flagged[:5]:
        print(f"  flagged k={k:.6g}: {status}: {text}", file=sys.stderr)
    return EXIT_OK


def cmd_invert(cfg, out):
    if not cfg["data"]:
        raise ConfigError("invert needs --data (recovery or forward sweep CSV)")
    table = _table_from_file(cfg["data"])
    rec = reconstruct_potential(table, _xgrid(cfg), window=cfg["window"])
    write_potential(out / "potential.csv", rec, _header(cfg))
    print(f"invert: {rec.x.size} points, peak |v| {rec.diagnostics['peak_abs']:.4g}")
    return EXIT_OK


def cmd_pipeline(cfg, out):
    cfg = {**cfg, "data": None}
    spec, ds, results, summary = _recover(cfg, out)
    ks = ds.k
    sw = scatter_sweep(spec, ks)
    io.write_table(out / "forward.csv", Sweep.COLUMNS, sw.rows(), _header(cfg))
    write_dataset(out / f"dataset_{ds.variant}.csv", ds, _header(cfg))
    table = ReflectionTable.from_recovery(results)
    rec = reconstruct_potential(table, _xgrid(cfg), window=cfg["window"])
    write_potential(out / "potential.csv", rec, _header(cfg))
    l1 = roundtrip_error(spec, rec)
    re_sw = rescatter(rec, ks)
    denom = max(float(np.linalg.norm(sw.s21)), 1e-12)
    rescatter_err = float(np.linalg.norm(re_sw.s21 - sw.s21) / denom)
    report = {
        "potential": to_dict(spec),
        "method": ds.variant,
        "recovery": summary.as_dict(),
        "max_unitarity_defect": float(sw.defect.max()),
        "roundtrip_l1_error": l1,
        "rescatter_relative_l2_error": rescatter_err,
        "reconstruction": rec.diagnostics,
    }
    _write_json(out / "report.json", report)
    print(f"pipeline ({ds.variant.upper()}): {summary.n_ok}/{summary.n_total} k recovered")
    if summary.max_error is not None:
        print(f"  max |s21 error|          {summary.max_error:.3e}")
    print(f"  round-trip L1 error      {l1:.4f}")
    print(f"  re-scatter rel. L2 error {rescatter_err:.4f}")
    return EXIT_OK


def cmd_selftest(cfg, out):
    from .selftest import run_selftest

    return EXIT_OK if run_selftest() else EXIT_OTHER


COMMANDS = {
    "forward": cmd_forward,
    "synthesize": cmd_synthesize,
    "recover": cmd_recover,
    "invert": cmd_invert,
    "pipeline": cmd_pipeline,
    "selftest": cmd_selftest,
}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, DegenerateConfiguration):
        return EXIT_DEGENERATE
    if isinstance(exc, NonPhysicalIntensity):
        return EXIT_NONPHYSICAL
    if isinstance(exc, InversionError):
        return EXIT_INVERSION
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    return EXIT_OTHER


def _glue_positions(argv):
    # "--positions -1,-2" would otherwise be read as a flag
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--positions":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--positions={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_positions(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out)
    except (PhaselessError, json.JSONDecodeError, OSError) as exc:
        code = EXIT_CONFIG if isinstance(exc, (json.JSONDecodeError, OSError)) else exit_code_for(exc)
        print(f"phaseless1d {args.command}: error: {exc}", file=sys.stderr)
        return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
