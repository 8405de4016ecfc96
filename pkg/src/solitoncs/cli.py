"""Command-line front end: ``solitoncs potential|states|verify``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import darboux as dx
from . import freeparticle as fp
from .config import OUT_ENV, RunConfig
from .errors import (
    BoundaryTruncationWarning,
    ConfigurationError,
    InvalidTransformationFunction,
    TruncationError,
)
from .verify import CHECKS, run_suite

SELECTORS = ("psi_n", "phi_n", "eta_n", "psi_z", "phi_z", "eta_z", "phi_minus1", "phi_p")


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return repr(float(v))


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _out_dir(cfg: RunConfig) -> Path:
    if not str(cfg.out_dir).strip():
        raise ConfigurationError("output path is empty")
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise ConfigurationError(f"output directory {out} is not writable")
    return out


def cmd_potential(cfg: RunConfig) -> list[Path]:
    cfg.validate()
    out = _out_dir(cfg)
    grid = cfg.grid
    seed = dx.soliton_seed(cfg.a)
    diagnostics = [dx.validate_u(seed, grid, t, cfg.dt).as_dict() for t in cfg.times]
    v1 = dx.transformed_potential(seed, grid, cfg.times[0])
    exact = dx.soliton_potential(cfg.a, grid.x)
    files = []
    if cfg.output_format in ("", "csv"):
        path = out / "potential.csv"
        _write_csv(path, ["x", "V1"], ([_fmt(x), _fmt(v)] for x, v in zip(grid.x, v1)))
        files.append(path)
    meta = {
        "a": cfg.a,
        "grid": [cfg.x_min, cfg.x_max, cfg.n_points],
        "time": cfg.times[0],
        "minimum": float(v1.min()),
        "max_deviation_from_closed_form": float(np.abs(v1 - exact).max()),
        "closed_form": "V1 = -2 a^2 sech^2(a x)",
        "transformation_function": seed.name,
        "diagnostics": diagnostics,
    }
    if cfg.output_format == "json":
        meta["x"] = grid.x.tolist()
        meta["V1"] = v1.tolist()
    path = out / "potential.json"
    _write_json(path, meta)
    files.append(path)
    return files


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def state_values(cfg: RunConfig, which: str, t: float, index=None, z=None, p=None):
    grid, a = cfg.grid, cfg.a
    if which in ("psi_n", "phi_n", "eta_n"):
        if index is None:
            raise UsageError(f"{which} needs --index")
        if which == "psi_n":
            return fp.psi_n(index, grid, t, max_n=cfg.max_n)
        if which == "phi_n":
            return dx.phi_n(index, grid, t, a, max_n=cfg.max_n)
        return dx.eta_n(index, grid, t, a, cfg.nodes, max_n=cfg.max_n)
    if which in ("psi_z", "phi_z", "eta_z"):
        if z is None:
            raise UsageError(f"{which} needs --z")
        params = fp.CoherentParams(z, min(fp.required_truncation(z), cfg.max_n))
        if fp.coherent_tail(z, params.truncation) >= fp.COHERENT_TAIL:
            need = fp.required_truncation(z)
            raise TruncationError(
                f"|z|={abs(z):.4g} needs truncation N >= {need}, above max_n={cfg.max_n}",
                required=need)
        if which == "psi_z":
            return fp.coherent_psi_z(params, grid, t, max_n=cfg.max_n)
        if which == "phi_z":
            if params.truncation > cfg.max_n - 1:
                raise TruncationError(
                    f"phi_z at |z|={abs(z):.4g} needs N={params.truncation} + 1 basis states, "
                    f"above max_n={cfg.max_n}", required=params.truncation + 1)
            return dx.phi_z(params, grid, t, a, max_n=cfg.max_n)
        return dx.eta_z(params, grid, t, a, nodes=cfg.nodes, max_n=cfg.max_n)
    if which == "phi_minus1":
        return dx.phi_minus1(a, grid, t)
    if which == "phi_p":
        if p is None:
            raise UsageError("phi_p needs --p")
        return dx.phi_p(p, grid, t, a)
    raise UsageError(f"unknown state selector {which!r}; choose from {', '.join(SELECTORS)}")


def cmd_states(cfg: RunConfig, which: str, index=None, z=None, p=None) -> list[Path]:
    cfg.validate()
    if which not in SELECTORS:
        raise UsageError(f"unknown state selector {which!r}; choose from {', '.join(SELECTORS)}")
    out = _out_dir(cfg)
    files = []
    multi = len(cfg.times) > 1
    for t in cfg.times:
        state = state_values(cfg, which, t, index, z, p)
        v = state.values
        stem = which if index is None or which not in ("psi_n", "phi_n", "eta_n") else f"{which}{index}"
        if multi:
            stem += f"_t{t:g}"
        if cfg.output_format == "json":
            path = out / f"{stem}.json"
            _write_json(path, {"state": which, "index": index, "z": None if z is None else [z.real, z.imag],
                               "p": p, "a": cfg.a, "time": t, "x": cfg.grid.x.tolist(),
                               "re": v.real.tolist(), "im": v.imag.tolist(),
                               "abs2": (np.abs(v) ** 2).tolist()})
        else:
            path = out / f"{stem}.csv"
            _write_csv(path, ["x", "re", "im", "abs2"],
                       ([_fmt(x), _fmt(c.real), _fmt(c.imag), _fmt(abs(c) ** 2)]
                        for x, c in zip(cfg.grid.x, v)))
        files.append(path)
    return files


def cmd_verify(cfg: RunConfig, check: str = "all"):
    """Run checks; returns (reports, files).  The report file holds no timings."""
    if check != "all" and check not in CHECKS:
        raise UsageError(f"unknown check {check!r}; valid names: all, {', '.join(CHECKS)}")
    reports = run_suite(cfg, check)
    out = _out_dir(cfg)
    report_path = out / "report.json"
    # the output location is left out so reruns elsewhere stay byte-identical
    settings = {k: v for k, v in cfg.to_dict().items() if k != "out_dir"}
    _write_json(report_path, {"config": settings, "checks": [r.to_dict() for r in reports],
                              "all_pass": all(r.passed for r in reports)})
    timing_path = out / "timings.json"
    _write_json(timing_path, {r.name: r.seconds for r in reports})
    return reports, [report_path, timing_path]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (flat RunConfig fields; unknown keys rejected)")
    common.add_argument("--a", type=float, help="soliton parameter a > 0")
    common.add_argument("--out", help=f"output directory (default: ${OUT_ENV} if set, else config out_dir)")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--time", type=float, action="append",
                        help="time sample; repeat for several (default: config times)")

    parser = argparse.ArgumentParser(
        prog="solitoncs",
        description="Darboux-transformed coherent states for the sech^2 soliton well.",
        epilog=f"Environment: {OUT_ENV} overrides the output directory unless --out is given.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("potential", parents=[common], help="write V1(x) and transformation diagnostics")
    st = sub.add_parser("states", parents=[common], help="write a sampled state as x, re, im, abs2")
    st.add_argument("which", choices=SELECTORS)
    st.add_argument("--index", type=int, help="basis index n")
    st.add_argument("--z", help="coherent-state label, e.g. 1+0.5j")
    st.add_argument("--p", type=float, help="momentum of a scattering state")
    ver = sub.add_parser("verify", parents=[common], help="run the verification suite")
    ver.add_argument("--check", default="all",
                     help=f"check name or 'all'; one of: {', '.join(CHECKS)}")
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.a is not None:
        cfg.a = args.a
    env_out = os.environ.get(OUT_ENV)
    if args.out is not None:
        cfg.out_dir = args.out
    elif env_out is not None:
        cfg.out_dir = env_out
    if args.format:
        cfg.output_format = args.format
    if args.time:
        cfg.times = list(args.time)
    return cfg.validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "potential":
            files = cmd_potential(cfg)
        elif args.command == "states":
            z = _parse_complex(args.z) if args.z is not None else None
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", BoundaryTruncationWarning)
                files = cmd_states(cfg, args.which, args.index, z, args.p)
        else:
            reports, files = cmd_verify(cfg, args.check)
            for r in reports:
                print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}")
            for f in files:
                print(f)
            return 0 if all(r.passed for r in reports) else 1
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"solitoncs: error: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, TruncationError, InvalidTransformationFunction) as exc:
        print(f"solitoncs: error: {exc}", file=sys.stderr)
        return 2
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
