"""Command-line front end: check, twistor, reconstruct, construct, group, export.

Configs are YAML key-value documents; unknown keys are rejected so typos
fail loudly.  Exit codes: 0 success, 1 tolerance failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np
import yaml

from .cases import SurfaceCase, case_from_name
from .errors import SpaceformError
from .fundamental import FIELD_NAMES, FundamentalData, ambient_model
from .grids import Grid
from .integrability import equivalence_check, gcr_residuals, lax_residual
from .io import (
    read_field_csv,
    read_frames_csv,
    write_field_csv,
    write_frames_csv,
    write_obj_mesh,
    write_residual_report,
)
from .liegroup import GeneratorSpec, displayed_q, induced_action, lorentz_generator, phi_check
from .reconstruct import (
    DelbarInput,
    HolomorphicSpec,
    construct_delbar,
    construct_from_wxyz_curved,
    construct_from_wxyz_flat,
    integrate_frame,
    mean_curvature_and_isotropy,
)
from .twistor import (
    InvariantFamily,
    degeneracy_report,
    delbar_residual,
    family_labels,
    twistor_invariants,
)


class _InputError(Exception):
    """Malformed config / unreadable files; maps to exit code 2."""


def _load_config(path) -> dict:
    if path is None:
        raise _InputError("this subcommand needs --config PATH")
    try:
        with open(path, "r", encoding="utf-8") as f:
            cfg = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as exc:
        raise _InputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise _InputError(f"config {path} must be a mapping")
    return cfg


def _check_keys(cfg: dict, allowed, where="config"):
    unknown = set(cfg) - set(allowed)
    if unknown:
        raise _InputError(f"unknown {where} keys: {sorted(unknown)}")


def _require(cfg: dict, key, where="config"):
    if key not in cfg:
        raise _InputError(f"missing {where} key: {key}")
    return cfg[key]


def _load_data(cfg) -> FundamentalData:
    """FundamentalData from a config with case, L0 and named field files."""
    _check_keys(cfg, {"case", "L0", "fields", "tolerance"})
    case = _case(_require(cfg, "case"))
    L0 = _real(_require(cfg, "L0"), "L0")
    files = _require(cfg, "fields")
    if not isinstance(files, dict) or not files:
        raise _InputError("'fields' must map field names to CSV paths")
    _check_keys(files, FIELD_NAMES, where="fields")
    grid = None
    arrays = {}
    for fname, path in sorted(files.items()):
        try:
            g, _, vals = read_field_csv(path)
        except (OSError, SpaceformError) as exc:
            raise _InputError(f"field '{fname}': {exc}") from exc
        if np.iscomplexobj(vals):
            raise _InputError(f"field '{fname}': fundamental fields are real")
        if grid is None:
            grid = g
        elif g != grid:
            raise _InputError(f"field '{fname}' uses a different grid")
        arrays[fname] = vals
    for fname in FIELD_NAMES:
        arrays.setdefault(fname, np.zeros(grid.shape))
    return FundamentalData(model=ambient_model(case, L0), grid=grid, **arrays)


def _case(name) -> SurfaceCase:
    try:
        return case_from_name(str(name))
    except KeyError as exc:
        raise _InputError(str(exc.args[0])) from exc


def _real(x, what) -> float:
    try:
        return float(x)
    except (TypeError, ValueError) as exc:
        raise _InputError(f"{what} must be a real number, got {x!r}") from exc


def _grid(cfg) -> Grid:
    if not isinstance(cfg, dict):
        raise _InputError("'grid' must be a mapping")
    _check_keys(cfg, {"u0", "v0", "du", "dv", "nu", "nv"}, where="grid")
    try:
        return Grid(float(cfg["u0"]), float(cfg["v0"]), float(cfg["du"]),
                    float(cfg["dv"]), int(cfg["nu"]), int(cfg["nv"]))
    except (KeyError, TypeError, ValueError, SpaceformError) as exc:
        raise _InputError(f"bad grid: {exc}") from exc


def _tolerance(args, cfg, default):
    if args.tolerance is not None:
        return args.tolerance
    if "tolerance" in cfg:
        return _real(cfg["tolerance"], "tolerance")
    return default


def _report(out_dir, name, payload: dict):
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_check(args) -> int:
    cfg = _load_config(args.config)
    data = _load_data(cfg)
    tol = _tolerance(args, cfg, 100.0 * data.grid.h ** 2)
    res = gcr_residuals(data)
    residuals = dict(res.as_dict())
    residuals["lax"] = lax_residual(data)
    for label, comb in equivalence_check(data).items():
        residuals["equiv_" + (label or "main")] = comb
    summary = write_residual_report(args.out, "check", data.grid, residuals)
    worst = max(v["max"] for v in summary.values())
    argmax = {k: v["argmax"] for k, v in summary.items() if v["max"] > tol}
    _report(args.out, "check_report.json",
            {"tolerance": tol, "max_residual": worst, "passed": worst <= tol,
             "failures": argmax})
    if worst > tol:
        print(f"check: FAIL max residual {worst:.3e} > tolerance {tol:.3e} "
              f"at {argmax}")
        return 1
    print(f"check: OK max residual {worst:.3e} <= tolerance {tol:.3e}")
    return 0


def _cmd_twistor(args) -> int:
    cfg = _load_config(args.config)
    data = _load_data(cfg)
    inv = twistor_invariants(data)
    for label, fam in inv.families.items():
        for comp in ("W", "X", "Y", "Z", "phi", "psi", "delta"):
            name = comp + label
            write_field_csv(os.path.join(args.out, f"twistor_{name}.csv"),
                            data.grid, name, getattr(fam, comp))
    rep = degeneracy_report(data, inv)
    _report(args.out, "twistor_report.json", {
        "nondegenerate": bool(rep.nondegenerate),
        "min_abs_delta": {label or "main": float(np.min(np.abs(d)))
                          for label, d in rep.delta.items()},
        "max_K_minus_L0": float(np.max(np.abs(rep.K_minus_L0))),
        "max_normal_curvature": float(np.max(np.abs(rep.rperp))),
    })
    print(f"twistor: wrote invariants ({'non' if rep.nondegenerate else ''}degenerate)")
    return 0


def _cmd_reconstruct(args) -> int:
    cfg = _load_config(args.config)
    data = _load_data(cfg)
    tol = _tolerance(args, cfg, 100.0 * data.grid.h ** 2)
    ff = integrate_frame(data, check_transposed=True)
    write_frames_csv(os.path.join(args.out, "frames.csv"), data.grid, ff.frames)
    diag = {k: float(v) for k, v in ff.diagnostics.items()}
    worst = max(diag.values())
    _report(args.out, "reconstruct_report.json",
            {"tolerance": tol, "diagnostics": diag, "passed": worst <= tol})
    if worst > tol:
        print(f"reconstruct: FAIL max diagnostic {worst:.3e} > {tol:.3e}")
        return 1
    print(f"reconstruct: OK frames written, max diagnostic {worst:.3e}")
    return 0


def _load_invariants(cfg, case):
    """(grid, {label: InvariantFamily}) from per-component complex CSVs."""
    files = _require(cfg, "invariants")
    labels = family_labels(case)
    if not isinstance(files, dict):
        raise _InputError("'invariants' must map family labels to component files")
    _check_keys(files, {lab or "main" for lab in labels}, where="invariants")
    grid = None
    fams = {}
    for lab in labels:
        fam_cfg = _require(files, lab or "main", "invariants")
        if not isinstance(fam_cfg, dict):
            raise _InputError(f"invariants[{lab or 'main'}] must map W/X/Y/Z to files")
        _check_keys(fam_cfg, {"W", "X", "Y", "Z"}, where=f"invariants[{lab or 'main'}]")
        comps = {}
        for comp in ("W", "X", "Y", "Z"):
            try:
                g, _, vals = read_field_csv(_require(fam_cfg, comp, "invariant family"))
            except (OSError, SpaceformError) as exc:
                raise _InputError(f"invariant {comp}{lab}: {exc}") from exc
            if grid is None:
                grid = g
            elif g != grid:
                raise _InputError(f"invariant {comp}{lab} uses a different grid")
            comps[comp] = vals
        zero = np.zeros(grid.shape)
        fams[lab] = InvariantFamily(comps["W"], comps["X"], comps["Y"], comps["Z"],
                                    zero, zero, zero)
    return grid, fams


def _cmd_construct(args) -> int:
    cfg = _load_config(args.config)
    mode = _require(cfg, "mode")
    if mode == "delbar":
        _check_keys(cfg, {"mode", "L0", "grid", "p", "r", "tolerance"})
        grid = _grid(_require(cfg, "grid"))
        coeffs = _require(cfg, "p")
        if not isinstance(coeffs, (list, tuple)) or not coeffs:
            raise _InputError("'p' must be a non-empty coefficient list")
        try:
            p = HolomorphicSpec(tuple(
                complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
                for c in coeffs))
        except (TypeError, ValueError, IndexError) as exc:
            raise _InputError(f"bad holomorphic coefficients: {exc}") from exc
        inp = DelbarInput(L0=_real(_require(cfg, "L0"), "L0"), grid=grid, p=p,
                          r=_real(cfg.get("r", 0.0), "r"))
        data = construct_delbar(inp)
        inv = twistor_invariants(data)
        d1, d2 = delbar_residual(data, inv)
        rep = degeneracy_report(data, inv)
        H = mean_curvature_and_isotropy(data)["H"]
        extra = {
            "delbar_residual": float(max(np.max(np.abs(d1)), np.max(np.abs(d2)))),
            "nondegenerate": bool(rep.nondegenerate),
            "max_K_minus_L0": float(np.max(np.abs(rep.K_minus_L0))),
            "max_mean_curvature": float(max(np.max(np.abs(h)) for h in H)),
        }
    elif mode in ("wxyz-flat", "wxyz-curved"):
        _check_keys(cfg, {"mode", "case", "L0", "invariants", "tolerance"})
        case = _case(_require(cfg, "case"))
        grid, fams = _load_invariants(cfg, case)
        if mode == "wxyz-flat":
            data = construct_from_wxyz_flat(fams, case, grid)
        else:
            L0 = _real(_require(cfg, "L0"), "L0")
            data = construct_from_wxyz_curved(fams, L0, case, grid)
        extra = {}
    else:
        raise _InputError(f"unknown construct mode {mode!r}")
    for fname in FIELD_NAMES:
        write_field_csv(os.path.join(args.out, f"{fname}.csv"), data.grid,
                        fname, getattr(data, fname))
    res = gcr_residuals(data)
    summary = write_residual_report(args.out, "construct", data.grid, res.as_dict())
    _report(args.out, "construct_report.json",
            {"mode": mode, "gcr": summary, **extra})
    print(f"construct: wrote fundamental data (mode {mode}, "
          f"max GCR {res.max_abs():.3e})")
    return 0


def _cmd_group(args) -> int:
    cfg = _load_config(args.config) if args.config else {}
    _check_keys(cfg, {"words", "word_length", "seed", "tolerance"})
    words = int(cfg.get("words", 100))
    length = int(cfg.get("word_length", 5))
    seed = int(cfg.get("seed", 0))
    tol = _tolerance(args, cfg, 1e-9)
    rng = np.random.default_rng(seed)
    gen_err = 0.0
    for k in (1, 2, 3):
        for l in (1, 2):
            for t in rng.uniform(-1.5, 1.5, size=5):
                spec = GeneratorSpec(k, l, float(t))
                gen_err = max(gen_err, float(np.max(np.abs(
                    induced_action(lorentz_generator(spec)) - displayed_q(spec)))))
    word_specs = [
        [GeneratorSpec(int(rng.integers(1, 4)), int(rng.integers(1, 3)),
                       float(rng.uniform(-1.0, 1.0))) for _ in range(length)]
        for _ in range(words)
    ]
    hom_err = phi_check(word_specs)
    worst = max(gen_err, hom_err)
    _report(args.out, "group_report.json",
            {"generator_residual": gen_err, "homomorphism_residual": hom_err,
             "words": words, "word_length": length, "seed": seed,
             "tolerance": tol, "passed": worst <= tol})
    if worst > tol:
        print(f"group: FAIL max residual {worst:.3e} > {tol:.3e}")
        return 1
    print(f"group: OK max residual {worst:.3e} over {words} words")
    return 0


def _cmd_export(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"frames", "projection", "mesh"})
    path = _require(cfg, "frames")
    try:
        grid, frames = read_frames_csv(path)
    except (OSError, SpaceformError) as exc:
        raise _InputError(f"frames: {exc}") from exc
    n = frames.shape[2]
    proj = cfg.get("projection")
    if proj is None:
        proj = np.eye(3, n)
    else:
        proj = np.asarray(proj, dtype=float)
    if proj.shape != (3, n):
        raise _InputError(f"projection must be 3x{n}, got {proj.shape}")
    if np.linalg.matrix_rank(proj) < 3:
        raise _InputError("projection matrix has rank < 3")
    points = frames[..., :, 4] @ proj.T
    mesh = cfg.get("mesh", "surface.obj")
    write_obj_mesh(os.path.join(args.out, mesh), points)
    print(f"export: wrote {mesh} ({grid.nu}x{grid.nv} vertices)")
    return 0


_COMMANDS = {
    "check": _cmd_check,
    "twistor": _cmd_twistor,
    "reconstruct": _cmd_reconstruct,
    "construct": _cmd_construct,
    "group": _cmd_group,
    "export": _cmd_export,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spaceform",
        description="Surface compatibility checks, twistor invariants, frame "
                    "integration and constructions in 4-dimensional space forms.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("check", "compatibility (Gauss/Codazzi/Ricci and zero-curvature) residuals"),
        ("twistor", "export twistor invariant fields and the degeneracy report"),
        ("reconstruct", "integrate the frame field from fundamental data"),
        ("construct", "build fundamental data (wxyz-flat, wxyz-curved, delbar)"),
        ("group", "verify the Lorentz-to-SO(3,C) action on self-dual 2-vectors"),
        ("export", "project a frame field to a polygon mesh"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="YAML configuration file")
        sp.add_argument("--tolerance", type=float, default=None,
                        help="override the configured tolerance")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: SPACEFORM_THREADS or 1)")
        sp.add_argument("--out", default=".", help="output directory")
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("SPACEFORM_THREADS", "1") or 1)
    if threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    os.environ.setdefault("OMP_NUM_THREADS", str(threads))
    try:
        os.makedirs(args.out, exist_ok=True)
        return _COMMANDS[args.command](args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpaceformError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
