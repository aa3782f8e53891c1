import json
import os

import numpy as np
import pytest
import yaml

from conftest import sphere_data
from spaceform.cli import main
from spaceform.io import read_field_csv, write_field_csv
from spaceform.twistor import twistor_invariants


def _write_sphere(tmp_path, n=41):
    data = sphere_data(n=n)
    files = {}
    for name in ("lam", "alpha1", "alpha3"):
        path = tmp_path / f"{name}.csv"
        write_field_csv(path, data.grid, name, getattr(data, name))
        files[name] = str(path)
    return data, files


def _cfg(tmp_path, payload, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(payload))
    return str(path)


def test_check_sphere_passes(tmp_path, capsys):
    data, files = _write_sphere(tmp_path)
    cfg = _cfg(tmp_path, {"case": "riemannian", "L0": 0.0, "fields": files})
    out = tmp_path / "out"
    assert main(["check", "--config", cfg, "--out", str(out)]) == 0
    assert "check: OK" in capsys.readouterr().out
    report = json.loads((out / "check_report.json").read_text())
    assert report["passed"] and report["failures"] == {}
    assert (out / "check_gauss.csv").exists()


def test_check_noise_fails_with_argmax(tmp_path, capsys):
    data, files = _write_sphere(tmp_path)
    grid, _, lam = read_field_csv(files["lam"])
    rng = np.random.default_rng(3)
    write_field_csv(files["lam"], grid, "lam", lam + rng.normal(0, 0.1, grid.shape))
    cfg = _cfg(tmp_path, {"case": "riemannian", "L0": 0.0, "fields": files})
    out = tmp_path / "out"
    assert main(["check", "--config", cfg, "--out", str(out)]) == 1
    assert "FAIL" in capsys.readouterr().out
    report = json.loads((out / "check_report.json").read_text())
    assert not report["passed"]
    assert "gauss" in report["failures"]
    assert len(report["failures"]["gauss"]) == 2


def test_check_missing_file_is_input_error(tmp_path, capsys):
    cfg = _cfg(tmp_path, {"case": "riemannian", "L0": 0.0,
                          "fields": {"lam": str(tmp_path / "nope.csv")}})
    assert main(["check", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_check_unknown_config_key(tmp_path):
    _, files = _write_sphere(tmp_path, n=11)
    cfg = _cfg(tmp_path, {"case": "riemannian", "L0": 0.0, "fields": files,
                          "tollerance": 1.0})
    assert main(["check", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_check_bad_case_name(tmp_path):
    _, files = _write_sphere(tmp_path, n=11)
    cfg = _cfg(tmp_path, {"case": "klein", "L0": 0.0, "fields": files})
    assert main(["check", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_twistor_outputs(tmp_path, capsys):
    data, files = _write_sphere(tmp_path, n=21)
    cfg = _cfg(tmp_path, {"case": "riemannian", "L0": 0.0, "fields": files})
    out = tmp_path / "out"
    assert main(["twistor", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "twistor_report.json").read_text())
    assert report["nondegenerate"]
    _, name, W = read_field_csv(out / "twistor_W+.csv")
    assert np.max(np.abs(W)) < 1e-12   # sphere has W = 0 in both families


def test_reconstruct_and_export_pipeline(tmp_path, capsys):
    data, files = _write_sphere(tmp_path)
    cfg = _cfg(tmp_path, {"case": "riemannian", "L0": 0.0, "fields": files})
    out = tmp_path / "out"
    assert main(["reconstruct", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "reconstruct_report.json").read_text())
    assert report["passed"]

    ecfg = _cfg(tmp_path, {"frames": str(out / "frames.csv")}, "export.yaml")
    assert main(["export", "--config", ecfg, "--out", str(out)]) == 0
    obj = (out / "surface.obj").read_text().splitlines()
    assert sum(1 for l in obj if l.startswith("v ")) == data.grid.nu * data.grid.nv

    # rank-deficient projection is an input error
    bad = _cfg(tmp_path, {"frames": str(out / "frames.csv"),
                          "projection": [[1, 0, 0, 0], [0, 1, 0, 0],
                                         [1, 0, 0, 0]]}, "bad.yaml")
    assert main(["export", "--config", bad, "--out", str(out)]) == 2


def test_construct_delbar(tmp_path, capsys):
    cfg = _cfg(tmp_path, {
        "mode": "delbar", "L0": -1.0,
        "grid": {"u0": -0.4, "v0": -0.4, "du": 0.02, "dv": 0.02,
                 "nu": 41, "nv": 41},
        "p": [[0.0, 0.0], [1.0, 0.0]],
    })
    out = tmp_path / "out"
    assert main(["construct", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "construct_report.json").read_text())
    assert report["delbar_residual"] == 0.0
    assert report["max_mean_curvature"] < 1e-12
    assert max(v["max"] for v in report["gcr"].values()) < 100 * 0.02**2


def test_construct_wxyz_flat_round_trip(tmp_path):
    data = sphere_data(n=41)
    inv = twistor_invariants(data)
    inv_cfg = {}
    for label, fam in inv.families.items():
        comp_files = {}
        for comp in ("W", "X", "Y", "Z"):
            path = tmp_path / f"{comp}{label}.csv"
            write_field_csv(path, data.grid, comp,
                            np.asarray(getattr(fam, comp), dtype=complex))
            comp_files[comp] = str(path)
        inv_cfg[label] = comp_files
    cfg = _cfg(tmp_path, {"mode": "wxyz-flat", "case": "riemannian",
                          "L0": 0.0, "invariants": inv_cfg})
    out = tmp_path / "out"
    assert main(["construct", "--config", cfg, "--out", str(out)]) == 0
    _, _, lam = read_field_csv(out / "lam.csv")
    # flat construction fixes lam only up to an additive constant
    shift = lam - data.lam
    assert np.max(np.abs(shift - shift[0, 0])) < 10 * data.grid.h**2


def test_construct_unknown_mode(tmp_path):
    cfg = _cfg(tmp_path, {"mode": "bogus"})
    assert main(["construct", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_group_default_passes(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["group", "--out", str(out)]) == 0
    report = json.loads((out / "group_report.json").read_text())
    assert report["passed"]
    assert report["generator_residual"] < 1e-12


def test_group_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = _cfg(tmp_path, {"words": 10, "seed": 5})
    assert main(["group", "--config", cfg, "--out", str(a)]) == 0
    assert main(["group", "--config", cfg, "--out", str(b)]) == 0
    assert (a / "group_report.json").read_bytes() == (b / "group_report.json").read_bytes()


def test_missing_config_is_input_error(tmp_path, capsys):
    assert main(["check", "--out", str(tmp_path)]) == 2
    assert main(["check", "--config", str(tmp_path / "absent.yaml"),
                 "--out", str(tmp_path)]) == 2
