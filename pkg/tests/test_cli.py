import json

import numpy as np
import pytest

from dirstft import Grid, dstft_fast, gaussian_window
from dirstft.cli import main
from dirstft.direction import build_frame
from dirstft.fixtures import gaussian
from dirstft.sigio import read_field, read_signal

from dirstft import grids


def run(tmp_path, command, cfg, *extra):
    path = tmp_path / f"{command}.json"
    path.write_text(json.dumps(cfg))
    return main([command, "--config", str(path), *extra])


def gen_gaussian(tmp_path, name="f.dstf", counts=(64,), lo=(-8,), hi=(8,),
                 params=None):
    cfg = {
        "schema_version": 1,
        "kind": "gaussian",
        "grid": {"bounds": [list(lo), list(hi)], "counts": list(counts)},
        "params": params or {"sigma": 1.0},
        "out": str(tmp_path / name),
    }
    assert run(tmp_path, "gen", cfg) == 0
    return tmp_path / name


def test_gen_writes_signal_and_sidecar(tmp_path):
    out = gen_gaussian(tmp_path)
    f = read_signal(out)
    ref = gaussian(Grid.from_bounds([-8], [8], [64]), sigma=1.0)
    assert np.allclose(f.values, ref.values)
    meta = json.loads((tmp_path / "f.dstf.json").read_text())
    assert meta["kind"] == "gaussian"
    assert meta["boundary_mass_ok"] is True


def test_gen_sheet_sidecar_has_ground_truth(tmp_path):
    cfg = {
        "schema_version": 1,
        "kind": "heaviside_sheet",
        "grid": {"bounds": [[-4, -4], [4, 4]], "counts": [32, 32]},
        "params": {"u": [1.0, 0.0], "c": 0.0},
        "out": str(tmp_path / "sheet.dstf"),
    }
    assert run(tmp_path, "gen", cfg) == 0
    meta = json.loads((tmp_path / "sheet.dstf.json").read_text())
    assert "singular" in meta
    assert meta["singular"]["offset"] == 0.0


def test_analyze_matches_library(tmp_path):
    sig = gen_gaussian(tmp_path, counts=(32, 32), lo=(-4, -4), hi=(4, 4))
    cfg = {
        "schema_version": 1,
        "signal": str(sig),
        "window": {"kind": "gaussian", "sigma": [1.0],
                   "grid": {"bounds": [[-4], [4]], "counts": [32]}},
        "frame": {"u": [[1.0, 0.0]]},
        "out": str(tmp_path / "F.dstf"),
    }
    assert run(tmp_path, "analyze", cfg) == 0
    F = read_field(tmp_path / "F.dstf")
    f = read_signal(sig)
    win = gaussian_window(Grid.from_bounds([-4], [4], [32]), [1.0])
    ref = dstft_fast(f, win, build_frame([[1.0, 0.0]]))
    assert np.allclose(F.values, ref.values)


def test_synthesize_default_out_grid(tmp_path):
    sig = gen_gaussian(tmp_path, counts=(64,))
    win_cfg = {"kind": "gaussian", "sigma": [1.0],
               "grid": {"bounds": [[-8], [8]], "counts": [64]}}
    assert run(tmp_path, "analyze", {
        "schema_version": 1, "signal": str(sig), "window": win_cfg,
        "frame": {"u": [[1.0]]}, "out": str(tmp_path / "F.dstf"),
    }) == 0
    assert run(tmp_path, "synthesize", {
        "schema_version": 1, "field": str(tmp_path / "F.dstf"),
        "window": win_cfg, "out": str(tmp_path / "rec.dstf"),
    }) == 0
    rec = read_signal(tmp_path / "rec.dstf")
    f = read_signal(sig)
    assert rec.grid == f.grid
    # unnormalized synthesis: rec = (g, g) f up to quadrature error
    scale = 2 ** -0.5
    err = np.linalg.norm(rec.values - scale * f.values)
    assert err / np.linalg.norm(scale * f.values) < 1e-3


def roundtrip_cfg(tmp_path, sig, tolerance=1e-3):
    return {
        "schema_version": 1,
        "signal": str(sig),
        "window_g": {"kind": "gaussian", "sigma": [1.0],
                     "grid": {"bounds": [[-8], [8]], "counts": [64]}},
        "frame": {"u": [[1.0]]},
        "tolerance": tolerance,
        "report": str(tmp_path / "report.json"),
    }


def test_roundtrip_passes_at_default_tolerance(tmp_path, capsys):
    sig = gen_gaussian(tmp_path)
    assert run(tmp_path, "roundtrip", roundtrip_cfg(tmp_path, sig)) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["rel_l2_error"] <= 1e-3
    assert set(report) == {"rel_l2_error", "max_abs_error", "pairing_value",
                           "timings"}


def test_roundtrip_fails_at_zero_tolerance(tmp_path):
    sig = gen_gaussian(tmp_path)
    assert run(tmp_path, "roundtrip",
               roundtrip_cfg(tmp_path, sig, tolerance=0.0)) == 1


def test_roundtrip_inadmissible_pairing_rejected(tmp_path):
    sig = gen_gaussian(tmp_path)
    cfg = roundtrip_cfg(tmp_path, sig)
    # an odd custom window is orthogonal to the even Gaussian
    g = Grid.from_bounds([-8], [8], [64])
    t = g.axis(0)
    from dirstft.sigio import write_signal
    from dirstft.grids import Signal
    odd = Signal(g, (t * np.exp(-np.pi * t ** 2)).astype(complex))
    write_signal(tmp_path / "odd.dstf", odd)
    cfg["window_phi"] = {"kind": "custom", "path": str(tmp_path / "odd.dstf")}
    assert run(tmp_path, "roundtrip", cfg) == 2


def sheet_wavefront_cfg(tmp_path, threshold=1.0):
    cfg = {
        "schema_version": 1,
        "kind": "delta_sheet",
        "grid": {"bounds": [[-4, -4], [4, 4]], "counts": [32, 32]},
        "params": {"u": [1.0, 0.0], "c": 0.0},
        "out": str(tmp_path / "sheet.dstf"),
    }
    assert run(tmp_path, "gen", cfg) == 0
    return {
        "schema_version": 1,
        "signal": str(tmp_path / "sheet.dstf"),
        "window": {"kind": "gevrey_bump", "radius": 0.5, "alpha": 2.0,
                   "grid": {"bounds": [[-2], [2]], "counts": [32]}},
        "frame": {"u": [[1.0, 0.0]]},
        "alpha": 2.0,
        "threshold_N": threshold,
        "cones": {"count": 8, "r_min": 0.5},
        "cells": [{"center": [0.0], "radius": 0.25},
                  {"center": [2.0], "radius": 0.25}],
        "out_json": str(tmp_path / "wf.json"),
        "out_csv": str(tmp_path / "wf.csv"),
    }


def test_wavefront_verdict_pass(tmp_path, capsys):
    cfg = sheet_wavefront_cfg(tmp_path)
    assert run(tmp_path, "wavefront", cfg) == 0
    out = json.loads((tmp_path / "wf.json").read_text())
    assert out["comparison"]["verdict"] == "PASS"
    sing = [e for e in out["entries"] if not e["regular"]]
    assert len(sing) == 2
    csv_lines = (tmp_path / "wf.csv").read_text().strip().splitlines()
    assert csv_lines[0] == "cell_center,cone_center,N_hat,regular"
    assert len(csv_lines) == 1 + len(out["entries"])


def test_wavefront_verdict_fail_on_wrong_truth(tmp_path):
    # tamper with the sidecar: claim the jump sits at offset 2 instead of 0
    cfg = sheet_wavefront_cfg(tmp_path)
    sidecar = tmp_path / "sheet.dstf.json"
    meta = json.loads(sidecar.read_text())
    meta["singular"]["offset"] = 2.0
    sidecar.write_text(json.dumps(meta))
    assert run(tmp_path, "wavefront", cfg) == 1
    out = json.loads((tmp_path / "wf.json").read_text())
    assert out["comparison"]["verdict"] == "FAIL"


def test_unknown_config_key_rejected(tmp_path):
    sig = gen_gaussian(tmp_path)
    cfg = roundtrip_cfg(tmp_path, sig)
    cfg["tolerence"] = 1e-3          # typo must be caught, not ignored
    assert run(tmp_path, "roundtrip", cfg) == 2


def test_bad_schema_version_rejected(tmp_path):
    cfg = {"schema_version": 99, "kind": "gaussian",
           "grid": {"bounds": [[-8], [8]], "counts": [64]},
           "out": str(tmp_path / "x.dstf")}
    assert run(tmp_path, "gen", cfg) == 2


def test_missing_config_rejected(tmp_path):
    assert main(["gen"]) == 2
    assert main(["analyze", "--config", str(tmp_path / "absent.json")]) == 2


def test_selftest_pristine(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "0 failure(s)" in out
    assert "FAIL" not in out


def test_selftest_detects_injected_scale_fault(monkeypatch, capsys):
    monkeypatch.setattr(grids, "_SCALE_FAULT", 1.001)
    code = main(["selftest"])
    assert code == 1
    out = capsys.readouterr().out
    parseval_line = [l for l in out.splitlines() if l.startswith("Parseval")][0]
    assert parseval_line.endswith("FAIL")


def test_selftest_oracle_cap_skips(tmp_path, capsys):
    cfg = tmp_path / "st.json"
    cfg.write_text(json.dumps({"schema_version": 1, "oracle_cap": 0}))
    with pytest.warns(UserWarning, match="skipped"):
        code = main(["selftest", "--config", str(cfg)])
    assert code == 0
    out = capsys.readouterr().out
    assert out.count("SKIPPED") >= 2
