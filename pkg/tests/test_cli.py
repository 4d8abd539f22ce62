import json

import numpy as np
import pytest

from dehnfill.cli import main


def _read(out_dir):
    report = (out_dir / "report.csv").read_text().strip().splitlines()
    summary = json.loads((out_dir / "summary.json").read_text())
    manifest = json.loads((out_dir / "manifest.json").read_text())
    return report, summary, manifest


def test_curvature_blackhole(tmp_path):
    rc = main(["curvature", "--n", "4", "--profile", "blackhole", "--m", "1",
               "--grid", "1.3:10:64", "--out-dir", str(tmp_path)])
    assert rc == 0
    report, summary, manifest = _read(tmp_path)
    assert report[0] == "r,K12,K1perp,Kperp,ric11,ricperp,scalar,deficit_sup"
    assert len(report) == 65
    deficits = [float(line.split(",")[-1]) for line in report[1:]]
    assert max(deficits) < 1e-10
    assert summary["max_deficit"] < 1e-10
    assert summary["rows"] == 64
    for key in ("command", "config", "version", "timestamp", "input_hashes"):
        assert key in manifest
    assert manifest["command"] == "curvature"


def test_curvature_cusp_constant(tmp_path):
    rc = main(["curvature", "--n", "4", "--profile", "cusp",
               "--grid", "0.5:20:32", "--out-dir", str(tmp_path)])
    assert rc == 0
    report, summary, _ = _read(tmp_path)
    for line in report[1:]:
        vals = [float(tok) for tok in line.split(",")]
        assert vals[1] == pytest.approx(-1.0, abs=1e-12)
        assert vals[2] == pytest.approx(-1.0, abs=1e-12)
        assert vals[3] == pytest.approx(-1.0, abs=1e-12)
    assert summary["scalar_min"] == pytest.approx(-12.0, abs=1e-10)


def test_curvature_rejects_n2(tmp_path, capsys):
    rc = main(["curvature", "--n", "2", "--out-dir", str(tmp_path)])
    assert rc == 2
    err = capsys.readouterr().err
    assert "n > 2" in err


def test_scan_slope(tmp_path):
    rc = main(["scan", "--n", "4", "--sizes", "40,80,160,320,640",
               "--grid-size", "512", "--out-dir", str(tmp_path)])
    assert rc == 0
    report, summary, _ = _read(tmp_path)
    assert report[0] == "size,norm"
    assert len(report) == 6
    assert summary["expected_slope"] == -3.0
    assert abs(summary["slope"] + 3.0) < 0.1


def test_scan_needs_five_sizes(tmp_path):
    rc = main(["scan", "--sizes", "40", "--out-dir", str(tmp_path)])
    assert rc == 2


def test_indicial_values(tmp_path):
    rc = main(["indicial", "--n", "4", "--block", "1j",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    _, summary, _ = _read(tmp_path)
    assert summary["roots"]["1j"] == [1.0, -4.0]
    rc = main(["indicial", "--n", "4", "--out-dir", str(tmp_path)])
    assert rc == 0
    _, summary, _ = _read(tmp_path)
    assert set(summary["roots"]) == {"11", "12", "1j", "2j", "jk", "diag"}
    assert summary["roots"]["11"][0] == pytest.approx(1.3722813232690143,
                                                      abs=1e-12)


def test_indicial_bad_block(tmp_path):
    rc = main(["indicial", "--n", "4", "--block", "zz",
               "--out-dir", str(tmp_path)])
    assert rc == 2


def test_compare_slope(tmp_path):
    rc = main(["compare", "--n", "4", "--out-dir", str(tmp_path)])
    assert rc == 0
    _, summary, _ = _read(tmp_path)
    assert summary["expected_slope"] == -3.0
    assert abs(summary["slope"] + 3.0) < 0.1


def test_solve_from_glued(tmp_path):
    rc = main(["solve", "--n", "4", "--from-glued", "50",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    report, summary, _ = _read(tmp_path)
    assert summary["converged"] is True
    assert abs(summary["fitted_m"] - 1.0) < 1e-6
    assert abs(summary["r_plus"] - 2.0 ** (1.0 / 3.0)) < 1e-6
    # profile CSV is the solved V(r)
    assert report[0] == "r,V"
    r0, V0 = (float(t) for t in report[1].split(","))
    assert V0 == pytest.approx(r0**2 - 2.0 / r0, abs=1e-6)


def test_solve_exact_blackhole_zero_iters(tmp_path):
    rc = main(["solve", "--n", "5", "--from-blackhole", "2",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    _, summary, _ = _read(tmp_path)
    assert summary["iters"] == 0
    assert abs(summary["fitted_m"] - 2.0) < 1e-6


def test_solve_unreachable_tol_exit_3(tmp_path, capsys):
    rc = main(["solve", "--n", "4", "--from-glued", "15", "--tol", "1e-30",
               "--out-dir", str(tmp_path)])
    assert rc == 3
    _, summary, _ = _read(tmp_path)
    assert summary["converged"] is False
    assert "error" in summary
    assert capsys.readouterr().err != ""


def test_solve_needs_one_source(tmp_path):
    rc = main(["solve", "--n", "4", "--out-dir", str(tmp_path)])
    assert rc == 2
    rc = main(["solve", "--n", "4", "--from-glued", "50",
               "--from-blackhole", "1", "--out-dir", str(tmp_path)])
    assert rc == 2


def test_lattice_single_cusp(tmp_path):
    cusp = json.dumps({"basis": np.eye(3).tolist(), "sigma": [10, 0, 0]})
    rc = main(["lattice", "--n", "4", "--cusp", cusp,
               "--out-dir", str(tmp_path)])
    assert rc == 0
    report, summary, _ = _read(tmp_path)
    assert summary["radii"][0] == pytest.approx(3.0078358, abs=1e-4)
    assert summary["two_pi_ok"] is True
    assert len(report) == 2


def test_lattice_imprimitive_exit_2(tmp_path):
    cusp = json.dumps({"basis": np.eye(3).tolist(), "sigma": [2, 4, 6]})
    rc = main(["lattice", "--n", "4", "--cusp", cusp,
               "--out-dir", str(tmp_path)])
    assert rc == 2


def test_lattice_two_cusps(tmp_path):
    c1 = json.dumps({"basis": np.eye(3).tolist(), "sigma": [10, 0, 0]})
    c2 = json.dumps({"basis": (2.0 * np.eye(3)).tolist(), "sigma": [6, 0, 0]})
    rc = main(["lattice", "--n", "4", "--cusp", c1, "--cusp", c2,
               "--out-dir", str(tmp_path)])
    assert rc == 0
    _, summary, _ = _read(tmp_path)
    assert summary["lengths"] == [10.0, 12.0]
    assert summary["size"] == 10.0


def test_outputs_deterministic(tmp_path):
    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    args = ["scan", "--n", "3", "--sizes", "40,80,160,320,640",
            "--grid-size", "512"]
    assert main(args + ["--out-dir", str(d1)]) == 0
    assert main(args + ["--out-dir", str(d2)]) == 0
    assert (d1 / "report.csv").read_bytes() == (d2 / "report.csv").read_bytes()
    assert (d1 / "summary.json").read_bytes() == (d2 / "summary.json").read_bytes()
    # manifests differ only in the timestamp and the output location
    m1 = json.loads((d1 / "manifest.json").read_text())
    m2 = json.loads((d2 / "manifest.json").read_text())
    for m in (m1, m2):
        m.pop("timestamp")
        m["config"].pop("out_dir")
    assert m1 == m2


def test_config_file_with_flag_override(tmp_path):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(
        {"n": 5, "sizes": "40,80,160,320,640", "grid_size": 512}
    ))
    out = tmp_path / "out"
    rc = main(["scan", "--config", str(cfg_path), "--n", "4",
               "--out-dir", str(out)])
    assert rc == 0
    _, summary, manifest = _read(out)
    # the flag beats the file; the file provided everything else
    assert summary["n"] == 4
    assert manifest["config"]["sizes"] == [40.0, 80.0, 160.0, 320.0, 640.0]
    assert "config" in manifest["input_hashes"]


def test_missing_config_exit_2(tmp_path, capsys):
    rc = main(["scan", "--config", str(tmp_path / "absent.json"),
               "--out-dir", str(tmp_path)])
    assert rc == 2
    assert "not found" in capsys.readouterr().err
