"""End-to-end command-line behavior: artifacts, determinism, exit codes."""

import json

import numpy as np
import pytest

from subfactor_geo.cli import main
from subfactor_geo.linalg import load_matrix, op_norm

FAST = ["--trials", "6", "--grid", "32", "--seed", "11"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_families_lists_builtins(capsys):
    code, out, _ = run(capsys, "families")
    assert code == 0
    for name in ("tensor(1,2)", "tensor(2,2)", "group_flip(m2)"):
        assert name in out


def test_verify_smoke(tmp_path, capsys):
    code, out, _ = run(
        capsys, "verify", "--out", str(tmp_path), *FAST,
        "--suite", "construction", "--suite", "metric",
    )
    assert code == 0
    assert "overall: pass" in out
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["status"] == "pass"
    assert [s["name"] for s in doc["suites"]] == ["construction", "metric"]
    assert doc["family"] == "tensor(1,2)"


def test_verify_requires_seed(tmp_path, capsys):
    code, _, err = run(
        capsys, "verify", "--out", str(tmp_path), "--suite", "construction"
    )
    assert code == 2
    assert "seed" in err


def test_verify_rejects_unknown_family(tmp_path, capsys):
    code, _, err = run(
        capsys, "verify", "--out", str(tmp_path), *FAST, "--family", "octonion"
    )
    assert code == 2
    assert "unknown family" in err


def test_verify_rejects_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"inclusion": {"family": "tensor(1,2)"}, "sede": 1}))
    code, _, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 2
    assert "unknown config keys" in err


def test_verify_wrong_lambda_exits_one(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "inclusion": {"family": "tensor(1,2)", "lam": 0.3},
                "seed": 1,
                "trials": 4,
                "suites": ["construction"],
            }
        )
    )
    code, _, err = run(capsys, "verify", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 1
    assert "construction check failed" in err


def test_verify_report_bytes_are_deterministic(tmp_path, capsys):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        code, _, _ = run(
            capsys, "verify", "--out", str(out), *FAST,
            "--suite", "construction", "--family", "group_flip(scalars)",
        )
        assert code == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_config_file_with_flag_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "inclusion": {"family": "tensor(1,2)"},
                "seed": 3,
                "trials": 50,
                "suites": ["construction"],
            }
        )
    )
    code, out, _ = run(
        capsys, "verify", "--config", str(cfg), "--out", str(tmp_path),
        "--trials", "5", "--family", "group_flip(scalars)",
    )
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["family"] == "group_flip(scalars)"


def test_geodesic_exports_artifacts(tmp_path, capsys):
    code, out, _ = run(capsys, "geodesic", "--out", str(tmp_path), *FAST)
    assert code == 0
    assert "wrote" in out
    sidecar = json.loads((tmp_path / "geodesic.json").read_text())
    assert sidecar["grid"] == 32
    assert sidecar["geodesic_residual"] <= 1e-8
    assert abs(sidecar["z_op_norm"] - 0.2) < 1e-9
    csv_lines = (tmp_path / "geodesic.csv").read_text().strip().split("\n")
    assert len(csv_lines) == 1 + 33
    header = csv_lines[0].split(",")
    d = int(np.sqrt((len(header) - 1) / 2))
    assert header[0] == "t" and header[1] == "q_0_0_re"
    q_start = load_matrix((tmp_path / "q_start.txt").read_text())
    assert q_start.shape == (d, d)


def test_geodesic_then_log_round_trip(tmp_path, capsys):
    code, _, _ = run(capsys, "geodesic", "--out", str(tmp_path), *FAST)
    assert code == 0
    code, out, _ = run(
        capsys, "log", "--out", str(tmp_path), *FAST,
        str(tmp_path / "q_start.txt"), str(tmp_path / "q_end.txt"),
    )
    assert code == 0
    assert "recovered generator" in out
    z_in = load_matrix((tmp_path / "z.txt").read_text())
    z_out = load_matrix((tmp_path / "z_out.txt").read_text())
    assert op_norm(z_in - z_out) < 1e-7
    doc = json.loads((tmp_path / "log.json").read_text())
    assert doc["residual"] <= 1e-8


def test_log_far_endpoints_exit_three(tmp_path, capsys):
    from subfactor_geo.families import family_construction
    from subfactor_geo.linalg import dump_matrix, spectral_function

    bc = family_construction("group_flip(scalars)")
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    u = spectral_function(1.2j * sx, "exp")
    lu = bc.left(u)
    far = lu @ bc.jones_p @ lu.conj().T
    (tmp_path / "p.txt").write_text(dump_matrix(bc.jones_p))
    (tmp_path / "far.txt").write_text(dump_matrix(far))
    code, _, err = run(
        capsys, "log", "--out", str(tmp_path), "--family", "group_flip(scalars)",
        str(tmp_path / "p.txt"), str(tmp_path / "far.txt"),
    )
    assert code == 3
    assert "numerical failure" in err


def test_log_rejects_missing_file(tmp_path, capsys):
    code, _, err = run(
        capsys, "log", "--out", str(tmp_path),
        str(tmp_path / "nope0.txt"), str(tmp_path / "nope1.txt"),
    )
    assert code == 2
    assert "cannot read" in err


def test_sweep_minimality(tmp_path, capsys):
    code, out, _ = run(
        capsys, "sweep", "--out", str(tmp_path), *FAST, "minimality"
    )
    assert code == 0
    summary = json.loads((tmp_path / "minimality_summary.json").read_text())
    assert summary["status"] == "ok"
    assert summary["violations"] == 0
    lines = (tmp_path / "minimality.csv").read_text().strip().split("\n")
    assert len(lines) == 1 + 6


def test_sweep_zero_trials_writes_header_only(tmp_path, capsys):
    code, _, _ = run(
        capsys, "sweep", "--out", str(tmp_path), "--seed", "11",
        "--trials", "0", "minimality",
    )
    assert code == 0
    summary = json.loads((tmp_path / "minimality_summary.json").read_text())
    assert summary["status"] == "no data"
    lines = (tmp_path / "minimality.csv").read_text().strip().split("\n")
    assert len(lines) == 1


def test_sweep_convexity(tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--out", str(tmp_path), *FAST, "convexity")
    assert code == 0
    summary = json.loads((tmp_path / "convexity_summary.json").read_text())
    assert summary["violations"] == 0


def test_sweep_radius_probe(tmp_path, capsys):
    code, _, _ = run(
        capsys, "sweep", "--out", str(tmp_path), "--seed", "11", "--trials", "8",
        "--family", "group_flip(scalars)", "radius_probe",
    )
    assert code == 0
    summary = json.loads((tmp_path / "radius_probe_summary.json").read_text())
    assert summary["largest_passing_radius"] >= 0.45
    lines = (tmp_path / "radius_probe.csv").read_text().strip().split("\n")
    assert len(lines) == 1 + 24


def test_sweep_requires_seed(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--out", str(tmp_path), "minimality")
    assert code == 2
    assert "seed" in err


def test_unknown_subcommand_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
