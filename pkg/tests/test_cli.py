from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from hcwand import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: (None if v == "" else v) for k, v in r.items()} for r in rows]


def test_solve_ti_q4(capsys):
    code, out, _ = run(capsys, "solve", "--mode", "ti-q4", "--k", "2", "--lambda", "3", "--lambda2", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["count"] == 3 and rep["lambda_cr"] == 2.0 and rep["regime"] == "triple"
    assert rep["non_normalisable"] is True
    assert rep["config"]["lambda"] == 3.0
    assert [s["law"][2] for s in rep["solutions"]] == [1.0] * 3
    assert all(s["residual"] < 1e-10 for s in rep["solutions"])


def test_solve_bip_q2(capsys):
    code, out, _ = run(capsys, "solve", "--mode", "bip-q2", "--k", "2", "--lambda", "1")
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 3 and rep["lambda_cr"] == 2.0
    assert rep["solutions"][1]["even"][0] == 1.0


def test_solve_ti_q2(capsys):
    code, out, _ = run(capsys, "solve", "--mode", "ti-q2", "--k", "4", "--lambda", "0.7")
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 1 and rep["regime"] == "unique" and rep["lambda_cr"] is None


def test_scan_json_and_csv_round_trip(capsys, tmp_path):
    args = ["scan", "--mode", "bip-q2", "--k", "3", "--lambda-min", "5", "--lambda-max", "15", "--steps", "41"]
    _, j, _ = run(capsys, *args, "--format", "json")
    _, c, err = run(capsys, *args, "--format", "csv")
    rep = json.loads(j)
    assert set(rep) == {"config", "rows", "critical"}
    assert set(rep["critical"]) == {"closed_form", "empirical", "rel_err"}
    assert rep["critical"]["rel_err"] < 1e-6
    assert c.splitlines()[0] == "lambda,count,a_star,a1,a2,deriv_at_x0"
    rows = parse_csv(c)
    assert len(rows) == len(rep["rows"]) == 41
    for jr, cr in zip(rep["rows"], rows):
        for key, value in jr.items():
            if value is None:
                assert cr[key] is None
            else:
                assert type(value)(cr[key]) == value
    assert "closed_form" in err


def test_scan_is_byte_identical(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"scan{i}.csv"
        code, _, _ = run(capsys, "scan", "--mode", "ti-q4", "--k", "2", "--lambda2", "1",
                         "--lambda-min", "1", "--lambda-max", "3", "--steps", "201", "--format", "csv", "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_scan_usage_errors(capsys):
    code, _, err = run(capsys, "scan", "--mode", "bip-q2", "--k", "2", "--lambda-min", "3", "--lambda-max", "1")
    assert code == 1 and "usage error" in err
    code, _, _ = run(capsys, "scan", "--mode", "ti-q4", "--k", "2", "--lambda-min", "1", "--lambda-max", "3")
    assert code == 1
    code, _, _ = run(capsys, "scan", "--mode", "bip-q2", "--k", "2", "--lambda-min", "1", "--lambda-max", "3", "--steps", "1")
    assert code == 1


@pytest.mark.parametrize("lam2, expected", [(0.4, 11.2 / 54), (1.6, 20.8 / 54)])
def test_curve(capsys, lam2, expected):
    code, out, _ = run(capsys, "curve", "--k", "3", "--lambda2", str(lam2))
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["minimum"]["t"] - 1.0) < 1e-8
    assert rep["minimum"]["lambda"] == pytest.approx(expected, rel=1e-12)
    _, c, _ = run(capsys, "curve", "--k", "3", "--lambda2", str(lam2), "--format", "csv")
    rows = parse_csv(c)
    assert [float(r["lambda"]) for r in rows] == [r["lambda"] for r in rep["rows"]]


def test_verify(capsys):
    code, out, err = run(capsys, "verify", "--k-max", "12")
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 66 and all(r["status"] == "pass" for r in rows)
    code, out, _ = run(capsys, "verify", "--k-max", "2")
    assert code == 0
    assert "x^4 = 6" in out
    code, _, err = run(capsys, "verify", "--k-min", "5", "--k-max", "3")
    assert code == 1 and "usage error" in err


def test_verify_failure_exit_code(capsys, monkeypatch):
    from hcwand import exact

    monkeypatch.setattr(exact, "check_nonneg_high_coeffs", lambda k: False)
    code, _, _ = run(capsys, "verify", "--k-max", "3")
    assert code == 2


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--k", "2", "--lambda", "1", "--depth", "120", "--truncate", "130")
    rep = json.loads(out)
    assert code == 0
    assert rep["nearest_target"].startswith("cycle")
    assert rep["target_deviation"] < 1e-6 and rep["pair_residual"] < 1e-6
    code, out, _ = run(capsys, "simulate", "--k", "2", "--lambda", "3", "--depth", "200", "--truncate", "210")
    rep = json.loads(out)
    assert rep["nearest_target"] == "ti" and rep["converged"]
    code, out, _ = run(capsys, "simulate", "--k", "2", "--lambda", "3", "--boundary", "exact", "--depth", "12")
    rep = json.loads(out)
    assert code == 0 and max(rep["metrics"]) < 1e-10


def test_simulate_q4_modes(capsys):
    code, out, _ = run(capsys, "simulate", "--mode", "ti-q4", "--k", "2", "--lambda", "1", "--lambda2", "1",
                       "--boundary", "exact", "--depth", "10")
    rep = json.loads(out)
    assert code == 0 and rep["nearest_target"] == "ti" and rep["target_deviation"] < 1e-10
    code, out, _ = run(capsys, "simulate", "--mode", "bip-q4-I4", "--k", "2", "--lambda", "3", "--gamma", "1",
                       "--boundary", "exact", "--depth", "10")
    assert code == 0


def test_simulate_divergence_exit_code(capsys):
    code, _, err = run(capsys, "simulate", "--k", "2", "--lambda", "3", "--depth", "5", "--truncate", "20", "--clip", "1.5")
    assert code == 3 and "diverged" in err


def test_simulate_csv(capsys):
    code, out, _ = run(capsys, "simulate", "--k", "2", "--lambda", "3", "--depth", "5", "--format", "csv")
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 6 and rows[0]["level"] == "0"


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# scan settings\nmode = bip-q2\nk = 2\nlambda-min = 1\nlambda-max = 3\nsteps = 5\nformat = csv\n")
    code, out, _ = run(capsys, "scan", "--config", str(cfg))
    assert code == 0 and len(parse_csv(out)) == 5
    code, out, _ = run(capsys, "scan", "--config", str(cfg), "--steps", "7")
    assert code == 0 and len(parse_csv(out)) == 7
    bad = tmp_path / "bad.cfg"
    bad.write_text("k 2\n")
    code, _, err = run(capsys, "scan", "--config", str(bad))
    assert code == 1


def test_usage_errors(capsys):
    assert run(capsys)[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "solve", "--k", "2")[0] == 1
    assert run(capsys, "solve", "--mode", "ti-q4", "--k", "2", "--lambda", "1")[0] == 1
    assert run(capsys, "solve", "--mode", "ti-q2", "--k", "1", "--lambda", "1")[0] == 1
    assert run(capsys, "solve", "-k", "2")[0] == 1
    assert run(capsys, "solve", "--lam", "2", "--k", "2")[0] == 1
    assert run(capsys, "scan", "--config", "/nonexistent/file")[0] == 1


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hcwand", "solve", "--mode", "bip-q2", "--k", "3", "--lambda", "20"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["count"] == 1
