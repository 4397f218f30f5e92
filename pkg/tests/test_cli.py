"""CLI contract tests: examples, determinism, exit codes, column contracts."""

import json
import os
import subprocess
import sys

import pytest

from padic_sojourn.cli import main


def run(argv, tmp_path=None):
    return main([str(a) for a in argv])


def read(path):
    return path.read_text().splitlines()


def data_lines(path):
    return [ln for ln in read(path) if not ln.startswith("#")]


def meta_lines(path):
    return [ln for ln in read(path) if ln.startswith("#")]


class TestDocumentedExamples:
    def test_constants_json(self, capsys):
        assert run(["constants", "--p", 2, "--alpha", 2]) == 0
        out = capsys.readouterr().out
        payload = json.loads(out)
        assert payload["b_alpha"] == 0.5714285714285714
        assert payload["p"] == 2 and payload["alpha"] == 2.0

    def test_eval_survival_at_one(self, tmp_path):
        out = tmp_path / "j.csv"
        rc = run(["eval", "j", "--p", 2, "--alpha", 2, "--t", 1, "--out", out])
        assert rc == 0
        header, row = data_lines(out)
        assert header == "p,alpha,t,value"
        assert row == "2,2.0,1.0,0.6199583133282351"

    def test_simulate_zero_horizon(self, tmp_path):
        out = tmp_path / "sim.csv"
        rc = run([
            "simulate", "--p", 2, "--alpha", 2, "--horizon", 0,
            "--n-paths", 1, "--seed", 7, "--out", out,
        ])
        assert rc == 0
        header, row = data_lines(out)
        assert header == (
            "seed,horizon,sojourn,complement_sojourn,first_return,"
            "returned,visits_to_zero,max_level"
        )
        cells = row.split(",")
        assert cells[2] == "0.0"  # sojourn
        assert cells[4] == ""  # no first return: empty cell
        assert cells[5] == "0"  # returned flag renders as 0/1


class TestDeterminism:
    def test_identical_lines_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["simulate", "--p", 2, "--alpha", 2, "--horizon", 5,
                "--n-paths", 40, "--seed", 11]
        assert run(argv + ["--out", a]) == 0
        assert run(argv + ["--out", b]) == 0
        assert a.read_bytes().replace(b"a.csv", b"") == b.read_bytes().replace(
            b"b.csv", b""
        ) or data_lines(a) == data_lines(b) and meta_lines(a) == meta_lines(b)

    def test_threads_do_not_change_output(self, tmp_path):
        a, b = tmp_path / "t1.csv", tmp_path / "t3.csv"
        base = ["simulate", "--p", 2, "--alpha", 2, "--horizon", 5,
                "--n-paths", 63, "--seed", 4]
        assert run(base + ["--threads", 1, "--out", a]) == 0
        assert run(base + ["--threads", 3, "--out", b]) == 0
        assert data_lines(a) == data_lines(b)

    def test_stamp_touches_only_metadata(self, tmp_path):
        plain, stamped = tmp_path / "p.csv", tmp_path / "s.csv"
        base = ["eval", "j", "--p", 2, "--alpha", 2, "--t", 1]
        assert run(base + ["--out", plain]) == 0
        assert run(base + ["--out", stamped, "--stamp"]) == 0
        assert data_lines(plain) == data_lines(stamped)
        assert any("generated" in ln for ln in meta_lines(stamped))
        assert not any("generated" in ln for ln in meta_lines(plain))

    def test_metadata_headers_present(self, tmp_path):
        out = tmp_path / "j.csv"
        run(["eval", "j", "--p", 2, "--alpha", 2, "--t", 1, "--out", out])
        meta = meta_lines(out)
        assert any(ln.startswith("# artifact:") for ln in meta)
        assert any(ln == "# p: 2" for ln in meta)
        assert any(ln == "# subcommand: eval" for ln in meta)

    def test_no_temp_files_left(self, tmp_path):
        out = tmp_path / "x.csv"
        run(["eval", "j", "--p", 2, "--alpha", 2, "--t", 1, "--out", out])
        assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]


class TestExitCodes:
    def test_usage_error_bad_p(self, tmp_path, capsys):
        rc = run(["eval", "j", "--p", 4, "--alpha", 2, "--t", 1,
                  "--out", tmp_path / "x.csv"])
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_usage_error_missing_beta(self, tmp_path):
        rc = run([
            "experiment", "moments", "--p", 2, "--alpha", 2,
            "--t-geom", "10,100,8", "--n-paths", 500, "--seed", 1,
            "--out", tmp_path / "m.csv",
        ])
        assert rc == 2

    def test_usage_error_spectral_needs_some_grid(self, tmp_path):
        rc = run(["spectral", "--p", 2, "--alpha", 2, "--h", 0.27, "--d", 1,
                  "--n-paths", 1000, "--seed", 1, "--out", tmp_path / "s.csv"])
        assert rc == 2

    def test_usage_error_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == 2

    def test_numerical_error_exit_3(self, tmp_path, capsys):
        # series route refused deep in the left tail at gamma near 1
        rc = run(["eval", "stable-density", "--gamma", 0.95, "--t", 0.6,
                  "--route", "series", "--out", tmp_path / "s.csv"])
        assert rc == 3
        assert "numerical failure" in capsys.readouterr().err
        assert not (tmp_path / "s.csv").exists()

    def test_usage_error_leaves_no_file(self, tmp_path):
        out = tmp_path / "never.csv"
        assert run(["eval", "j", "--p", 9, "--alpha", 2, "--t", 1,
                    "--out", out]) == 2
        assert not out.exists()


class TestOutputRouting:
    def test_env_outdir_override(self, tmp_path, monkeypatch):
        # the env var steers the default file name when --out is absent
        monkeypatch.setenv("PADIC_SOJOURN_OUTDIR", str(tmp_path))
        rc = run(["eval", "j", "--p", 2, "--alpha", 2, "--t", 1])
        assert rc == 0
        assert (tmp_path / "eval_j.csv").exists()

    def test_explicit_out_ignores_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PADIC_SOJOURN_OUTDIR", str(tmp_path / "elsewhere"))
        out = tmp_path / "abs.csv"
        assert run(["eval", "j", "--p", 2, "--alpha", 2, "--t", 1,
                    "--out", out]) == 0
        assert out.exists()
        assert not (tmp_path / "elsewhere").exists()

    def test_json_mirror(self, tmp_path):
        out = tmp_path / "j.json"
        rc = run(["eval", "j", "--p", 2, "--alpha", 2, "--t", 1,
                  "--out", out, "--format", "json"])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["columns"] == ["p", "alpha", "t", "value"]
        assert payload["rows"][0][3] == 0.6199583133282351
        assert payload["meta"]["subcommand"] == "eval"


class TestColumnContracts:
    def test_eval_cdf_columns(self, tmp_path):
        out = tmp_path / "cdf.csv"
        rc = run(["eval", "sojourn-cdf", "--p", 2, "--alpha", 2, "--t", 4,
                  "--theta-grid", "1.0,2.0,3.0", "--out", out])
        assert rc == 0
        lines = data_lines(out)
        assert lines[0] == "p,alpha,t,theta,value"
        assert len(lines) == 4

    def test_eval_stable_both_routes(self, tmp_path):
        out = tmp_path / "st.csv"
        rc = run(["eval", "stable-density", "--gamma", 0.5, "--t-grid", "1.0,2.0",
                  "--route", "both", "--out", out])
        assert rc == 0
        lines = data_lines(out)
        assert lines[0] == "gamma,t,route,value"
        routes = {ln.split(",")[2] for ln in lines[1:]}
        assert routes == {"series", "quadrature"}
        assert len(lines) == 5

    def test_invert_columns(self, tmp_path):
        out = tmp_path / "inv.csv"
        rc = run(["invert", "first-return", "--p", 2,
                  "--alpha", 2, "--t-grid", "0.5,1.0,2.0", "--out", out])
        assert rc == 0
        lines = data_lines(out)
        assert lines[0] == "t,value,est_error,method,order"
        assert len(lines) == 4

    def test_experiment_moments_writes_fits(self, tmp_path):
        out = tmp_path / "mom.csv"
        rc = run([
            "experiment", "moments", "--p", 2, "--alpha", 2, "--beta", 1,
            "--t-geom", "10,1000,8", "--n-paths", 500, "--seed", 3,
            "--out", out,
        ])
        assert rc == 0
        assert data_lines(out)[0] == "experiment,p,alpha,beta,t,value,stderr,n"
        fits = tmp_path / "mom_fits.csv"
        assert fits.exists()
        assert data_lines(fits)[0] == (
            "experiment,p,alpha,beta,t_lo,t_hi,slope,slope_stderr,predicted_slope"
        )
        assert len(data_lines(fits)) == 2

    def test_experiment_survival_long_format(self, tmp_path):
        out = tmp_path / "sur.csv"
        rc = run([
            "experiment", "survival", "--p", 2, "--alpha", 2,
            "--t-geom", "0.5,20,6", "--out", out,
        ])
        assert rc == 0
        lines = data_lines(out)
        assert lines[0] == "experiment,p,alpha,t,value,stderr,n"
        kinds = {ln.split(",")[0] for ln in lines[1:]}
        assert kinds == {"survival_series", "survival_ode"}

    def test_experiment_volterra(self, tmp_path):
        out = tmp_path / "vol.csv"
        rc = run([
            "experiment", "volterra", "--p", 2, "--alpha", 2,
            "--t-grid", "0.5,1.0", "--out", out,
        ])
        assert rc == 0
        lines = data_lines(out)
        assert lines[0] == "experiment,p,alpha,t,value,stderr,n"
        # residuals of the renewal identity: tiny but nonzero
        for ln in lines[1:]:
            assert float(ln.split(",")[4]) < 1e-6

    def test_experiment_transience(self, tmp_path):
        out = tmp_path / "tr.csv"
        rc = run([
            "experiment", "transience", "--p", 2, "--alpha", 0.5,
            "--horizon", 1000, "--n-paths", 2000, "--seed", 9, "--out", out,
        ])
        assert rc == 0
        lines = data_lines(out)
        assert lines[0] == "experiment,p,alpha,t,value,stderr,predicted,n"
        cells = lines[1].split(",")
        assert abs(float(cells[4]) - float(cells[6])) < 0.05

    def test_spectral_hole_columns(self, tmp_path):
        out = tmp_path / "sp.csv"
        rc = run([
            "spectral", "--p", 2, "--alpha", 2, "--h", 0.27, "--d", 1.0,
            "--t-geom", "1,100,5", "--n-paths", 1000, "--seed", 12,
            "--out", out,
        ])
        assert rc == 0
        lines = data_lines(out)
        assert lines[0] == "t,t_a,sigma,stderr,n"
        assert len(lines) == 6
        assert all(ln.split(",")[1] == "0.0" for ln in lines[1:])


class TestConsoleScript:
    def test_installed_entry_point(self, tmp_path):
        # one end-to-end run through the real console script
        out = tmp_path / "c.json"
        proc = subprocess.run(
            [sys.executable, "-m", "padic_sojourn.cli", "constants",
             "--p", "3", "--alpha", "2", "--out", str(out)],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(out.read_text())
        assert payload["b_alpha"] == 9.0 / 13.0
