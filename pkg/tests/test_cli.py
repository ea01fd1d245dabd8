from __future__ import annotations

import json
import subprocess
import sys

import pytest

from center_shadow import cli
from center_shadow.io import load_json, read_trace_csv


@pytest.fixture(autouse=True)
def no_env_out(monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)


def run(*args):
    return cli.main([str(a) for a in args])


class TestShadowCommand:
    def test_writes_outputs(self, tmp_path):
        assert run("shadow", "--len", 200, "--jump", 1e-4, "--out", tmp_path) == cli.EXIT_OK
        report = load_json(tmp_path / "report.json")
        assert report["passed"] and report["bound_holds"]
        assert len(read_trace_csv(tmp_path / "trace.csv")["dist"]) == 200

    def test_byte_identical_reruns(self, tmp_path):
        for d in ("a", "b"):
            assert run("shadow", "--len", 150, "--seed", 3, "--out", tmp_path / d) == 0
        for name in ("trace.csv", "report.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_budget_exceeded(self, tmp_path):
        assert run("shadow", "--len", 50, "--jump", 0.05, "--out", tmp_path) == cli.EXIT_BUDGET

    def test_trivial_and_skewed(self, tmp_path):
        assert run("shadow", "--model", "trivial", "--len", 100, "--out", tmp_path) == 0
        assert run("shadow", "--matrix", "0,1,-1,3", "--len", 100, "--out", tmp_path) == 0

    def test_bound_failure_exit(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "ORACLE_TOL", -1.0)
        assert run("shadow", "--len", 50, "--out", tmp_path) == cli.EXIT_BOUND
        assert not load_json(tmp_path / "report.json")["passed"]

    def test_orbit_file(self, tmp_path):
        orbit = tmp_path / "o.txt"
        assert run("gen-orbit", "--len", 80, "--seed", 5, "--file", orbit) == 0
        assert run("shadow", "--orbit", orbit, "--out", tmp_path) == 0

    def test_mismatched_orbit_file(self, tmp_path):
        orbit = tmp_path / "o.txt"
        run("gen-orbit", "--len", 20, "--file", orbit)
        lines = orbit.read_text().splitlines()
        x, s = lines[10].split()
        lines[10] = f"{x} {'-' if s == '+' else '+'}"
        orbit.write_text("\n".join(lines) + "\n")
        assert run("shadow", "--orbit", orbit, "--out", tmp_path) == cli.EXIT_CONFIG


class TestDocumentedExamples:
    def test_full_run(self, tmp_path):
        args = ["shadow", "--model", "pillowcase", "--len", 1000, "--jump", 1e-4, "--seed", 7, "--out", tmp_path]
        assert run(*args) == 0
        assert len(read_trace_csv(tmp_path / "trace.csv")["dist"]) == 1000

    def test_zero_jump(self, tmp_path):
        assert run("shadow", "--jump", 0, "--len", 100, "--out", tmp_path) == 0
        assert not read_trace_csv(tmp_path / "trace.csv")["dist"].any()

    def test_parabolic_matrix(self, capsys):
        assert run("constants", "--matrix", "1,1,0,1") == cli.EXIT_CONFIG
        assert "NotHyperbolic" in capsys.readouterr().err

    def test_intersection_thousand_trials(self, tmp_path):
        assert run("exp", "intersection", "--trials", 1000, "--out", tmp_path) == 0
        assert int(load_json(tmp_path / "intersection.json")["witness"]["max_count"]) == 1

    def test_homoclinic_eps(self, tmp_path):
        assert run("exp", "homoclinic", "--eps", 0.05, "--out", tmp_path) == 0
        assert "w" in load_json(tmp_path / "homoclinic.json")["witness"]


class TestConfig:
    def test_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# run settings\nlen = 120\nseed = 2\njump = 2e-4\n")
        assert run("shadow", "--config", cfg, "--len", 60, "--out", tmp_path) == 0
        assert len(read_trace_csv(tmp_path / "trace.csv")["dist"]) == 60
        report = load_json(tmp_path / "report.json")
        assert float(report["epsilon"]) <= 2e-4 + 1e-12

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour = blue\n")
        assert run("shadow", "--config", cfg, "--out", tmp_path) == cli.EXIT_CONFIG

    def test_missing_file(self, tmp_path):
        assert run("shadow", "--config", tmp_path / "none.cfg") == cli.EXIT_CONFIG

    @pytest.mark.parametrize(
        "args",
        [["--matrix", "1,0,0,1"], ["--matrix", "2,1,1"], ["--model", "sphere"], ["--nonsense"]],
    )
    def test_bad_flags(self, args, tmp_path):
        assert run("shadow", *args, "--out", tmp_path) == cli.EXIT_CONFIG

    def test_bad_number_in_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("len = many\n")
        assert run("shadow", "--config", cfg) == cli.EXIT_CONFIG

    def test_env_overrides_out(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
        assert run("shadow", "--len", 40, "--out", tmp_path / "flag") == 0
        assert (tmp_path / "env" / "report.json").exists()
        assert not (tmp_path / "flag").exists()


class TestOtherCommands:
    def test_constants(self, capsys):
        assert run("constants", "--eta", 0.02) == 0
        payload = json.loads(capsys.readouterr().out)
        assert int(payload["N"]) == 1 and float(payload["C"]) == pytest.approx(1.0)

    def test_constants_skewed(self, capsys):
        assert run("constants", "--matrix", "0,1,-1,3") == 0
        assert int(json.loads(capsys.readouterr().out)["N"]) == 2

    def test_gen_orbit_default_path(self, tmp_path, capsys):
        assert run("gen-orbit", "--len", 10, "--out", tmp_path) == 0
        assert (tmp_path / "orbit.txt").exists()

    def test_help(self):
        assert run("--help") == cli.EXIT_OK


class TestExperimentCommand:
    def test_unknown_probe(self, tmp_path):
        assert run("exp", "nope", "--out", tmp_path) == cli.EXIT_CONFIG

    @pytest.mark.parametrize(
        "probe, extra",
        [
            ("homoclinic", []),
            ("growth", ["--steps", 5]),
            ("intersection", ["--trials", 10]),
            ("periodic-density", ["--trials", 4]),
            ("asymptotic", []),
            ("metric", ["--trials", 200]),
        ],
    )
    def test_probe_writes_json(self, tmp_path, probe, extra):
        assert run("exp", probe, "--out", tmp_path, *extra) == cli.EXIT_OK
        assert load_json(tmp_path / f"{probe}.json")["passed"] is True

    def test_failing_probe_exit(self, tmp_path):
        assert run("exp", "asymptotic", "--mu-seq", "++++", "--nu-seq", "++++", "--out", tmp_path) == cli.EXIT_FAILED

    def test_malformed_sequence(self, tmp_path):
        assert run("exp", "asymptotic", "--mu-seq", "+++", "--nu-seq", "++", "--out", tmp_path) == cli.EXIT_CONFIG

    def test_wrong_model(self, tmp_path):
        assert run("exp", "homoclinic", "--model", "trivial", "--out", tmp_path) == cli.EXIT_CONFIG


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "center_shadow", "constants"], capture_output=True, text=True, check=False
    )
    assert res.returncode == 0 and "epsilon_budget" in res.stdout
