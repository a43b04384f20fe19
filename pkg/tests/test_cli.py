"""Command-line surface: exit codes 0 (done), 2 (usage), 3 (honest failure),
artifact files written where pointed, JSON on stdout where promised.
"""

import json
import os

import pytest
from click.testing import CliRunner

from boostgap.cli import main
from boostgap.harness import read_csv, summary_path_for


@pytest.fixture
def runner():
    return CliRunner()


TINY_RUN = [
    "run", "--gamma", "0.25", "--d", "2", "--m", "16", "--alpha", "1",
    "--trials", "2", "--budget", "64", "--seed", "11",
]


class TestRun:
    def test_writes_csv_and_summary(self, runner, tmp_path):
        out = str(tmp_path / "run.csv")
        got = runner.invoke(main, TINY_RUN + ["--out", out])
        assert got.exit_code == 0, got.output
        trials, aggs = read_csv(out)
        assert len(trials) == 2
        assert all(t.failure is None for t in trials)
        assert os.path.exists(summary_path_for(out))
        assert "a_log=" in got.output
        assert "failures: 0/2" in got.output

    def test_control_arm(self, runner, tmp_path):
        out = str(tmp_path / "ctrl.csv")
        got = runner.invoke(
            main, TINY_RUN + ["--adversary", "off", "--algo", "bagged",
                              "--rounds", "4", "--out", out])
        assert got.exit_code == 0, got.output
        trials, _ = read_csv(out)
        assert {t.adversary for t in trials} == {"off"}
        assert {t.algo for t in trials} == {"bagged"}

    def test_bad_gamma_is_usage_error(self, runner, tmp_path):
        got = runner.invoke(main, [
            "run", "--gamma", "0.7", "--d", "2", "--m", "16",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert got.exit_code == 2
        assert "gamma" in got.output

    def test_fail_rate_gate_exits_3(self, runner, tmp_path, monkeypatch):
        from boostgap import harness as H

        real = H.run_trial_detailed

        def sabotaged(params, algo, adversary_on, seed, rounds=None, weak_learner=None):
            result, detail = real(params, algo, adversary_on, seed, rounds, weak_learner)
            broken = H.TrialResult(**{**result.__dict__, "failure": "AdversaryExhausted"})
            return broken, detail

        monkeypatch.setattr(H, "run_trial_detailed", sabotaged)
        got = runner.invoke(main, TINY_RUN + ["--out", str(tmp_path / "f.csv")])
        assert got.exit_code == 3
        assert "failure rate exceeds" in got.output


class TestSweep:
    def test_runs_from_config(self, runner, tmp_path):
        cfg = {
            "gamma": 0.25, "d": 2, "alpha": 1.0, "m_grid": [16], "trials": 2,
            "algorithms": ["adaboost:on"], "seed": 3, "rounds": None,
            "per_block_budget": 64,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = str(tmp_path / "sweep.csv")
        got = runner.invoke(main, ["sweep", "--config", str(cfg_path), "--out", out])
        assert got.exit_code == 0, got.output
        trials, _ = read_csv(out)
        assert len(trials) == 2

    def test_unknown_key_is_usage_error(self, runner, tmp_path):
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps({"gamma": 0.25, "bogus": 1}))
        got = runner.invoke(main, ["sweep", "--config", str(cfg_path)])
        assert got.exit_code == 2
        assert "unknown" in got.output or "missing" in got.output

    def test_missing_file_is_usage_error(self, runner, tmp_path):
        got = runner.invoke(main, ["sweep", "--config", str(tmp_path / "nope.json")])
        assert got.exit_code == 2


class TestLemmas:
    def test_bias_passes_and_prints_json(self, runner):
        got = runner.invoke(main, [
            "lemmas", "bias", "--alpha-tilde", "4", "--alpha-prime", "1",
            "--beta", "0.05", "--trials", "20000",
        ])
        assert got.exit_code == 0, got.output
        rec = json.loads(got.output)
        assert rec["pass"] is True
        assert rec["direction"] == "lower"

    def test_coupon_passes(self, runner):
        got = runner.invoke(main, [
            "lemmas", "coupon", "--m", "1024", "--r", "4", "--trials", "2000",
        ])
        assert got.exit_code == 0, got.output
        assert json.loads(got.output)["pass"] is True

    def test_lincomb_passes(self, runner):
        got = runner.invoke(main, [
            "lemmas", "lincomb", "--r", "400", "--n", "8", "--trials", "10",
            "--budget", "32",
        ])
        assert got.exit_code == 0, got.output
        rec = json.loads(got.output)
        assert rec["empirical_probability"] == 0.0

    def test_anticonc_failing_bound_exits_3(self, runner):
        # estimator demo: the true probability sits far below this bound
        got = runner.invoke(main, [
            "lemmas", "anticonc", "--n", "20", "--beta", "0.05",
            "--trials", "5000",
        ])
        assert got.exit_code == 3
        assert json.loads(got.output.splitlines()[0])["pass"] is False

    def test_anticonc_passing_regime(self, runner):
        got = runner.invoke(main, [
            "lemmas", "anticonc", "--n", "20", "--beta", "0.15",
            "--trials", "20000",
        ])
        assert got.exit_code == 0, got.output
        assert json.loads(got.output)["pass"] is True

    def test_anticonc_calibrate_prints_constants(self, runner):
        got = runner.invoke(main, [
            "lemmas", "anticonc", "--n", "20", "--beta", "0.15",
            "--trials", "20000", "--calibrate",
        ])
        assert got.exit_code == 0, got.output
        lines = got.output.strip().splitlines()
        consts = json.loads(lines[0])  # constants first, then the report
        assert set(consts) == {"c2", "c3"}
        assert consts["c3"] >= 1.0
        assert json.loads(lines[1])["pass"] is True


class TestCertify:
    def test_fallback_unrestricted_certifies(self, runner):
        got = runner.invoke(main, [
            "certify", "--gamma", "0.1", "--d", "8", "--m", "64",
            "--seed", "21", "--pool", "fallback", "--no-restrict-minus",
            "--budget", "256",
        ])
        assert got.exit_code == 0, got.output
        rec = json.loads(got.output)
        assert rec["ok"] is True
        assert rec["min_margin"] >= 0.1 / 4 - 1e-9
        assert rec["max_z"] <= 1 - 2 * 0.1**2 + 1e-9

    def test_quota_restricted_reports_failure(self, runner):
        got = runner.invoke(main, [
            "certify", "--gamma", "0.1", "--d", "8", "--m", "64",
            "--seed", "21", "--pool", "quota", "--restrict-minus",
            "--budget", "256",
        ])
        assert got.exit_code == 3
        rec = json.loads(got.output)
        assert rec["ok"] is False
        assert rec["failed_round"] == 0

    def test_bad_params_usage_error(self, runner):
        got = runner.invoke(main, [
            "certify", "--gamma", "0.1", "--d", "8", "--m", "3",
        ])
        assert got.exit_code == 2
