import csv
import json
import subprocess
import sys

import pytest

from renyi_toolkit.cli import main as cli_main
from renyi_toolkit.harness import (
    CHECK_GROUPS,
    CHECKS,
    SuiteConfig,
    full_config,
    rerun_witness,
    run_suite,
)


class TestConfig:
    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            SuiteConfig(trials=0)

    def test_rejects_unknown_check(self):
        with pytest.raises(ValueError):
            SuiteConfig(checks=("made_up_check",))

    def test_defaults_cover_all_checks(self):
        cfg = SuiteConfig()
        assert set(cfg.checks) == set(CHECKS)

    def test_groups_partition_known_checks(self):
        grouped = [name for names in CHECK_GROUPS.values() for name in names]
        assert sorted(grouped) == sorted(CHECKS)

    def test_full_config_overrides_trials(self):
        cfg = full_config(seed=3)
        assert cfg.trials_for("sandwich") > cfg.trials


class TestRunSuite:
    def test_small_run_passes(self):
        report = run_suite(SuiteConfig(seed=7, trials=3, checks=("sandwich", "alt")))
        assert report.failures == 0
        assert report.checks["sandwich"].trials == 3

    def test_reports_are_deterministic(self):
        cfg = SuiteConfig(seed=5, trials=3, checks=("sandwich", "pgm_identity"))
        first = json.dumps(run_suite(cfg).results_dict(), sort_keys=True)
        second = json.dumps(run_suite(cfg).results_dict(), sort_keys=True)
        assert first == second

    def test_different_seeds_differ(self):
        cfg_a = SuiteConfig(seed=5, trials=3, checks=("sandwich",))
        cfg_b = SuiteConfig(seed=6, trials=3, checks=("sandwich",))
        a = run_suite(cfg_a).checks["sandwich"].worst_slack
        b = run_suite(cfg_b).checks["sandwich"].worst_slack
        assert a != b

    def test_witness_reruns_to_recorded_slack(self):
        report = run_suite(
            SuiteConfig(seed=9, trials=4, checks=("sandwich", "reverse_alt", "pgm_identity"))
        )
        for name, result in report.checks.items():
            outcome = rerun_witness(name, result.witness)
            assert abs(outcome.slack - result.witness["slack"]) <= 1e-12

    def test_csv_rows_flatten_trials(self):
        report = run_suite(SuiteConfig(seed=1, trials=4, checks=("alt",)))
        rows = report.to_csv_rows()
        assert rows[0] == ("check", "trial", "holds", "slack")
        assert len(rows) == 1 + 4

    def test_thread_env_preserves_results(self, monkeypatch):
        cfg = SuiteConfig(seed=12, trials=6, checks=("sandwich", "fidelity_bounds"))
        serial = run_suite(cfg).results_dict()
        monkeypatch.setenv("RENYI_TOOLKIT_THREADS", "4")
        threaded = run_suite(cfg).results_dict()
        assert json.dumps(serial, sort_keys=True) == json.dumps(threaded, sort_keys=True)


class TestCli:
    def test_group_command_passes(self, capsys):
        code = cli_main(["fidelity", "--trials", "3", "--seed", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert "fidelity_bounds" in out and "pass" in out

    def test_suite_subset_with_json_report(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code = cli_main(
            ["suite", "--checks", "alt", "sandwich", "--trials", "2", "--seed", "3",
             "--out", str(out_path)]
        )
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["schema_version"] == 1
        assert set(payload["checks"]) == {"alt", "sandwich"}
        assert payload["failures"] == 0

    def test_suite_csv_report(self, tmp_path):
        out_path = tmp_path / "report.csv"
        code = cli_main(
            ["suite", "--checks", "alt", "--trials", "3", "--seed", "3",
             "--out", str(out_path), "--format", "csv"]
        )
        assert code == 0
        with open(out_path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["check", "trial", "holds", "slack"]
        assert len(rows) == 4

    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as info:
            cli_main(["divergence", "--bogus"])
        assert info.value.code == 2

    def test_unknown_check_exits_two(self):
        with pytest.raises(SystemExit) as info:
            cli_main(["suite", "--checks", "nope"])
        assert info.value.code == 2

    def test_list_command(self, capsys):
        assert cli_main(["list"]) == 0
        out = capsys.readouterr().out
        assert "sandwich" in out

    def test_console_script_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "renyi_toolkit.cli", "list"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "reverse_alt" in proc.stdout


class TestToleranceOverrides:
    def test_override_relaxes_pass_condition(self):
        # An absurdly loose override turns every trial into a pass; a
        # negative-margin-forbidding override flags tight trials.
        loose = run_suite(
            SuiteConfig(
                seed=4,
                trials=5,
                checks=("sandwich",),
                tolerance_overrides={"sandwich": 1e6},
            )
        )
        assert loose.failures == 0
        strict = run_suite(
            SuiteConfig(
                seed=4,
                trials=5,
                checks=("equality_generic",),
                tolerance_overrides={"equality_generic": -1e6},
            )
        )
        assert strict.failures == 5
