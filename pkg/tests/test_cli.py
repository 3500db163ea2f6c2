"""Command line behavior: exit codes, output formats, file resolution.

The CLI is exercised through main(argv) so assertions can target stdout
and stderr separately; one subprocess test checks the module entry point.
Golden CSV files under tests/golden/ pin the exported bytes.
"""

from __future__ import annotations

import csv
import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from norm_engine import __version__
from norm_engine.cli import ENV_SCENARIO_PATH, main
from norm_engine.spanish_steps import bundled_dir

GOLDEN = Path(__file__).parent.parent / "golden"
SCENARIO_FILE = bundled_dir() / "spanish_steps.cssm"

ESCALATION = [
    "alpha10 Client x=0.5 y=0.6",
    "alpha11 Seller",
    "alpha10 Client x=0.7 y=0.8",
    "alpha11 Seller",
    "alpha10 Client x=0.9 y=1.0",
]


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows_of(text: str) -> list[list[str]]:
    return list(csv.reader(io.StringIO(text)))


class TestValidate:

    def test_bundled_file_is_clean(self, capsys):
        code, out, err = run_cli(capsys, "validate", str(SCENARIO_FILE))
        assert code == 0
        assert err == ""
        assert out.rstrip().endswith("0 error(s), 12 warning(s)")
        assert "warning UNVERIFIED_EDGE" in out

    def test_error_file_fails(self, capsys, tmp_path):
        bad = tmp_path / "bad.cssm"
        bad.write_text(SCENARIO_FILE.read_text(encoding="utf-8")
                       + "\nedge TP2 Seller alpha1 -> TS\n", encoding="utf-8")
        code, out, err = run_cli(capsys, "validate", str(bad))
        assert code == 1
        assert "error TERMINAL_EDGE" in out
        assert out.rstrip().splitlines()[-1].startswith("1 error(s),")

    def test_missing_file_is_environment_error(self, capsys, tmp_path):
        code, out, err = run_cli(capsys, "validate", str(tmp_path / "no.cssm"))
        assert code == 2
        assert err.startswith("error:")


class TestRun:

    def test_human_listing_reports_terminal(self, capsys):
        code, out, err = run_cli(capsys, "run", "spanish_steps", "sell_success")
        assert code == 0
        assert out.rstrip().endswith("terminal TP2 after 10 steps")
        assert "α13(t=15) by Seller" in out
        assert out.splitlines()[0].startswith("step")

    def test_sell_fail_reaches_the_other_terminal(self, capsys):
        code, out, _ = run_cli(capsys, "run", "spanish_steps", "sell_fail")
        assert code == 0
        assert out.rstrip().endswith("terminal TN2 after 10 steps")

    @pytest.mark.parametrize("trace_id, keys", [
        ("sell_success", "politeness.client.crowd,dignity.client.crowd,"
                         "wealth.client.client,q-gift.client,q-agreed.crowd"),
        ("sell_fail", "dignity.seller.crowd,politeness.seller.crowd,"
                      "q-agreed.crowd"),
    ])
    def test_csv_export_matches_golden(self, capsys, trace_id, keys):
        code, out, _ = run_cli(capsys, "run", "spanish_steps", trace_id,
                               "--export", "csv", "--keys", keys)
        assert code == 0
        golden = (GOLDEN / f"{trace_id}.csv").read_text(encoding="utf-8")
        assert out == golden

    def test_csv_output_is_stable_across_runs(self, capsys):
        argv = ("run", "spanish_steps", "sell_success", "--export", "csv",
                "--keys", "politeness.client.crowd,q-gift.client")
        _, first, _ = run_cli(capsys, *argv)
        _, second, _ = run_cli(capsys, *argv)
        assert first == second

    def test_csv_politeness_column(self, capsys):
        code, out, _ = run_cli(capsys, "run", "spanish_steps", "sell_success",
                               "--export", "csv",
                               "--keys", "politeness.client.crowd")
        assert code == 0
        rows = rows_of(out)
        assert rows[0] == ["step", "action", "actor", "args", "progress",
                           "politeness.client.crowd"]
        assert len(rows) == 11
        column = [row[5] for row in rows[1:]]
        assert column == ["0.75"] * 6 + ["0.750366479105987"] * 4

    def test_json_export_shape(self, capsys):
        code, out, _ = run_cli(capsys, "run", "spanish_steps", "sell_success",
                               "--export", "json",
                               "--keys", "politeness.client.crowd",
                               "--keys", "q-gift.client")
        assert code == 0
        doc = json.loads(out)
        assert doc["scenario"] == "spanish_steps"
        assert doc["variant"] == "with_spouse"
        assert [k["label"] for k in doc["keys"]] == [
            "politeness.client.crowd", "q-gift.client"]
        assert doc["keys"][1]["key"] == "cb(Q-Gift,Client,Client)"
        assert doc["initial"]["progress"] == "TS"
        assert doc["initial"]["values"] == [0.75, 0.0]
        assert len(doc["steps"]) == 10
        assert doc["steps"][4]["args"] == {"t": 15.0}
        assert doc["steps"][-1]["terminated"] is True
        assert doc["steps"][-1]["progress"] == "TP2"
        assert all(isinstance(v, float) for v in doc["steps"][0]["values"])

    def test_out_writes_file_instead_of_stdout(self, capsys, tmp_path):
        target = tmp_path / "series.csv"
        code, out, _ = run_cli(capsys, "run", "spanish_steps", "sell_success",
                               "--export", "csv",
                               "--keys", "politeness.client.crowd,"
                                         "dignity.client.crowd,"
                                         "wealth.client.client,"
                                         "q-gift.client,q-agreed.crowd",
                               "--out", str(target))
        assert code == 0
        assert out == ""
        golden = (GOLDEN / "sell_success.csv").read_text(encoding="utf-8")
        assert target.read_text(encoding="utf-8") == golden

    def test_variant_override(self, capsys):
        code, out, _ = run_cli(capsys, "run", "spanish_steps", "sell_success",
                               "--variant", "no_spouse")
        assert code == 0
        assert out.rstrip().endswith("terminal TP2 after 10 steps")
        code, _, err = run_cli(capsys, "run", "spanish_steps", "sell_success",
                               "--variant", "no_spouse",
                               "--keys", "politeness.spouse.crowd")
        assert code == 1
        assert "unknown key" in err

    def test_malformed_key_is_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "run", "spanish_steps", "sell_success",
                               "--keys", "politeness.client")
        assert code == 1
        assert "metric keys are" in err

    def test_unknown_key_lists_known_keys(self, capsys):
        code, _, err = run_cli(capsys, "run", "spanish_steps", "sell_success",
                               "--keys", "honor.client.crowd")
        assert code == 1
        assert "unknown key 'honor.client.crowd'" in err
        assert "cb(Q-Gift,Client,Client)" in err
        assert err.count("cssm(") == 22
        assert err.count("cb(") == 11

    def test_unknown_trace_id(self, capsys):
        code, _, err = run_cli(capsys, "run", "spanish_steps", "nope")
        assert code == 2
        assert "no trace file for 'nope'" in err
        assert str(bundled_dir() / "traces") in err

    def test_unknown_scenario_id(self, capsys):
        code, _, err = run_cli(capsys, "run", "ghost", "sell_success")
        assert code == 2
        assert "no scenario file for 'ghost'" in err
        assert str(bundled_dir()) in err

    def test_trace_for_a_different_scenario(self, capsys, tmp_path):
        stray = tmp_path / "stray.trace"
        stray.write_text("trace stray scenario=other\nalpha1 Seller\n",
                         encoding="utf-8")
        code, _, err = run_cli(capsys, "run", "spanish_steps", str(stray))
        assert code == 1
        assert "belongs to scenario 'other'" in err

    def test_scenario_search_path_env(self, capsys, tmp_path, monkeypatch):
        empty = tmp_path / "empty"
        empty.mkdir()
        local = tmp_path / "local"
        shutil.copytree(bundled_dir(), local)
        monkeypatch.setenv(ENV_SCENARIO_PATH,
                           f"{empty}{__import__('os').pathsep}{local}")
        code, out, _ = run_cli(capsys, "run", "spanish_steps", "sell_success")
        assert code == 0
        assert out.rstrip().endswith("terminal TP2 after 10 steps")
        monkeypatch.setenv(ENV_SCENARIO_PATH, str(empty))
        code, _, err = run_cli(capsys, "run", "spanish_steps", "sell_success")
        assert code == 2
        assert str(empty) in err


class TestBranch:

    def branch_args(self, *extra: str) -> list[str]:
        argv = ["branch", "spanish_steps", "sell_success", "--at", "8"]
        for line in ESCALATION:
            argv += ["--then", line]
        argv += ["--compare", "politeness.client.crowd,dignity.client.crowd"]
        return argv + list(extra)

    def test_comparison_table(self, capsys):
        code, out, _ = run_cli(capsys, *self.branch_args())
        assert code == 0
        lines = out.rstrip().splitlines()
        assert len(lines) == 14
        assert "politeness.client.crowd [base]" in lines[0]
        assert "politeness.client.crowd [branch]" in lines[0]
        assert "0.371002" in lines[-1]
        assert lines[-1].count("-") >= 2

    def test_comparison_csv_matches_golden(self, capsys):
        code, out, _ = run_cli(capsys, *self.branch_args("--export", "csv"))
        assert code == 0
        golden = (GOLDEN / "escalates_compare.csv").read_text(encoding="utf-8")
        assert out == golden

    def test_branch_point_out_of_range(self, capsys):
        code, _, err = run_cli(capsys, "branch", "spanish_steps",
                               "sell_success", "--at", "99")
        assert code == 1
        assert "step index 99 outside 0..10" in err

    def test_illegal_then_action(self, capsys):
        code, _, err = run_cli(capsys, "branch", "spanish_steps",
                               "sell_success", "--at", "8",
                               "--then", "alpha3 Client")
        assert code == 1
        assert "is not available at S8" in err

    def test_malformed_then_action(self, capsys):
        code, _, err = run_cli(capsys, "branch", "spanish_steps",
                               "sell_success", "--at", "8", "--then", "x=")
        assert code == 1
        assert "bad action line" in err

    def test_branch_at_zero_without_actions(self, capsys):
        code, out, _ = run_cli(capsys, "branch", "spanish_steps",
                               "sell_success", "--at", "0",
                               "--compare", "politeness.client.crowd",
                               "--export", "csv")
        assert code == 0
        rows = rows_of(out)
        assert len(rows) == 11
        for row in rows[1:]:
            assert row[2] == ""
            assert row[4] == ""
            assert row[3] != ""


class TestGraph:

    def test_dot_output(self, capsys):
        code, out, _ = run_cli(capsys, "graph", "spanish_steps")
        assert code == 0
        assert out.startswith("digraph")
        assert '"S7" -> "S8" [label="Seller:α14"]' in out
        assert out.count("doublecircle") == 4
        assert '"TS" [style=bold];' in out

    def test_graph_by_path_matches_by_id(self, capsys):
        _, by_id, _ = run_cli(capsys, "graph", "spanish_steps")
        _, by_path, _ = run_cli(capsys, "graph", str(SCENARIO_FILE))
        assert by_id == by_path

    def test_unwritable_out_is_environment_error(self, capsys, tmp_path):
        target = tmp_path / "missing" / "graph.dot"
        code, _, err = run_cli(capsys, "graph", "spanish_steps",
                               "--out", str(target))
        assert code == 2
        assert err.startswith("error:")


class TestTopLevel:

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert "norm-engine" in out
        assert __version__ in out

    def test_no_command_prints_help(self, capsys):
        code, out, _ = run_cli(capsys)
        assert code == 0
        assert "usage:" in out

    def test_unknown_command_is_a_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bogus"])
        assert exc.value.code == 2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "norm_engine",
             "validate", str(SCENARIO_FILE)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "0 error(s), 12 warning(s)" in proc.stdout
