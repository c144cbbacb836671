import json
import subprocess
import sys
from pathlib import Path

import pytest

CLI = [sys.executable, "-m", "cdaimo.cli"]


def run_cli(*args, **kw):
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, timeout=60, **kw
    )


def write(tmp_path: Path, name: str, text: str) -> str:
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


class TestCheck:
    def test_clean_scenario_exit_0(self, tmp_path):
        path = write(tmp_path, "empty.cdaimo", "scenario empty\n")
        proc = run_cli("check", path)
        assert proc.returncode == 0
        assert "ok" in proc.stdout

    def test_usecase_exit_0(self, usecase_path):
        assert run_cli("check", usecase_path).returncode == 0

    def test_warnings_exit_1(self, tmp_path):
        path = write(
            tmp_path,
            "warn.cdaimo",
            "scenario w\nindividual x : DecisionMaker\ndata x hasAccuracy 0.5\n",
        )
        proc = run_cli("check", path)
        assert proc.returncode == 1
        assert "DomainWarning" in proc.stderr

    def test_errors_exit_2_with_position(self, tmp_path):
        path = write(tmp_path, "bad.cdaimo", "scenario b\ndata ghost hasAccuracy 0.5\n")
        proc = run_cli("check", path)
        assert proc.returncode == 2
        assert ":2:" in proc.stderr
        assert "UnknownName" in proc.stderr


class TestReason:
    def test_machine_report(self, usecase_path):
        proc = run_cli("reason", usecase_path, "--format", "json")
        assert proc.returncode == 0
        obj = json.loads(proc.stdout)
        assert obj["decisions"][0]["mitigation_required"] is True

    def test_trace_cites_r1_trigger(self, usecase_path):
        proc = run_cli("reason", usecase_path, "--trace")
        assert proc.returncode == 0
        assert "hasDataQuality 0.45" in proc.stdout
        assert "0.45 <= 0.5" in proc.stdout

    def test_output_file(self, usecase_path, tmp_path):
        out = tmp_path / "report.json"
        proc = run_cli("reason", usecase_path, "--format", "json", "-o", str(out))
        assert proc.returncode == 0
        assert json.loads(out.read_text())["scenario"] == "usecase"

    def test_byte_identical_runs(self, usecase_path):
        a = run_cli("reason", usecase_path, "--format", "json").stdout
        b = run_cli("reason", usecase_path, "--format", "json").stdout
        assert a == b

    def test_load_failure_exit_2(self, tmp_path):
        path = write(tmp_path, "bad.cdaimo", "scenario b\nclass X : Ghost\n")
        assert run_cli("reason", path).returncode == 2

    def test_no_color_env(self, usecase_path):
        proc = run_cli("reason", usecase_path)
        assert "\x1b[" not in proc.stdout  # piped stdout is not a tty


class TestSeed:
    def test_dump_contains_schema_and_rules(self):
        proc = run_cli("seed", "--dump")
        assert proc.returncode == 0
        assert "class AIDSS : TargetAISystem" in proc.stdout
        assert "enum SeverityLevel Negligible < Minor < Moderate < Severe < Catastrophic" in proc.stdout
        assert "axiom R1 " in proc.stdout
        assert "hasDataQuality max 0.5" in proc.stdout

    def test_dump_reparses(self):
        from cdaimo.scenario import parse_scenario

        proc = run_cli("seed", "--dump")
        doc = parse_scenario(proc.stdout)
        assert doc.id == "seed"
        assert len(doc.directives) > 70

    def test_summary(self):
        proc = run_cli("seed")
        assert proc.returncode == 0
        assert "classes" in proc.stdout


class TestWhatIf:
    def test_mitigation_flip(self, usecase_path):
        proc = run_cli("whatif", usecase_path, "--set", "lm1.hasProbability=0.6")
        assert proc.returncode == 0
        assert "dec1.mitigation_required: true -> false" in proc.stdout

    def test_json_diff(self, usecase_path):
        proc = run_cli(
            "whatif", usecase_path, "--set", "dq1.hasDataQuality=0.9", "--format", "json"
        )
        obj = json.loads(proc.stdout)
        fields = {d["field"] for d in obj["diff"]}
        assert "collateral_risk_flag" in fields

    def test_no_changes(self, usecase_path):
        proc = run_cli("whatif", usecase_path, "--set", "lm1.hasProbability=0.81")
        assert proc.returncode == 0
        assert "no report changes" in proc.stdout
