"""CLI smoke tests: exit codes, machine-readable error JSON and artifact
layout, driven through a subprocess exactly as a user would run it."""

import json
import os
import subprocess
from pathlib import Path

import pytest


def cli_bin() -> str:
    value = os.environ.get("CATMANIP_BIN")
    assert value, "CATMANIP_BIN must point at the command-line binary"
    return value


def config_dir() -> Path:
    value = os.environ.get("CATMANIP_CONFIG_DIR")
    assert value, "CATMANIP_CONFIG_DIR must point at the golden configs"
    return Path(value)


def run_cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run([cli_bin(), *args], capture_output=True, text=True)


def stderr_error(proc: subprocess.CompletedProcess) -> dict:
    record = json.loads(proc.stderr.strip().splitlines()[-1])
    assert set(record) == {"error", "code", "message"}
    assert record["code"] == proc.returncode
    return record


def test_help_exits_zero():
    proc = run_cli("--help")
    assert proc.returncode == 0
    for sub in ("gen-data", "parse-demo", "predict", "reproject", "run",
                "report", "sweep"):
        assert sub in proc.stdout


def test_missing_config_is_a_config_error():
    proc = run_cli("run")
    assert proc.returncode == 10
    assert stderr_error(proc)["error"] == "ConfigError"


def test_nonexistent_config_is_a_missing_artifact():
    proc = run_cli("--config", "/nonexistent/scenario.ini", "run")
    assert proc.returncode == 11
    assert stderr_error(proc)["error"] == "MissingArtifact"


def test_report_requires_existing_results_file():
    proc = run_cli("report", "/nonexistent/results.csv")
    assert proc.returncode == 10
    assert stderr_error(proc)["error"] == "ConfigError"


def test_run_report_gen_data_artifacts(tmp_path: Path):
    cfg = str(config_dir() / "standing_transfer.ini")
    out = tmp_path / "run"
    proc = run_cli("--config", cfg, "--out", str(out), "--jobs", "2", "run")
    assert proc.returncode == 0, proc.stderr

    results = out / "results.csv"
    lines = results.read_text().splitlines()
    assert lines[0] == "scenario,seed,policy,success,ticks,final_err_mm,final_err_deg"
    assert len(lines) == 11  # header + 10 runs
    assert (out / "summary.csv").exists()

    # Replaying into a second directory gives byte-identical results.
    out2 = tmp_path / "run2"
    proc = run_cli("--config", cfg, "--out", str(out2), "--jobs", "2", "run")
    assert proc.returncode == 0, proc.stderr
    assert results.read_bytes() == (out2 / "results.csv").read_bytes()

    report_dir = tmp_path / "report"
    proc = run_cli("--out", str(report_dir), "report", str(results))
    assert proc.returncode == 0, proc.stderr
    summary = (report_dir / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("scenario,policy,runs,successes")
    assert any(row.startswith("standing_transfer,closed,10,") for row in summary[1:])

    data_dir = tmp_path / "data"
    proc = run_cli("--config", str(config_dir() / "dataset_battery.ini"),
                   "--out", str(data_dir), "--seed", "99", "gen-data")
    assert proc.returncode == 0, proc.stderr
    dataset = data_dir / "dataset"
    assert (dataset / "db" / "manifest.json").exists()
    scenes = sorted(p.name for p in (dataset / "scenes").iterdir())
    assert len(scenes) == 12
    for scene in scenes:
        for name in ("cloud.ply", "labels.json", "meta.json"):
            assert (dataset / "scenes" / scene / name).exists()


def test_parse_demo_and_reproject_artifacts(tmp_path: Path):
    cfg = str(config_dir() / "gear_insert_closed.ini")
    out = tmp_path / "demo"
    proc = run_cli("--config", cfg, "--out", str(out), "parse-demo")
    assert proc.returncode == 0, proc.stderr
    for name in ("demo_log.jsonl", "parsed.jsonl", "discretized.jsonl",
                 "last_inch.jsonl", "keypose.json"):
        assert (out / name).exists()
    keypose = json.loads((out / "keypose.json").read_text())
    assert 0 <= keypose["index"] < keypose["waypoints_total"]

    proc = run_cli("--config", cfg, "--out", str(out), "reproject")
    assert proc.returncode == 0, proc.stderr
    assert (out / "target.jsonl").exists()
    corr_lines = (out / "correspondence.csv").read_text().splitlines()
    assert corr_lines[0] == "demo_idx,novel_idx,residual"
    assert len(corr_lines) > 1
