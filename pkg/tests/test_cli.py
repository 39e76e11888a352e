import json

import pytest

from renet.cli import ExperimentConfig, main
from renet.trace import Torus, generate, write_trace_csv


def run_cli(*args):
    return main(list(args))


def test_config_round_trips():
    cfg = ExperimentConfig(workload="star", n=32, alpha=1.5, baselines="stat")
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_run_writes_reports(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "run", "--workload", "torus", "--n", "16", "--m", "400",
        "--c", "4", "--seed", "1", "--out", str(out),
    )
    assert code == 0
    for name in ("ledger.csv", "windows.csv", "snapshot.json", "summary.json"):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["invariants_ok"] is True
    assert summary["sparsity_ok"] is True
    assert summary["path_failures"] == 0
    assert summary["stat_avg"] == pytest.approx(1.0)
    assert summary["rho_vs_stat"] >= 1.0
    assert "oblivious_avg" in summary


def test_run_is_byte_deterministic(tmp_path):
    args = ["run", "--workload", "star", "--n", "16", "--m", "500", "--c", "0.5", "--seed", "3"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(*args, "--out", str(a)) == 0
    assert run_cli(*args, "--out", str(b)) == 0
    for name in ("ledger.csv", "windows.csv", "snapshot.json", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_run_with_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"workload": "torus", "n": 16, "m": 300, "c": 4.0, "seed": 2}))
    out = tmp_path / "out"
    code = run_cli("run", "--config", str(cfg), "--m", "100", "--out", str(out))
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["m"] == 100  # the flag overrides the file


def test_unknown_config_key_exits_two(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"workload": "torus", "bogus_key": 1}))
    assert run_cli("run", "--config", str(cfg)) == 2


def test_trace_file_ingestion(tmp_path):
    trace_path = tmp_path / "trace.csv"
    with open(trace_path, "w") as fh:
        write_trace_csv(generate(Torus(16, 200), seed=5), fh)
    out = tmp_path / "out"
    code = run_cli("run", "--trace", str(trace_path), "--c", "4", "--out", str(out))
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n"] == 16 and summary["m"] == 200


def test_missing_trace_file_exits_two(tmp_path):
    assert run_cli("run", "--trace", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o")) == 2


def test_entropy_command(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "entropy", "--workload", "torus", "--n", "16", "--m", "1000",
        "--window", "200", "--stride", "200", "--out", str(out),
    )
    assert code == 0
    lines = (out / "entropy.csv").read_text().splitlines()
    assert lines[0] == "t,HX,HY,HYgX,HXgY,HX_full,HY_full,HYgX_full,HXgY_full"
    assert len(lines) == 1 + 5


def test_compare_command(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "compare", "--n-list", "16,64", "--workloads", "torus,uniform",
        "--m", "300", "--c", "4", "--out", str(out),
    )
    assert code == 0
    lines = (out / "compare.csv").read_text().splitlines()
    assert lines[0].startswith("n,workload,renet_avg")
    assert len(lines) == 1 + 4


def test_compare_requires_n_list(tmp_path):
    assert run_cli("compare", "--out", str(tmp_path / "o")) == 2


def test_validate_clean_and_corrupted_snapshots(tmp_path):
    out = tmp_path / "out"
    run_cli("run", "--workload", "star", "--n", "16", "--m", "400", "--c", "0.5",
            "--seed", "7", "--out", str(out))
    snap_path = out / "snapshot.json"
    assert run_cli("validate", str(snap_path)) == 0

    snap = json.loads(snap_path.read_text())
    snap["edges"].append([13, 14, 1])  # phantom physical link
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(snap))
    assert run_cli("validate", str(bad_path)) == 1

    assert run_cli("validate", str(tmp_path / "missing.json")) == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert run_cli("validate", str(garbled)) == 2


def test_debug_env_enables_per_request_sweeps(tmp_path, monkeypatch):
    monkeypatch.setenv("RENET_DEBUG_INVARIANTS", "1")
    out = tmp_path / "out"
    code = run_cli("run", "--workload", "star", "--n", "16", "--m", "300",
                   "--c", "0.5", "--seed", "4", "--out", str(out))
    assert code == 0
