"""End-to-end checks of the silentflow command-line tool.

SILENTFLOW_BIN points at the executable and SILENTFLOW_SCHEMAS at the
schema directory; both are set by ctest.
"""

import csv
import hashlib
import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest
from referencing import Registry, Resource

BIN = os.environ.get("SILENTFLOW_BIN", "build/tools/silentflow")
SCHEMAS = Path(os.environ.get("SILENTFLOW_SCHEMAS", "schemas"))
ENTROPY = "00112233445566778899aabbccddeeff"
HEADER = 22


def run(*args, check=None):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, timeout=600)
    if check is not None:
        assert proc.returncode == check, proc.stderr
    return proc


def sha(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def validate(kind, path):
    docs = [json.loads(p.read_text()) for p in SCHEMAS.glob("*.schema.json")]
    registry = Registry().with_resources([(d["$id"], Resource.from_contents(d)) for d in docs])
    schema = json.loads((SCHEMAS / f"{kind}.schema.json").read_text())
    jsonschema.Draft202012Validator(schema, registry=registry).validate(json.loads(Path(path).read_text()))


@pytest.fixture(scope="module")
def desk(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk")
    run("gen", "--entropy", ENTROPY, "--out", out, check=0)
    return out


def test_gen_writes_all_artifacts(desk):
    for name in ["sender.scot", "receiver.scot", "ledger.json", "run_config.json", "timings.json"]:
        assert (desk / name).is_file()


def test_gen_then_verify_succeeds(desk, tmp_path):
    report = tmp_path / "verify.json"
    run("verify", "--sender", desk / "sender.scot", "--receiver", desk / "receiver.scot", "--report", report, check=0)
    doc = json.loads(report.read_text())
    assert doc["ok"] and doc["failures"] == 0 and doc["total"] == 1 << 14
    validate("verify", report)


def test_ledger_reports_zero_generation_traffic(desk):
    ledger = json.loads((desk / "ledger.json").read_text())
    assert ledger["generation"] == {"bytes_between_parties": 0, "rounds": 0}
    assert ledger["audit"] == []
    h = ledger["params"]["h"]
    assert ledger["trust_crossings"]["receiver_per_tree"] == h + 1


def test_artifacts_match_schemas(desk):
    validate("ledger", desk / "ledger.json")
    validate("run_config", desk / "run_config.json")
    validate("timings", desk / "timings.json")


def test_flipped_key_byte_fails_exactly_one_cot(desk, tmp_path):
    data = bytearray((desk / "sender.scot").read_bytes())
    data[HEADER + 16 + 16 * 5 + 3] ^= 0x40  # K[5]
    bad = tmp_path / "sender.scot"
    bad.write_bytes(bytes(data))
    report = tmp_path / "verify.json"
    proc = run("verify", "--sender", bad, "--receiver", desk / "receiver.scot", "--report", report)
    assert proc.returncode == 1
    doc = json.loads(report.read_text())
    assert doc["failures"] == 1 and doc["first_failure"] == 5 and not doc["ok"]


@pytest.mark.parametrize("mutate", ["truncate", "magic", "swap_roles"])
def test_malformed_input_exits_3(desk, tmp_path, mutate):
    data = bytearray((desk / "sender.scot").read_bytes())
    receiver = desk / "receiver.scot"
    if mutate == "truncate":
        data = data[:-7]
    elif mutate == "magic":
        data[0] ^= 0xFF
    bad = tmp_path / "sender.scot"
    bad.write_bytes(bytes(data))
    if mutate == "swap_roles":
        bad, receiver = receiver, desk / "sender.scot"
    assert run("verify", "--sender", bad, "--receiver", receiver).returncode == 3


def test_missing_file_exits_3(tmp_path):
    assert run("verify", "--sender", tmp_path / "nope", "--receiver", tmp_path / "nope").returncode == 3


@pytest.mark.parametrize(
    "args",
    [
        ["dse", "--s-blocks", ""],
        ["dse", "--batches", ""],
        ["gen", "--preset", "nonsense"],
        ["gen", "--k", "0"],
        ["gen", "--height", "0"],
        ["gen", "--n", "1000"],
        ["gen", "--profile", "dialup"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_2(args, tmp_path):
    out = ["--out", tmp_path] if args[:1] == ["gen"] else []
    assert run(*args, *out).returncode == 2


def test_pinned_entropy_is_deterministic_across_runs_and_workers(tmp_path):
    digests = []
    for i, workers in enumerate([1, 4, 1, 4]):
        out = tmp_path / f"run{i}"
        run("gen", "--entropy", ENTROPY, "--workers", workers, "--out", out, check=0)
        digests.append(tuple(sha(out / f) for f in ["sender.scot", "receiver.scot", "ledger.json"]))
    assert len(set(digests)) == 1


def test_different_entropy_changes_output(tmp_path):
    run("gen", "--entropy", ENTROPY, "--preset", "small", "--out", tmp_path / "a", check=0)
    run("gen", "--entropy", "ff" * 16, "--preset", "small", "--out", tmp_path / "b", check=0)
    assert sha(tmp_path / "a" / "sender.scot") != sha(tmp_path / "b" / "sender.scot")


def test_config_file_matches_flags(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(f'[gen]\npreset = "small"\nentropy = "{ENTROPY}"\n')
    run("--config", cfg, "gen", "--out", tmp_path / "a", check=0)
    run("gen", "--preset", "small", "--entropy", ENTROPY, "--out", tmp_path / "b", check=0)
    assert sha(tmp_path / "a" / "sender.scot") == sha(tmp_path / "b" / "sender.scot")


def test_full_preset_accepts_large_parameters(tmp_path):
    run("gen", "--preset", "full", "--entropy", ENTROPY, "--out", tmp_path, check=0)
    cfg = json.loads((tmp_path / "run_config.json").read_text())
    assert cfg["params"]["k"] == 32771 and cfg["params"]["n"] == 1 << 20
    run("verify", "--sender", tmp_path / "sender.scot", "--receiver", tmp_path / "receiver.scot", check=0)


def test_cost_report(tmp_path):
    out = tmp_path / "cost.json"
    run("cost", "--compute-per-cot", "1e-7", "--json", out, check=0)
    validate("cost", out)
    rows = {r["protocol"]: r for r in json.loads(out.read_text())["rows"]}
    silent = rows["silentflow"]
    assert silent["bytes"] == 0 and silent["rounds"] == 0
    assert silent["profile_variation"] == 0.0
    assert silent["compute_source"] == "flag"
    fitted = rows["ferret_model_fitted"]["latency_s"]
    assert fitted["lan"] == pytest.approx(9.703, rel=1e-9)
    assert fitted["wan"] == pytest.approx(17.02, rel=0.25)
    # Pinned compute makes the report reproducible.
    again = tmp_path / "again.json"
    run("cost", "--compute-per-cot", "1e-7", "--json", again, check=0)
    assert out.read_bytes() == again.read_bytes()


def test_dse_default_grid(tmp_path):
    table, summary = tmp_path / "dse.csv", tmp_path / "dse.json"
    run("dse", "--reps", "3", "--csv", table, "--json", summary, check=0)
    rows = list(csv.DictReader(table.open()))
    assert len(rows) >= 20
    assert {int(r["s_block"]) for r in rows} == {3, 4, 6, 12}
    assert {int(r["batch_size"]) for r in rows} == {16, 32, 64, 128, 256}
    validate("dse", summary)
    doc = json.loads(summary.read_text())
    assert isinstance(doc["ggm_decreasing_in_s_block"], bool)
    assert isinstance(doc["vm_decreasing_in_batch"], bool)


def test_bench_summary(tmp_path):
    out = tmp_path / "bench.json"
    run("bench", "--reps", "3", "--json", out, check=0)
    validate("bench", out)
    assert json.loads(out.read_text())["desk"]["verified"]
