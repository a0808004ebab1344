import json
import subprocess
import sys
from pathlib import Path

import pytest

from dinsim.bundled import bundled_model, bundled_model_path
from dinsim.cli import main
from dinsim.export import (
    ExportFormatError,
    build_document,
    dumps_document,
    load_document,
    windows_from_document,
    write_document,
)
from dinsim.simulate import SimConfig, run

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden_phoscycle_seed1.json"


def _golden_config():
    return SimConfig(t_end=60.0, tau=2.0, seed=1)


# -- document construction & round-trip ---------------------------------------


def test_document_round_trip_exact(tmp_path):
    model = bundled_model("phoscycle")
    result = run(model, _golden_config())
    doc = build_document(model, result, "phoscycle")
    path = tmp_path / "out.json"
    write_document(doc, path)
    loaded = load_document(path)
    assert loaded == doc
    wins = windows_from_document(loaded)
    for w, orig in zip(wins, result.din["activity"]):
        assert w.hits == orig.hits
        assert w.matrix == orig.matrix
        assert (w.t_start, w.t_end, w.partial) == (orig.t_start, orig.t_end, orig.partial)


def test_document_omits_zero_links_and_has_dense_ids():
    doc = load_document(GOLDEN)
    ids = [r["id"] for r in doc["meta"]["rules"]]
    assert ids == list(range(len(ids)))
    for w in doc["windows"]:
        assert all(link["value"] != 0 for link in w["links"])
        assert [n["rule"] for n in w["nodes"]] == ids


def test_golden_export_byte_identical():
    model = bundled_model("phoscycle")
    result = run(model, _golden_config())
    doc = build_document(model, result, "phoscycle")
    assert dumps_document(doc).encode() == GOLDEN.read_bytes()


def test_load_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ExportFormatError):
        load_document(bad)
    bad.write_text('{"meta": {}}')
    with pytest.raises(ExportFormatError):
        load_document(bad)


# -- CLI ----------------------------------------------------------------------


def _cli(*args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "dinsim", *args], capture_output=True, text=True, **kwargs
    )


def test_cli_check_ok():
    proc = _cli("check", str(bundled_model_path("two_state")))
    assert proc.returncode == 0
    assert "rules (2)" in proc.stdout
    assert "'phos'" in proc.stdout


def test_cli_check_parse_error(tmp_path):
    bad = tmp_path / "bad.ka"
    bad.write_text("%agent: A(x)\n'r' A(q) -> A(q) @ 1\n")
    proc = _cli("check", str(bad))
    assert proc.returncode == 2
    assert "unknown-site" in proc.stderr
    assert proc.stdout == ""


def test_cli_missing_file_is_io_error():
    proc = _cli("check", "/nonexistent/model.ka")
    assert proc.returncode == 3


def test_cli_usage_error():
    proc = _cli("simulate", str(bundled_model_path("two_state")), "--t-end", "1")
    assert proc.returncode == 1
    assert "usage error" in proc.stderr


def test_cli_bad_config_value():
    proc = _cli(
        "simulate", str(bundled_model_path("two_state")),
        "--t-end", "1", "--tau", "5", "--out", "/tmp/x.json",
    )
    assert proc.returncode == 1
    assert "tau" in proc.stderr


def test_cli_simulate_reproducible(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    args = [
        "simulate", str(bundled_model_path("two_state")),
        "--t-end", "10", "--tau", "0.5", "--seed", "1",
    ]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_cluster_huge_threshold_all_unclustered(tmp_path):
    out = tmp_path / "o.json"
    assert main([
        "simulate", str(bundled_model_path("two_state")),
        "--t-end", "10", "--tau", "0.5", "--seed", "1", "--out", str(out),
    ]) == 0
    proc = _cli("cluster", str(out), "--threshold", "1e9", "--at", "0", "--json")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["clusters"] == []
    assert payload["unclustered"] == [0, 1]


def test_cli_cluster_modes(tmp_path):
    proc = _cli("cluster", str(GOLDEN), "--threshold", "0.05", "--mode", "window:2", "--at", "3")
    assert proc.returncode == 0
    assert "window 3" in proc.stdout
    proc = _cli("cluster", str(GOLDEN), "--threshold", "0.05", "--mode", "bogus")
    assert proc.returncode == 1


def test_cli_trace_and_max_events(tmp_path):
    out = tmp_path / "o.json"
    trace = tmp_path / "t.ndjson"
    assert main([
        "simulate", str(bundled_model_path("two_state")),
        "--t-end", "50", "--tau", "1", "--seed", "2",
        "--max-events", "200", "--trace", str(trace), "--out", str(out),
    ]) == 0
    assert len(trace.read_text().splitlines()) == 200
    doc = load_document(out)
    assert doc["meta"]["status"] == "max_events"
