import json
import os
import subprocess
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

CLI = os.environ.get("GRIDSTUDIES_CLI", "gridstudies")


def run(*args, cwd=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, cwd=cwd)


def manifest(directory, name="manifest.json"):
    return json.loads((Path(directory) / name).read_text())


def test_stability_sweep_outputs(tmp_path):
    out = tmp_path / "st"
    r = run("stability", "--sweep", "--out", out)
    assert r.returncode == 0, r.stderr
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "Power,Duration,Stability"
    assert len(lines) == 336
    ET.parse(out / "stability_map.svg")
    m = manifest(out)
    assert m["status"] == "ok"
    assert {"sweep.csv", "stability_map.svg", "cct.csv"} <= {f["path"] for f in m["outputs"]}
    assert all(f["bytes"] > 0 for f in m["outputs"])


def test_single_trace(tmp_path):
    r = run("stability", "--p-mw", 1998, "--duration-ms", 50, "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "trace.csv").read_text().startswith("t,delta_deg,speed_dev,Pe_pu\n")
    assert "Stability = 0" in (tmp_path / "summary.txt").read_text()


def test_unknown_key_exits_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"dist": {"runz": 5}}))
    r = run("dist", "--config", cfg, "--out", tmp_path / "o")
    assert r.returncode == 2
    assert "dist.runz" in r.stderr
    assert not (tmp_path / "o").exists()


def test_wrong_type_and_foreign_block_exit_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"lightning": {"n": "many"}}))
    r = run("lightning", "--config", cfg)
    assert r.returncode == 2 and "lightning.n" in r.stderr
    cfg.write_text(json.dumps({"study": "stability", "dist": {}}))
    r = run("--config", cfg)
    assert r.returncode == 2 and "'dist'" in r.stderr


def test_config_file_selects_study(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"study": "dist", "seed": 5, "out": str(tmp_path / "d"), "dist": {"case": "B2", "runs": 50}}))
    r = run("--config", cfg)
    assert r.returncode == 0, r.stderr
    m = manifest(tmp_path / "d")
    assert m["seed"] == 5
    assert m["config"]["dist"]["runs"] == 50
    assert m["config"]["dist"]["case"] == "B2"


def test_runtime_error_writes_manifest(tmp_path):
    r = run("phasor", "--network", tmp_path / "missing.json", "--out", tmp_path / "p")
    assert r.returncode == 1
    m = manifest(tmp_path / "p")
    assert m["status"] == "error"
    assert "missing.json" in m["error"]["message"]


@pytest.mark.parametrize(
    "args",
    [
        ["dist", "--case", "all", "--runs", "200", "--hours", "48"],
        ["lightning", "--n", "300"],
        ["fault-lab", "--mode", "test", "--rmax", "5"],
    ],
)
def test_rerun_is_byte_identical(tmp_path, args):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(*args, "--seed", 7, "--out", a).returncode == 0
    assert run(*args, "--seed", 7, "--threads", 1, "--out", b).returncode == 0
    csvs = sorted(p.name for p in a.glob("*.csv"))
    assert csvs
    for name in csvs:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_lightning_outputs(tmp_path):
    r = run("lightning", "--n", 500, "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    header = (tmp_path / "events.csv").read_text().splitlines()[0].split(",")
    for col in ["PhaseAngle", "StrokePeak", "FrontTime", "HalfPeak", "Wire", "Tower", "Flashover"]:
        assert col in header
    summary = (tmp_path / "summary.txt").read_text()
    assert "Number of strokes to ground = " in summary
    assert "Flashover rate = " in summary
    svg = ET.parse(tmp_path / "peak.svg").getroot()
    ns = "{http://www.w3.org/2000/svg}"
    counts = [int(r.get("data-count")) for r in svg.iter(ns + "rect") if r.get("class") == "bin"]
    assert len(counts) == 40 and sum(counts) == 500
    circles = list(ET.parse(tmp_path / "impacts.svg").getroot().iter(ns + "circle"))
    assert len(circles) == 500


def test_fault_lab_file_output(tmp_path):
    target = tmp_path / "train.csv"
    r = run("fault-lab", "--mode", "train", "--out", target)
    assert r.returncode == 0, r.stderr
    assert len(target.read_text().splitlines()) == 210
    assert manifest(tmp_path, "train.manifest.json")["outputs"][0]["path"] == "train.csv"


def test_ml_agreement(tmp_path):
    r = run("ml", "--epochs", 3000, "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    rows = (tmp_path / "agreement.csv").read_text().splitlines()
    assert rows[0] == "Model,Match,Mismatch,Count"
    assert {row.split(",")[0] for row in rows[1:]} == {"svm", "mlp-deep", "mlp-narrow", "knn"}
    json.loads((tmp_path / "mlp_deep.json").read_text())
