"""Drives the rbcscan executable and checks outputs and exit codes."""

import csv
import io
import json
import os
import subprocess

import pytest

CLI = os.environ.get("RBCSCAN_CLI")
DATA_DIR = os.environ.get(
    "RBCSCAN_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data")
)

pytestmark = pytest.mark.skipif(not CLI, reason="RBCSCAN_CLI not set")


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_analytic_rows():
    out = run("analytic", "--ap", "0.7,1")
    assert out.returncode == 0
    table = rows(out.stdout)
    assert table[0] == ["ap", "t1_s", "t2_s"]
    assert table[1] == ["0.7", "65", "21.4"]
    assert table[2] == ["1", "65", "2.2"]
    assert table[-1][0] == "breakeven_ap"


def test_analytic_single_point():
    table = rows(run("analytic", "--ap-min", "0.3", "--points", "1").stdout)
    assert len(table) == 3


def test_simulate(tmp_path):
    out_file = tmp_path / "sim.csv"
    scenario = os.path.join(DATA_DIR, "scenarios", "reference_setup.json")
    out = run("simulate", scenario, "--trials", "200000", "-o", str(out_file))
    assert out.returncode == 0, out.stderr
    table = rows(out_file.read_text())
    assert table[0] == ["strategy", "trials", "mean_s", "stderr_s", "analytic_s", "relative_error"]
    by_name = {r[0]: r for r in table[1:]}
    assert set(by_name) == {"traditional", "guided", "pipeline"}
    for r in table[1:]:
        assert float(r[5]) < 0.01
    again = run("simulate", scenario, "--trials", "200000")
    assert again.stdout == out_file.read_text()


def test_geometry_defaults():
    table = rows(run("geometry").stdout)
    assert len(table) == 9
    assert table[1] == ["120", "1280", "720", "124", "62", "1"]
    assert table[2] == ["120", "640", "360", "62", "31", "1"]


def test_eval_fixture():
    out = run(
        "eval",
        "--gt", os.path.join(DATA_DIR, "fixtures", "annotations_small.json"),
        "--det", os.path.join(DATA_DIR, "fixtures", "detections_small.json"),
    )
    assert out.returncode == 0, out.stderr
    table = rows(out.stdout)
    assert [r[0] for r in table[1:]].count("ap") == 10
    assert table[-2][0] == "map"


def test_augment(tmp_path):
    out_file = tmp_path / "aug.json"
    src = os.path.join(DATA_DIR, "fixtures", "annotations_small.json")
    assert run("augment", src, "-o", str(out_file)).returncode == 0
    doubled = json.loads(out_file.read_text())
    assert len(doubled["objects"]) == 8


def test_exit_codes(tmp_path):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{ not json")
    assert run("augment", str(bad_json)).returncode == 1

    bad_score = tmp_path / "det.json"
    bad_score.write_text(json.dumps({"detections": [
        {"image_id": "lab_120cm", "bbox": [0, 0, 1, 1], "score": 1.5, "class": "smartphone"}]}))
    out = run("eval", "--gt", os.path.join(DATA_DIR, "fixtures", "annotations_small.json"),
              "--det", str(bad_score))
    assert out.returncode == 2
    assert "detections[0].score" in out.stderr

    assert run("analytic", "--points", "0").returncode == 3
    assert run("no-such-command").returncode == 3
    assert run("geometry", "--resolutions", "1280x1024").returncode == 2
    assert run("analytic", "--help").returncode == 0
