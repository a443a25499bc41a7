import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from schottky_qc.cli import WorkbenchError, cli, parse_scene

SCENES = Path(__file__).resolve().parents[1] / "examples" / "scenes"


def run(*args):
    return CliRunner().invoke(cli, [str(a) for a in args], catch_exceptions=False)


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_orbit_depth_six(tmp_path):
    r = run("orbit", "--scene", SCENES / "two_disks.json", "--depth", 6, "--out-dir", tmp_path)
    assert r.exit_code == 0, r.output
    assert "PASS  orbit nesting" in r.output
    orbit = rows(tmp_path / "orbit.csv")
    assert len(orbit) == 14
    lim = rows(tmp_path / "limit_points.csv")
    # disks B(±c, 1) have limit points ±√(c² - 1); here c = 1.5
    assert sorted(float(p["x"]) for p in lim) == pytest.approx([-1.25 ** 0.5, 1.25 ** 0.5],
                                                                abs=1e-8)
    svg = (tmp_path / "orbit.svg").read_text()
    assert 'viewBox="0 0 1000 1000"' in svg


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        r = run("orbit", "--scene", SCENES / "two_disks.json", "--depth", 5, "--out-dir", d)
        assert r.exit_code == 0
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f
    man = json.loads((a / "manifest.json").read_text())
    assert man["command"] == "orbit" and man["checks"] == {"orbit nesting": True}
    assert set(man["outputs"]) == {"orbit.csv", "limit_points.csv", "orbit.svg"}


def test_schema_violation_exits_with_invariant(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 1, "disks": [{"center": [0, 0], "radius": -1}]}))
    r = CliRunner().invoke(cli, ["orbit", "--scene", str(bad), "--out-dir", str(tmp_path / "o")])
    assert r.exit_code == 2
    assert "scene schema" in r.output


def test_dangling_reference_rejected():
    with pytest.raises(WorkbenchError) as e:
        parse_scene(json.dumps({"version": 1, "disks": [{"center": [0, 0], "radius": 1}],
                                "family": {"E": {"disk": 0}, "F": {"disk": 3}}}))
    assert e.value.invariant == "scene references"


def test_verify_requires_a_seed(tmp_path):
    r = CliRunner().invoke(cli, ["verify", "subannulus", "--out-dir", str(tmp_path)])
    assert r.exit_code == 2
    assert "seed required" in r.output


def test_verify_subannulus(tmp_path):
    r = run("verify", "subannulus", "--trials", 1000, "--seed", 7, "--out-dir", tmp_path)
    assert r.exit_code == 0, r.output
    assert "1000/1000 postcondition passes" in r.output
    assert len(rows(tmp_path / "subannulus.csv")) == 1000


def test_verify_failure_exits_one_and_names_the_invariant(tmp_path):
    r = CliRunner().invoke(cli, ["verify", "bilip", "--trials", "300", "--seed", "1",
                                 "--out-dir", str(tmp_path)])
    assert r.exit_code == 1
    assert "invariant violated: delta stability (pull)" in r.output


def test_modulus_narrow_passage(tmp_path):
    scene = tmp_path / "np.json"
    scene.write_text(json.dumps({"version": 1, "seed": 0,
                                 "preset": {"name": "narrow_passage", "gaps": [0.1, 0.01]}}))
    r = run("modulus", "--scene", scene, "--grid", 48, "--out-dir", tmp_path / "o")
    assert r.exit_code == 0, r.output
    table = rows(tmp_path / "o" / "modulus.csv")
    assert [t["mode"] for t in table] == ["classical", "transboundary"] * 2
    assert (tmp_path / "o" / "family.svg").exists()


def test_exhaust(tmp_path):
    r = run("exhaust", "--scene", SCENES / "tangent_disks.json", "--depth", 6, "--out-dir", tmp_path)
    assert r.exit_code == 0, r.output
    assert len(rows(tmp_path / "exhaust.csv")) == 12


def test_uniformize_three_loops(tmp_path):
    r = run("uniformize", "--scene", SCENES / "three_loops.json", "--out-dir", tmp_path)
    assert r.exit_code == 0, r.output
    assert len(rows(tmp_path / "circles.csv")) == 3
    trace = rows(tmp_path / "trace.csv")
    assert float(trace[-1]["circularity"]) < 1e-6
