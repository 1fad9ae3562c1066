import json
import math
import subprocess
import sys

import pytest

from deixis.cli import main
from deixis.foreground import mask_centroid
from deixis.gestures import save_gestures, GestureSequence, action_toward
from deixis.geometry import Point2
from deixis.scene import load_scene, piece_silhouette


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "deixis.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    scenes = root / "scenes"
    assert main(["gen-scenes", "--seed", "5", "--count", "3", "--pieces", "3",
                 "--out-dir", str(scenes)]) == 0
    model = root / "model.json"
    assert main(["train", "--scenes", str(scenes / "*.json"), "--out", str(model)]) == 0
    scene = load_scene(scenes / "scene-0000.json")
    target = mask_centroid(piece_silhouette(scene, 0))
    theta = 0.8
    origin = Point2(0.0, 8.0)
    dist = (target - origin).norm()
    half = theta / 2.0
    act = action_toward(origin, target, theta, dist * 3.0 * half / (2.0 * math.sin(half)))
    gestures = root / "gestures.json"
    save_gestures(GestureSequence([act]), gestures)
    return {
        "root": root,
        "scenes": scenes,
        "model": model,
        "scene_file": scenes / "scene-0000.json",
        "gestures": gestures,
    }


class TestGenScenes:
    def test_writes_count_files(self, workspace):
        files = sorted(workspace["scenes"].glob("scene-*.json"))
        assert len(files) == 3

    def test_deterministic_across_runs(self, workspace, tmp_path):
        again = tmp_path / "again"
        assert main(["gen-scenes", "--seed", "5", "--count", "3", "--pieces", "3",
                     "--out-dir", str(again)]) == 0
        for name in ("scene-0000.json", "scene-0001.json", "scene-0002.json"):
            assert (again / name).read_bytes() == (workspace["scenes"] / name).read_bytes()


class TestPredict:
    def test_byte_identical_reruns(self, workspace, tmp_path):
        out1, out2 = tmp_path / "p1.json", tmp_path / "p2.json"
        for out in (out1, out2):
            code = main([
                "predict", "--scene", str(workspace["scene_file"]),
                "--gestures", str(workspace["gestures"]),
                "--model", str(workspace["model"]), "--out", str(out),
            ])
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        payload = json.loads(out1.read_text())
        assert payload["abstained"] is False
        assert payload["piece_ids"] == [0]

    def test_pgm_written(self, workspace, tmp_path):
        pgm = tmp_path / "mask.pgm"
        main([
            "predict", "--scene", str(workspace["scene_file"]),
            "--gestures", str(workspace["gestures"]),
            "--model", str(workspace["model"]),
            "--out", str(tmp_path / "p.json"), "--pgm", str(pgm),
        ])
        assert pgm.read_text().startswith("P2\n128 128\n255\n")

    def test_abstention_reports_cleanly(self, workspace, tmp_path):
        gestures = tmp_path / "away.json"
        gestures.write_text(json.dumps([
            {"x": -5.0, "y": -5.0, "dx": -1.0, "dy": 0.0, "theta_rad": 0.3,
             "max_range": 2.0, "t": 0.0}
        ]))
        out = tmp_path / "abstain.json"
        code = main([
            "predict", "--scene", str(workspace["scene_file"]),
            "--gestures", str(gestures),
            "--model", str(workspace["model"]), "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["abstained"] is True
        assert payload["reason"] == "empty-region"


class TestSynthEval:
    def test_eval_deterministic_across_jobs(self, workspace, tmp_path):
        dataset = tmp_path / "dyads.json"
        assert main(["synth", "--seed", "3", "--per-condition", "2",
                     "--out", str(dataset)]) == 0
        outs = []
        for jobs in ("1", "2", "1"):
            out = tmp_path / f"report-{len(outs)}.json"
            assert main(["eval", "--dataset", str(dataset), "--format", "json",
                         "--jobs", jobs, "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_formats(self, workspace, tmp_path):
        dataset = tmp_path / "dyads.json"
        main(["synth", "--seed", "3", "--per-condition", "2", "--out", str(dataset)])
        table = tmp_path / "r.txt"
        csv = tmp_path / "r.csv"
        assert main(["eval", "--dataset", str(dataset), "--out", str(table)]) == 0
        assert main(["eval", "--dataset", str(dataset), "--format", "csv",
                     "--out", str(csv)]) == 0
        assert "NMSE" in table.read_text()
        assert csv.read_text().startswith("condition,n,mean_nmse")

    def test_synth_deterministic(self, workspace, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["synth", "--seed", "3", "--per-condition", "1", "--out", str(a)])
        main(["synth", "--seed", "3", "--per-condition", "1", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestOracleCheckCommand:
    def test_quick_suites_pass(self):
        proc = run_cli("oracle-check", "--suite", "nmse")
        assert proc.returncode == 0
        assert "[PASS] nmse-agreement" in proc.stdout
        proc = run_cli("oracle-check", "--suite", "t-cdf")
        assert proc.returncode == 0


class TestExitCodes:
    def test_missing_file_is_3(self, workspace):
        code = main(["predict", "--scene", "/nonexistent/scene.json",
                     "--gestures", str(workspace["gestures"]),
                     "--model", str(workspace["model"])])
        assert code == 3

    def test_malformed_scene_is_4(self, workspace, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        code = main(["predict", "--scene", str(bad),
                     "--gestures", str(workspace["gestures"]),
                     "--model", str(workspace["model"])])
        assert code == 4

    def test_usage_error_is_2(self):
        proc = run_cli("predict")  # missing required flags
        assert proc.returncode == 2

    def test_help_documents_exit_codes(self):
        proc = run_cli("--help")
        assert "Exit codes" in proc.stdout
        assert "enumeration cap" in proc.stdout
