"""Golden-file regression: the pinned seed-7 dataset must evaluate to the
committed report bytes, so any behavior drift in generation, training,
prediction, or aggregation shows up as a readable diff."""

from pathlib import Path

from deixis.cli import main

GOLDEN = Path(__file__).parent / "golden"


def test_eval_seed7_matches_golden_reports(tmp_path):
    dataset = tmp_path / "seed7.json"
    assert main(["synth", "--seed", "7", "--per-condition", "30",
                 "--out", str(dataset)]) == 0
    json_out = tmp_path / "report.json"
    text_out = tmp_path / "report.txt"
    assert main(["eval", "--dataset", str(dataset), "--format", "json",
                 "--out", str(json_out)]) == 0
    assert main(["eval", "--dataset", str(dataset), "--format", "text-table",
                 "--out", str(text_out)]) == 0
    assert json_out.read_bytes() == (GOLDEN / "eval-seed7-30.json").read_bytes()
    assert text_out.read_bytes() == (GOLDEN / "eval-seed7-30.txt").read_bytes()
