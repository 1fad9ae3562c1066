"""Batch entry points. Every command is a thin wrapper: parse flags, call the
library, serialize the result deterministically.

Exit codes:
  0  success
  1  unexpected internal error
  2  bad usage (argparse)
  3  missing input file
  4  malformed input (JSON schema, RLE, scene format)
  5  candidate count exceeded the enumeration cap
  6  oracle-check found a disagreement
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from pathlib import Path

from .checks import run_suites
from .errors import (
    EmptyRegionError,
    EnumerationCapError,
    NoCandidatesError,
    RleError,
    SceneFormatError,
)
from .evaluation import (
    GestureNoise,
    emit_report,
    evaluate,
    load_records,
    report_to_dict,
    save_records,
    synth_dyads,
    train_from_records,
)
from .foreground import ForegroundMap, rle_encode, to_pgm
from .gestures import load_gestures
from .recognition import (
    RankerConfig,
    load_known_objects,
    predict_foreground,
    save_known_objects,
    train,
)
from .scene import generate_scene, load_scene, save_scene, subset_foreground

EXIT_MISSING_FILE = 3
EXIT_MALFORMED = 4
EXIT_ENUM_CAP = 5
EXIT_ORACLE = 6


def _cmd_gen_scenes(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        scene = generate_scene(args.seed + i, args.pieces)
        save_scene(scene, out_dir / f"scene-{i:04d}.json")
    print(f"wrote {args.count} scenes to {out_dir}")
    return 0


def _cmd_train(args) -> int:
    paths = sorted(glob.glob(args.scenes))
    if not paths:
        print(f"no scene files match {args.scenes!r}", file=sys.stderr)
        return EXIT_MISSING_FILE
    wanted = None if args.labels == "all" else set(args.labels.split(","))
    groups = []
    for path in paths:
        scene = load_scene(path)
        for lab in scene.labels:
            if wanted is None or lab.label in wanted:
                groups.append((lab.label, [subset_foreground(scene, lab.piece_ids)]))
    if not groups:
        print("no matching labels found in the scene files", file=sys.stderr)
        return EXIT_MALFORMED
    save_known_objects(train(groups), args.out)
    print(f"trained {len(groups)} entries from {len(paths)} scenes -> {args.out}")
    return 0


def _cmd_predict(args) -> int:
    scene = load_scene(args.scene)
    gestures = load_gestures(args.gestures)
    known = load_known_objects(args.model)
    ranker = RankerConfig(c=args.c)
    result: dict
    try:
        top = predict_foreground(scene, gestures, known, ranker, cap=args.cap)
        mask = top.foreground
        result = {
            "abstained": False,
            "label": top.label,
            "score": top.score,
            "piece_ids": sorted(top.piece_ids),
            "centroid": {"x": top.centroid.x, "y": top.centroid.y},
            "foreground": {"w": mask.grid.w, "h": mask.grid.h, "rle": rle_encode(mask)},
        }
    except (NoCandidatesError, EmptyRegionError) as exc:
        mask = ForegroundMap.zeros(scene.grid)
        result = {
            "abstained": True,
            "reason": exc.code,
            "foreground": {"w": mask.grid.w, "h": mask.grid.h, "rle": rle_encode(mask)},
        }
    text = json.dumps(result, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.pgm:
        Path(args.pgm).write_text(to_pgm(mask))
    return 0


def _cmd_synth(args) -> int:
    noise = GestureNoise(
        position_sigma=args.position_sigma,
        direction_sigma=args.direction_sigma,
        theta_min=args.theta_min,
        theta_max=args.theta_max,
    )
    records = synth_dyads(args.seed, args.per_condition, noise)
    save_records(records, args.out)
    print(f"wrote {len(records)} records -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    records = load_records(args.dataset)
    if args.model:
        known = load_known_objects(args.model)
    else:
        known = train_from_records(records)
    report = evaluate(records, known, jobs=args.jobs)
    if args.format == "json":
        text = json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n"
    else:
        text = emit_report(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_oracle_check(args) -> int:
    results = run_suites(args.suite, seed=args.seed, cases=args.cases)
    failed = False
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"[{status}] {r.name}: {r.detail}")
        failed |= not r.ok
    return EXIT_ORACLE if failed else 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .recognition import load_known_objects as _load
    from .server import create_app

    model = _load(args.model) if args.model else None
    app = create_app(
        model=model, static_dir=args.static_dir, snapshot_path=args.snapshot
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deixis",
        description="Guided search over tangram scenes: gestures to foregrounds.",
        epilog="Exit codes:" + __doc__.split("Exit codes:")[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-scenes", help="write deterministic generated scenes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--pieces", type=int, default=4)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_gen_scenes)

    p = sub.add_parser("train", help="train known objects from labeled scenes")
    p.add_argument("--scenes", required=True, help="glob of scene JSON files")
    p.add_argument("--labels", default="all", help="'all' or comma-separated label names")
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="predict the referenced foreground")
    p.add_argument("--scene", required=True)
    p.add_argument("--gestures", required=True, help="gesture JSON file")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="write prediction JSON here instead of stdout")
    p.add_argument("--pgm", help="also write the predicted mask as plain PGM")
    p.add_argument("--cap", type=int, default=10, help="subset enumeration cap")
    p.add_argument("--c", type=float, default=1.0, help="ranker softening constant")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("synth", help="generate a synthetic dyad dataset")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--per-condition", type=int, default=30)
    p.add_argument("--position-sigma", type=float, default=GestureNoise().position_sigma)
    p.add_argument("--direction-sigma", type=float, default=GestureNoise().direction_sigma)
    p.add_argument("--theta-min", type=float, default=GestureNoise().theta_min)
    p.add_argument("--theta-max", type=float, default=GestureNoise().theta_max)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("eval", help="score a dataset and print the report")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", help="model JSON; trains from the dataset scenes if omitted")
    p.add_argument("--format", choices=("text-table", "json", "csv"), default="text-table")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("oracle-check", help="run fast-vs-reference agreement suites")
    p.add_argument("--suite", choices=("all", "nmse", "t-cdf", "predict"), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=200, help="predict-suite case count")
    p.set_defaults(func=_cmd_oracle_check)

    p = sub.add_parser("serve", help="run the HTTP session API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--model", help="model JSON used for all sessions")
    p.add_argument("--static-dir", help="serve the console bundle from this directory")
    p.add_argument("--snapshot", help="dump session snapshots to this JSON file on shutdown")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except (SceneFormatError, RleError, json.JSONDecodeError, KeyError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except EnumerationCapError as exc:
        print(f"enumeration cap exceeded: {exc}", file=sys.stderr)
        return EXIT_ENUM_CAP


if __name__ == "__main__":
    sys.exit(main())
