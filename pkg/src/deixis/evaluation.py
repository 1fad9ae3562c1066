"""Experimental harness: synthetic dyad episodes, per-condition scoring, and
significance tables.

Episodes come in four conditions crossing gesture count with goal type:
single vs multiple gestures (SG/MG) and object-level "known" vs pixel-level
"unknown" goals (KG/UG). Real dyad recordings are not available, so
``synth_dyads`` generates deterministic seeded stand-ins: scenes are sampled,
goals are labeled parts (KG) or thresholded random salience blobs (UG), and
gestures aim at the goal centroid with configurable Gaussian perturbation.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .errors import EmptyRegionError, NoCandidatesError
from .foreground import ForegroundMap, SalienceMap, align, mask_centroid, nmse, threshold
from .gestures import DeicticAction, GestureSequence, sequence_from_list, sequence_to_list
from .geometry import GridSpec, Point2
from .recognition import KnownObjects, RankerConfig, predict_foreground, train
from .scene import (
    Goal,
    Scene,
    generate_scene,
    goal_foreground,
    scene_from_dict,
    scene_to_dict,
    subset_foreground,
)

CONDITIONS = ("SGKG", "MGKG", "SGUG", "MGUG")


@dataclass(frozen=True)
class GestureNoise:
    """Perturbation applied to synthetic gestures."""

    position_sigma: float = 0.4  # scene units around the goal centroid
    direction_sigma: float = 0.05  # radians around the aim direction
    theta_min: float = 0.35  # full apex angle range, radians
    theta_max: float = 0.9

    def __post_init__(self):
        if self.position_sigma < 0 or self.direction_sigma < 0:
            raise ValueError("noise sigmas must be non-negative")
        if not 0 < self.theta_min <= self.theta_max <= math.pi:
            raise ValueError("need 0 < theta_min <= theta_max <= pi")


@dataclass(frozen=True, eq=False)
class DyadRecord:
    """One scene + goal + gesture exchange, tagged with its condition."""

    scene: Scene
    goal: Goal
    gestures: GestureSequence
    condition: str

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ValueError(f"unknown condition {self.condition!r}")
        single = len(self.gestures) == 1
        if self.condition.startswith("SG") != single:
            raise ValueError(
                f"{self.condition} record has {len(self.gestures)} gestures"
            )
        known_goal = self.goal.kind == "object-level"
        if self.condition.endswith("KG") != known_goal:
            raise ValueError(f"{self.condition} record has a {self.goal.kind} goal")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadRecord):
            return NotImplemented
        return (
            self.scene == other.scene
            and self.goal == other.goal
            and self.gestures == other.gestures
            and self.condition == other.condition
        )


@dataclass(frozen=True)
class ConditionStats:
    condition: str
    n: int
    mean: float
    std: float
    abstentions: int


@dataclass(frozen=True)
class PairTest:
    a: str
    b: str
    t: float
    df: int
    p: float


@dataclass(frozen=True)
class EvalReport:
    conditions: tuple[ConditionStats, ...]
    pairwise: tuple[PairTest, ...]


# --- synthetic dyads ---------------------------------------------------------


def random_salience(grid: GridSpec, rng: np.random.Generator) -> SalienceMap:
    """One to three Gaussian bumps, clamped to [0, 1]."""
    X, Y = grid.pixel_centers()
    values = np.zeros((grid.h, grid.w))
    margin = 1.5
    for _ in range(int(rng.integers(1, 4))):
        cx = rng.uniform(grid.rect_min.x + margin, grid.rect_max.x - margin)
        cy = rng.uniform(grid.rect_min.y + margin, grid.rect_max.y - margin)
        sigma = rng.uniform(0.8, 2.0)
        amp = rng.uniform(0.6, 1.0)
        values += amp * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2.0 * sigma**2))
    return SalienceMap(grid, np.clip(values, 0.0, 1.0))


def _boundary_point(grid: GridSpec, rng: np.random.Generator) -> Point2:
    u = float(rng.uniform(0.0, 1.0))
    side = int(rng.integers(0, 4))
    x0, y0, x1, y1 = grid.rect_min.x, grid.rect_min.y, grid.rect_max.x, grid.rect_max.y
    if side == 0:
        return Point2(x0 + u * (x1 - x0), y0)
    if side == 1:
        return Point2(x1, y0 + u * (y1 - y0))
    if side == 2:
        return Point2(x0 + u * (x1 - x0), y1)
    return Point2(x0, y0 + u * (y1 - y0))


def _noisy_gesture(
    target: Point2, grid: GridSpec, noise: GestureNoise, rng: np.random.Generator
) -> DeicticAction:
    """Aim a cone so its footprint centroid lands near ``target``.

    The centroid of an untruncated circular sector of radius R and half-angle
    a sits at distance (2/3) R sin(a)/a from the apex, so the range is chosen
    to put that point at the (perturbed) target.
    """
    origin = _boundary_point(grid, rng)
    aim = Point2(
        target.x + float(rng.normal(0.0, noise.position_sigma)),
        target.y + float(rng.normal(0.0, noise.position_sigma)),
    )
    v = aim - origin
    dist = v.norm()
    heading = math.atan2(v.y, v.x) + float(rng.normal(0.0, noise.direction_sigma))
    direction = Point2(math.cos(heading), math.sin(heading))
    theta = float(rng.uniform(noise.theta_min, noise.theta_max))
    half = theta / 2.0
    max_range = dist * 3.0 * half / (2.0 * math.sin(half))
    return DeicticAction(origin, direction, theta, max_range)


def synth_dyads(
    seed: int,
    scenes_per_condition: int,
    noise: GestureNoise = GestureNoise(),
    piece_range: tuple[int, int] = (3, 5),
) -> list[DyadRecord]:
    """Deterministic synthetic dataset: ``scenes_per_condition`` records for
    each of the four conditions, in condition order."""
    if scenes_per_condition < 1:
        raise ValueError("need at least one scene per condition")
    master = np.random.default_rng(seed)
    records: list[DyadRecord] = []
    for condition in CONDITIONS:
        for _ in range(scenes_per_condition):
            scene_seed = int(master.integers(0, 2**62))
            n_pieces = int(master.integers(piece_range[0], piece_range[1] + 1))
            scene = generate_scene(scene_seed, n_pieces)
            if condition.endswith("KG"):
                label = scene.labels[int(master.integers(0, len(scene.labels)))]
                goal = Goal("object-level", label=label.label)
            else:
                blob = threshold(random_salience(scene.grid, master), 0.5)
                goal = Goal("pixel-level", mask=blob)
            target = mask_centroid(goal_foreground(scene, goal))
            count = 1 if condition.startswith("SG") else int(master.integers(2, 5))
            actions = [
                _noisy_gesture(target, scene.grid, noise, master) for _ in range(count)
            ]
            records.append(
                DyadRecord(scene, goal, GestureSequence(actions), condition)
            )
    return records


def exemplar_groups_from_records(
    records: Sequence[DyadRecord],
) -> list[tuple[str, list[ForegroundMap]]]:
    """Training groups: one entry per (scene, label), exemplar = the part's
    rasterized mask. Scenes appearing in several records contribute once."""
    groups = []
    seen: set[str] = set()
    for rec in records:
        key = json.dumps(scene_to_dict(rec.scene), sort_keys=True)
        if key in seen:
            continue
        seen.add(key)
        for lab in rec.scene.labels:
            groups.append(
                (lab.label, [subset_foreground(rec.scene, lab.piece_ids)])
            )
    return groups


def train_from_records(records: Sequence[DyadRecord]) -> KnownObjects:
    return train(exemplar_groups_from_records(records))


# --- scoring -----------------------------------------------------------------


def score_record(
    record: DyadRecord,
    known: KnownObjects,
    ranker: RankerConfig = RankerConfig(),
) -> tuple[float, bool]:
    """NMSE of the prediction against the goal mask; abstentions (including
    empty gesture regions) score as an all-zero prediction."""
    goal_mask = goal_foreground(record.scene, record.goal)
    try:
        predicted = predict_foreground(record.scene, record.gestures, known, ranker).foreground
        abstained = False
    except (NoCandidatesError, EmptyRegionError):
        predicted = ForegroundMap.zeros(record.scene.grid)
        abstained = True
    goal_mask, predicted = align(goal_mask, predicted)
    return nmse(goal_mask, predicted), abstained


def _score_chunk(chunk: list[DyadRecord], known: KnownObjects, ranker: RankerConfig):
    return [score_record(rec, known, ranker) for rec in chunk]


def evaluate(
    records: Sequence[DyadRecord],
    known: KnownObjects,
    ranker: RankerConfig = RankerConfig(),
    jobs: int = 1,
) -> EvalReport:
    """Score every record, aggregate per condition, and run all pairwise
    two-sample tests (conditions with fewer than two records are skipped in
    the pairwise section)."""
    records = list(records)
    if jobs <= 1 or len(records) < 2:
        results = [score_record(rec, known, ranker) for rec in records]
    else:
        chunks = [records[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk_results = list(
                pool.map(partial(_score_chunk, known=known, ranker=ranker), chunks)
            )
        # stitch the strided chunks back into record order
        results = [None] * len(records)
        for offset, chunk_res in enumerate(chunk_results):
            for k, value in enumerate(chunk_res):
                results[offset + k * jobs] = value

    by_condition: dict[str, list[float]] = {}
    abstentions: dict[str, int] = {}
    for rec, (value, abstained) in zip(records, results):
        by_condition.setdefault(rec.condition, []).append(value)
        abstentions[rec.condition] = abstentions.get(rec.condition, 0) + int(abstained)

    present = [c for c in CONDITIONS if c in by_condition]
    stats = tuple(
        ConditionStats(
            condition=c,
            n=len(by_condition[c]),
            mean=float(np.mean(by_condition[c])),
            std=float(np.std(by_condition[c], ddof=1)) if len(by_condition[c]) > 1 else 0.0,
            abstentions=abstentions.get(c, 0),
        )
        for c in present
    )
    pairwise = []
    for i, a in enumerate(present):
        for b in present[i + 1 :]:
            if len(by_condition[a]) >= 2 and len(by_condition[b]) >= 2:
                t, df, p = t_test(by_condition[a], by_condition[b])
                pairwise.append(PairTest(a, b, t, df, p))
    return EvalReport(stats, tuple(pairwise))


def t_test(
    a: Sequence[float], b: Sequence[float], welch: bool = False
) -> tuple[float, int, float]:
    """Two-sample t statistic, degrees of freedom, and two-tailed p.

    The default is the pooled-variance (equal-variance) form; ``welch=True``
    switches to the unequal-variance form. Degenerate (zero) variance does
    not raise: equal means give (0, df, 1), unequal means give p = 0 with an
    infinite statistic, so an all-identical dataset still reports cleanly.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise ValueError("both samples need at least two values")
    m1, m2 = float(a.mean()), float(b.mean())
    v1 = float(a.var(ddof=1))
    v2 = float(b.var(ddof=1))
    if welch:
        denom_sq = v1 / n1 + v2 / n2
        if denom_sq == 0.0:
            return _degenerate_t(m1, m2, n1 + n2 - 2)
        t = (m1 - m2) / math.sqrt(denom_sq)
        df_real = denom_sq**2 / (
            (v1 / n1) ** 2 / (n1 - 1) + (v2 / n2) ** 2 / (n2 - 1)
        )
        df = int(round(df_real))
    else:
        sp2 = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2)
        df = n1 + n2 - 2
        if sp2 == 0.0:
            return _degenerate_t(m1, m2, df)
        t = (m1 - m2) / math.sqrt(sp2 * (1.0 / n1 + 1.0 / n2))
    p = student_t_two_tailed_p(t, df)
    return t, df, p


def _degenerate_t(m1: float, m2: float, df: int) -> tuple[float, int, float]:
    if m1 == m2:
        return 0.0, df, 1.0
    return math.copysign(math.inf, m1 - m2), df, 0.0


def student_t_two_tailed_p(t: float, df: int) -> float:
    """Two-tailed p via the regularized incomplete beta function:
    ``p = I_{df/(df+t^2)}(df/2, 1/2)``."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


# --- dataset files -----------------------------------------------------------


def record_to_dict(rec: DyadRecord) -> dict:
    from .scene import _goal_to_dict  # shared encoding with scene files

    return {
        "condition": rec.condition,
        "scene": scene_to_dict(rec.scene),
        "goal": _goal_to_dict(rec.goal),
        "gestures": sequence_to_list(rec.gestures),
    }


def record_from_dict(d: dict) -> DyadRecord:
    from .scene import _goal_from_dict

    scene = scene_from_dict(d["scene"])
    goal = _goal_from_dict(d["goal"], scene.grid)
    gestures = sequence_from_list(d["gestures"])
    return DyadRecord(scene, goal, gestures, d["condition"])


def save_records(records: Sequence[DyadRecord], path) -> None:
    payload = {"records": [record_to_dict(r) for r in records]}
    Path(path).write_text(json.dumps(payload) + "\n")


def load_records(path) -> list[DyadRecord]:
    payload = json.loads(Path(path).read_text())
    return [record_from_dict(d) for d in payload["records"]]


# --- report emission ---------------------------------------------------------


def report_to_dict(report: EvalReport) -> dict:
    return {
        "conditions": [
            {
                "condition": s.condition,
                "n": s.n,
                "mean_nmse": s.mean,
                "std_nmse": s.std,
                "abstentions": s.abstentions,
            }
            for s in report.conditions
        ],
        "pairwise": [
            {"a": q.a, "b": q.b, "t": q.t, "df": q.df, "p": q.p}
            for q in report.pairwise
        ],
    }


def report_from_dict(d: dict) -> EvalReport:
    return EvalReport(
        tuple(
            ConditionStats(
                s["condition"], int(s["n"]), float(s["mean_nmse"]),
                float(s["std_nmse"]), int(s["abstentions"]),
            )
            for s in d["conditions"]
        ),
        tuple(
            PairTest(q["a"], q["b"], float(q["t"]), int(q["df"]), float(q["p"]))
            for q in d["pairwise"]
        ),
    )


def emit_report(report: EvalReport, fmt: str = "text-table") -> str:
    """Serialize a report as ``text-table``, ``json``, or ``csv``."""
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if fmt == "csv":
        lines = ["condition,n,mean_nmse,std_nmse,abstentions"]
        for s in report.conditions:
            lines.append(f"{s.condition},{s.n},{s.mean!r},{s.std!r},{s.abstentions}")
        lines.append("")
        lines.append("a,b,t,df,p")
        for q in report.pairwise:
            lines.append(f"{q.a},{q.b},{q.t!r},{q.df},{q.p!r}")
        return "\n".join(lines) + "\n"
    if fmt == "text-table":
        return _text_table(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _text_table(report: EvalReport) -> str:
    """Upper-triangle significance table with the per-condition error in the
    right-most column."""
    names = [s.condition for s in report.conditions]
    p_by_pair = {(q.a, q.b): q.p for q in report.pairwise}
    col_names = names[1:]
    width = 12
    header = " " * 6 + "".join(f"{c:>{width}}" for c in col_names) + f"{'NMSE':>{width}}"
    lines = [header]
    for i, s in enumerate(report.conditions):
        cells = []
        for c in col_names:
            if (s.condition, c) in p_by_pair:
                cells.append(f"{'p=' + format(p_by_pair[(s.condition, c)], '.4f'):>{width}}")
            else:
                cells.append(" " * width)
        lines.append(f"{s.condition:<6}" + "".join(cells) + f"{s.mean:>{width}.6f}")
    lines.append("")
    lines.append("abstentions: " + ", ".join(f"{s.condition}={s.abstentions}" for s in report.conditions))
    return "\n".join(lines) + "\n"
