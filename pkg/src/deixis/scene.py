"""Tangram scenes: the seven-piece vocabulary, posed pieces, part labels,
goals, and the on-disk JSON format.

Canonical piece shapes come from the dissection of a side-4 square, so every
canonical vertex is an integer and the seven areas sum to exactly 16. The
``assembled_square`` helper returns poses that reassemble the full square,
which doubles as a rasterization fixture.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import (
    DuplicateIdError,
    MalformedSceneError,
    PlacementError,
    UnknownKindError,
    UnknownPieceError,
)
from .foreground import ForegroundMap, rle_decode, rle_encode
from .geometry import GridSpec, Point2, Polygon, Pose, apply_pose, polygon_mask, rasterize

MAX_PIECES = 7

# Canonical piece-local polygons: CCW, integer vertices, side-4 square scale.
PIECE_POLYGONS: dict[str, Polygon] = {
    "large-triangle-A": Polygon([(0, 0), (4, 0), (2, 2)]),
    "large-triangle-B": Polygon([(0, 0), (4, 0), (2, 2)]),
    "medium-triangle": Polygon([(0, 0), (2, 0), (0, 2)]),
    "small-triangle-A": Polygon([(0, 0), (2, 0), (1, 1)]),
    "small-triangle-B": Polygon([(0, 0), (2, 0), (1, 1)]),
    "square": Polygon([(1, 0), (2, 1), (1, 2), (0, 1)]),
    "parallelogram": Polygon([(0, 0), (2, 0), (3, 1), (1, 1)]),
}

PIECE_KINDS = tuple(PIECE_POLYGONS)


@dataclass(frozen=True)
class Piece:
    """One posed tangram piece."""

    id: int
    kind: str
    pose: Pose

    def __post_init__(self):
        if self.kind not in PIECE_POLYGONS:
            raise UnknownKindError(f"unknown piece kind {self.kind!r}")

    def polygon(self) -> Polygon:
        return apply_pose(PIECE_POLYGONS[self.kind], self.pose)


@dataclass(frozen=True)
class PartLabel:
    """A named part: a non-empty set of piece ids."""

    label: str
    piece_ids: frozenset[int]

    def __init__(self, label: str, piece_ids):
        ids = frozenset(int(i) for i in piece_ids)
        if not ids:
            raise ValueError(f"label {label!r} references no pieces")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "piece_ids", ids)


@dataclass(frozen=True, eq=False)
class Goal:
    """Either an object-level goal (a labeled part) or a pixel-level mask."""

    kind: str  # "object-level" | "pixel-level"
    label: str | None = None
    mask: ForegroundMap | None = None

    def __post_init__(self):
        if self.kind == "object-level":
            if self.label is None or self.mask is not None:
                raise ValueError("object-level goal needs a label and no mask")
        elif self.kind == "pixel-level":
            if self.mask is None or self.label is not None:
                raise ValueError("pixel-level goal needs a mask and no label")
        else:
            raise ValueError(f"unknown goal kind {self.kind!r}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Goal):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.label == other.label
            and self.mask == other.mask
        )


@dataclass(frozen=True, eq=False)
class Scene:
    """A shared visual world: posed pieces, a raster grid, and optional
    part labels and goals."""

    pieces: tuple[Piece, ...]
    grid: GridSpec
    figure_name: str = ""
    labels: tuple[PartLabel, ...] = ()
    goals: tuple[Goal, ...] = ()

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not 1 <= len(pieces) <= MAX_PIECES:
            raise ValueError(f"scene must have 1..{MAX_PIECES} pieces, got {len(pieces)}")
        ids = [p.id for p in pieces]
        if len(set(ids)) != len(ids):
            raise DuplicateIdError(f"duplicate piece ids in {ids}")
        id_set = set(ids)
        for lab in self.labels:
            if not lab.piece_ids <= id_set:
                raise ValueError(f"label {lab.label!r} references unknown pieces")
        for goal in self.goals:
            if goal.kind == "object-level":
                if goal.label not in {lab.label for lab in self.labels}:
                    raise ValueError(f"goal references unknown label {goal.label!r}")
            elif goal.mask is not None and goal.mask.grid != self.grid:
                raise ValueError("pixel-level goal grid does not match scene grid")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "goals", tuple(self.goals))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scene):
            return NotImplemented
        return (
            self.pieces == other.pieces
            and self.grid == other.grid
            and self.figure_name == other.figure_name
            and self.labels == other.labels
            and self.goals == other.goals
        )

    @property
    def piece_ids(self) -> frozenset[int]:
        return frozenset(p.id for p in self.pieces)

    def piece(self, piece_id: int) -> Piece:
        for p in self.pieces:
            if p.id == piece_id:
                return p
        raise UnknownPieceError(f"no piece with id {piece_id}")

    def label_named(self, label: str) -> PartLabel:
        for lab in self.labels:
            if lab.label == label:
                return lab
        raise KeyError(f"no label {label!r} in scene")


def default_grid(w: int = 128, h: int = 128, extent: float = 16.0) -> GridSpec:
    """The stock raster: 128x128 pixels over a square scene rectangle."""
    return GridSpec(w, h, Point2(0.0, 0.0), Point2(extent, extent))


def piece_silhouette(scene: Scene, piece_id: int) -> ForegroundMap:
    """Rasterization of a single posed piece on the scene grid."""
    return rasterize([scene.piece(piece_id).polygon()], scene.grid)


def subset_foreground(scene: Scene, ids) -> ForegroundMap:
    """Pixel-wise union of the silhouettes of a subset of pieces."""
    ids = frozenset(int(i) for i in ids)
    unknown = ids - scene.piece_ids
    if unknown:
        raise UnknownPieceError(f"unknown piece ids {sorted(unknown)}")
    polys = [p.polygon() for p in scene.pieces if p.id in ids]
    return rasterize(polys, scene.grid)


def goal_foreground(scene: Scene, goal: Goal) -> ForegroundMap:
    """The mask a goal denotes: a labeled part rasterized, or the stored map."""
    if goal.kind == "object-level":
        return subset_foreground(scene, scene.label_named(goal.label).piece_ids)
    return goal.mask


def auto_part_labels(scene: Scene) -> tuple[PartLabel, ...]:
    """Default labeling: one singleton label per piece plus the full figure."""
    labels = [PartLabel(f"piece-{p.id}", [p.id]) for p in scene.pieces]
    if len(scene.pieces) > 1:
        labels.append(PartLabel("figure", [p.id for p in scene.pieces]))
    return tuple(labels)


# --- serialization ---------------------------------------------------------


def scene_to_dict(scene: Scene) -> dict:
    return {
        "figure_name": scene.figure_name,
        "grid": {
            "w": scene.grid.w,
            "h": scene.grid.h,
            "rect": {
                "xmin": scene.grid.rect_min.x,
                "ymin": scene.grid.rect_min.y,
                "xmax": scene.grid.rect_max.x,
                "ymax": scene.grid.rect_max.y,
            },
        },
        "pieces": [
            {
                "id": p.id,
                "kind": p.kind,
                "pose": {
                    "tx": p.pose.translation.x,
                    "ty": p.pose.translation.y,
                    "rot": p.pose.rotation,
                    "mirrored": p.pose.mirrored,
                },
            }
            for p in scene.pieces
        ],
        "labels": [
            {"label": lab.label, "piece_ids": sorted(lab.piece_ids)} for lab in scene.labels
        ],
        "goals": [_goal_to_dict(g) for g in scene.goals],
    }


def _goal_to_dict(goal: Goal) -> dict:
    if goal.kind == "object-level":
        return {"kind": "object-level", "label": goal.label}
    return {
        "kind": "pixel-level",
        "mask": {
            "w": goal.mask.grid.w,
            "h": goal.mask.grid.h,
            "rle": rle_encode(goal.mask),
        },
    }


def _goal_from_dict(d: dict, grid: GridSpec) -> Goal:
    kind = d.get("kind")
    if kind == "object-level":
        return Goal("object-level", label=d["label"])
    if kind == "pixel-level":
        m = d["mask"]
        if (m["w"], m["h"]) != (grid.w, grid.h):
            raise MalformedSceneError(
                f"goal mask is {m['w']}x{m['h']}, scene grid is {grid.w}x{grid.h}"
            )
        return Goal("pixel-level", mask=rle_decode(m["rle"], grid))
    raise MalformedSceneError(f"unknown goal kind {kind!r}")


def scene_from_dict(d: dict) -> Scene:
    try:
        g = d["grid"]
        rect = g["rect"]
        grid = GridSpec(
            int(g["w"]),
            int(g["h"]),
            Point2(float(rect["xmin"]), float(rect["ymin"])),
            Point2(float(rect["xmax"]), float(rect["ymax"])),
        )
        pieces = []
        for pd in d["pieces"]:
            kind = pd["kind"]
            if kind not in PIECE_POLYGONS:
                raise UnknownKindError(f"unknown piece kind {kind!r}")
            pose = pd["pose"]
            pieces.append(
                Piece(
                    int(pd["id"]),
                    kind,
                    Pose(
                        Point2(float(pose["tx"]), float(pose["ty"])),
                        float(pose["rot"]),
                        bool(pose.get("mirrored", False)),
                    ),
                )
            )
        ids = [p.id for p in pieces]
        if len(set(ids)) != len(ids):
            raise DuplicateIdError(f"duplicate piece ids in {ids}")
        labels = tuple(
            PartLabel(ld["label"], ld["piece_ids"]) for ld in d.get("labels", [])
        )
        goals = tuple(_goal_from_dict(gd, grid) for gd in d.get("goals", []))
        return Scene(tuple(pieces), grid, d.get("figure_name", ""), labels, goals)
    except (KeyError, TypeError) as exc:
        raise MalformedSceneError(f"scene json missing or mistyped field: {exc}") from exc


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=2) + "\n")


def load_scene(path) -> Scene:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedSceneError(f"not valid JSON: {exc}") from exc
    scene = scene_from_dict(d)
    _warn_on_overlap(scene)
    return scene


def _warn_on_overlap(scene: Scene) -> None:
    # Hand-authored files may overlap pieces; that is tolerated but suspect.
    masks = [piece_silhouette(scene, p.id).bits for p in scene.pieces]
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if (masks[i] & masks[j]).any():
                warnings.warn(
                    f"pieces {scene.pieces[i].id} and {scene.pieces[j].id} overlap",
                    stacklevel=3,
                )
                return


# --- construction ----------------------------------------------------------

# Poses that reassemble the seven canonical pieces into the side-4 square
# with its lower-left corner at the origin.
_ASSEMBLED_POSES: tuple[tuple[str, Pose], ...] = (
    ("large-triangle-A", Pose(Point2(0.0, 0.0), 0.0)),
    ("large-triangle-B", Pose(Point2(0.0, 4.0), 3.0 * math.pi / 2.0)),
    ("medium-triangle", Pose(Point2(4.0, 4.0), math.pi)),
    ("small-triangle-A", Pose(Point2(4.0, 0.0), math.pi / 2.0)),
    ("small-triangle-B", Pose(Point2(3.0, 3.0), math.pi)),
    ("square", Pose(Point2(2.0, 1.0), 0.0)),
    ("parallelogram", Pose(Point2(3.0, 3.0), 0.0, mirrored=True)),
)


def assembled_square(grid: GridSpec | None = None, offset: Point2 = Point2(6.0, 6.0)) -> Scene:
    """The full seven-piece square, translated by ``offset`` on the grid."""
    grid = grid or default_grid()
    pieces = tuple(
        Piece(
            i,
            kind,
            Pose(pose.translation + offset, pose.rotation, pose.mirrored),
        )
        for i, (kind, pose) in enumerate(_ASSEMBLED_POSES)
    )
    scene = Scene(pieces, grid, figure_name="assembled-square")
    return Scene(pieces, grid, "assembled-square", auto_part_labels(scene))


def generate_scene(
    seed: int,
    piece_count: int,
    grid: GridSpec | None = None,
    min_gap_px: int = 2,
    max_tries: int = 500,
) -> Scene:
    """Deterministically pose ``piece_count`` pieces with no pixel overlap.

    Pieces are drawn from a seeded shuffle of the seven kinds, each given a
    random rotation (and mirror, for the parallelogram) and a translation
    rejection-sampled until the piece is inside the scene rectangle and at
    least ``min_gap_px`` dilated pixels away from every other piece.
    """
    if not 1 <= piece_count <= MAX_PIECES:
        raise ValueError(f"piece count must be 1..{MAX_PIECES}, got {piece_count}")
    grid = grid or default_grid()
    rng = np.random.default_rng(seed)
    kinds = list(PIECE_KINDS)
    rng.shuffle(kinds)
    kinds = kinds[:piece_count]

    occupied = np.zeros((grid.h, grid.w), dtype=bool)
    structure = np.ones((3, 3), dtype=bool)
    pieces: list[Piece] = []
    margin = 0.25  # scene units kept clear of the rectangle edge
    for idx, kind in enumerate(kinds):
        base = PIECE_POLYGONS[kind]
        placed = False
        for _ in range(max_tries):
            rot = float(rng.uniform(0.0, 2.0 * math.pi))
            mirrored = bool(rng.integers(0, 2)) if kind == "parallelogram" else False
            shape = apply_pose(base, Pose(Point2(0.0, 0.0), rot, mirrored))
            xy = shape.as_array()
            lo = xy.min(axis=0)
            hi = xy.max(axis=0)
            span_x = grid.rect_max.x - margin - hi[0] - (grid.rect_min.x + margin - lo[0])
            span_y = grid.rect_max.y - margin - hi[1] - (grid.rect_min.y + margin - lo[1])
            if span_x <= 0 or span_y <= 0:
                continue
            tx = grid.rect_min.x + margin - lo[0] + float(rng.uniform(0.0, span_x))
            ty = grid.rect_min.y + margin - lo[1] + float(rng.uniform(0.0, span_y))
            pose = Pose(Point2(tx, ty), rot, mirrored)
            mask = polygon_mask([apply_pose(base, pose)], grid)
            if not mask.any():
                continue
            grown = ndimage.binary_dilation(mask, structure, iterations=max(min_gap_px, 1))
            if (grown & occupied).any():
                continue
            occupied |= mask
            pieces.append(Piece(idx, kind, pose))
            placed = True
            break
        if not placed:
            raise PlacementError(
                f"could not place piece {idx} ({kind}) after {max_tries} tries"
            )
    scene = Scene(tuple(pieces), grid, figure_name=f"generated-{seed}")
    return Scene(tuple(pieces), grid, f"generated-{seed}", auto_part_labels(scene))
