"""Deictic actions and the region-of-reference machinery: which pieces a
pointing cone selects, how foreground hypotheses are enumerated, and how a
sequence of gestures is fused into one candidate set.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyRegionError, EnumerationCapError
from .foreground import ForegroundMap, mask_centroid
from .geometry import ConeRegion, GridSpec, Point2, cone_mask, point_in_cone
from .scene import Scene, piece_silhouette

DEFAULT_ENUMERATION_CAP = 10


@dataclass(frozen=True)
class DeicticAction:
    """One referential gesture: origin, unit direction, full apex angle, and
    an optional range cutoff (defaults to the scene diagonal)."""

    origin: Point2
    direction: Point2
    theta: float
    max_range: float | None = None

    def __post_init__(self):
        n = self.direction.norm()
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"direction must be unit length, |r| = {n}")
        if not (0.0 < self.theta <= math.pi):
            raise ValueError(f"apex angle must be in (0, pi], got {self.theta}")
        if self.max_range is not None and self.max_range <= 0.0:
            raise ValueError(f"max range must be positive, got {self.max_range}")

    def region(self, grid: GridSpec) -> ConeRegion:
        rng = self.max_range if self.max_range is not None else grid.diagonal
        return ConeRegion(self.origin, self.direction, self.theta, rng)


def action_toward(origin: Point2, target: Point2, theta: float, max_range: float | None = None) -> DeicticAction:
    """Convenience constructor: aim from ``origin`` at ``target``."""
    d = target - origin
    n = d.norm()
    if n == 0.0:
        raise ValueError("origin and target coincide")
    return DeicticAction(origin, Point2(d.x / n, d.y / n), theta, max_range)


@dataclass(frozen=True)
class GestureSequence:
    """Ordered gestures with strictly increasing timestamps (seconds)."""

    actions: tuple[DeicticAction, ...]
    timestamps: tuple[float, ...]

    def __init__(self, actions, timestamps=None):
        actions = tuple(actions)
        if not actions:
            raise ValueError("gesture sequence must contain at least one action")
        if timestamps is None:
            timestamps = tuple(float(i) for i in range(len(actions)))
        else:
            timestamps = tuple(float(t) for t in timestamps)
        if len(timestamps) != len(actions):
            raise ValueError("one timestamp per action required")
        if timestamps[0] < 0.0 or any(
            b <= a for a, b in zip(timestamps, timestamps[1:])
        ):
            raise ValueError("timestamps must be non-negative and strictly increasing")
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "timestamps", timestamps)

    def __len__(self) -> int:
        return len(self.actions)


@dataclass(frozen=True)
class CandidateSet:
    """Pieces selected by one or more gestures.

    ``centroid`` is the (mean) center of the projected region; the
    per-gesture centers are kept because ranking scores a hypothesis against
    every gesture individually.
    """

    piece_ids: frozenset[int]
    centroid: Point2
    per_action_centroids: tuple[Point2, ...]


def region_centroid(scene: Scene, action: DeicticAction) -> Point2:
    """Centroid of the cone footprint rasterized on the scene grid."""
    region = action.region(scene.grid)
    footprint = cone_mask(region, scene.grid)
    if not footprint.any():
        raise EmptyRegionError("cone footprint contains no grid pixels")
    return mask_centroid(ForegroundMap(scene.grid, footprint))


def pieces_in_region(scene: Scene, action: DeicticAction) -> CandidateSet:
    """Pieces whose silhouette centroid falls inside the gesture cone."""
    c_a = region_centroid(scene, action)
    region = action.region(scene.grid)
    ids = []
    for piece in scene.pieces:
        c_z = mask_centroid(piece_silhouette(scene, piece.id))
        if point_in_cone(region, c_z):
            ids.append(piece.id)
    return CandidateSet(frozenset(ids), c_a, (c_a,))


def fuse_gestures(scene: Scene, gestures: GestureSequence) -> CandidateSet:
    """Union of per-gesture candidates; the fused center is the mean of the
    per-gesture region centers. Gestures whose footprint is empty are
    skipped; if every footprint is empty the sequence selects nothing."""
    ids: set[int] = set()
    centroids: list[Point2] = []
    for action in gestures.actions:
        try:
            cand = pieces_in_region(scene, action)
        except EmptyRegionError:
            continue
        ids |= cand.piece_ids
        centroids.append(cand.centroid)
    if not centroids:
        raise EmptyRegionError("every gesture footprint was empty")
    cx = sum(c.x for c in centroids) / len(centroids)
    cy = sum(c.y for c in centroids) / len(centroids)
    return CandidateSet(frozenset(ids), Point2(cx, cy), tuple(centroids))


def enumerate_hypotheses(
    candidates: CandidateSet | frozenset[int],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[frozenset[int]]:
    """All non-empty subsets of the candidate ids, ordered by size then
    lexicographically by sorted ids.

    Raises :class:`EnumerationCapError` when the candidate count exceeds
    ``cap``; the caller decides the fallback.
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    ids = candidates.piece_ids if isinstance(candidates, CandidateSet) else frozenset(candidates)
    if len(ids) > cap:
        raise EnumerationCapError(len(ids), cap)
    ordered = sorted(ids)
    subsets: list[frozenset[int]] = []
    for size in range(1, len(ordered) + 1):
        for combo in itertools.combinations(ordered, size):
            subsets.append(frozenset(combo))
    return subsets


# --- gesture JSON ------------------------------------------------------------
# {x, y, dx, dy, theta_rad, max_range?, t}; the same shape is used by files,
# the HTTP API, and the console UI.


def action_to_dict(action: DeicticAction, t: float) -> dict:
    d = {
        "x": action.origin.x,
        "y": action.origin.y,
        "dx": action.direction.x,
        "dy": action.direction.y,
        "theta_rad": action.theta,
        "t": t,
    }
    if action.max_range is not None:
        d["max_range"] = action.max_range
    return d


def action_from_dict(d: dict) -> tuple[DeicticAction, float]:
    dx, dy = float(d["dx"]), float(d["dy"])
    n = math.hypot(dx, dy)
    if n == 0.0:
        raise ValueError("gesture direction is the zero vector")
    action = DeicticAction(
        Point2(float(d["x"]), float(d["y"])),
        Point2(dx / n, dy / n),  # normalized on ingest
        float(d["theta_rad"]),
        float(d["max_range"]) if "max_range" in d and d["max_range"] is not None else None,
    )
    return action, float(d["t"])


def sequence_to_list(g: GestureSequence) -> list[dict]:
    return [action_to_dict(a, t) for a, t in zip(g.actions, g.timestamps)]


def sequence_from_list(items) -> GestureSequence:
    pairs = [action_from_dict(d) for d in items]
    return GestureSequence([a for a, _ in pairs], [t for _, t in pairs])


def load_gestures(path) -> GestureSequence:
    return sequence_from_list(json.loads(Path(path).read_text()))


def save_gestures(g: GestureSequence, path) -> None:
    Path(path).write_text(json.dumps(sequence_to_list(g), indent=2) + "\n")
