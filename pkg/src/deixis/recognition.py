"""Known-object classifiers and the top-down foreground predictor.

Each known object is a labeled shape prototype: the mean descriptor of its
training exemplars plus an acceptance threshold. A foreground hypothesis is
accepted by an entry when the cosine similarity of its descriptor to the
prototype reaches the threshold. Accepted hypotheses are ranked by summed
inverse distance between the hypothesis centroid and each gesture's region
center, and the top-ranked one is the prediction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyForegroundError, EnumerationCapError, NoCandidatesError
from .features import HogConfig, describe
from .foreground import ForegroundMap, mask_centroid
from .gestures import (
    DEFAULT_ENUMERATION_CAP,
    GestureSequence,
    enumerate_hypotheses,
    fuse_gestures,
)
from .geometry import Point2
from .scene import Scene, subset_foreground

DEFAULT_THRESHOLD_CAP = 0.85


@dataclass(frozen=True, eq=False)
class KnownObject:
    """One classifier entry: label, prototype descriptor, threshold."""

    label: str
    centroid: np.ndarray
    threshold: float

    def __post_init__(self):
        arr = np.asarray(self.centroid, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "centroid", arr)
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")


@dataclass(frozen=True, eq=False)
class KnownObjects:
    """The trained entry collection; duplicate labels are allowed."""

    entries: tuple[KnownObject, ...]
    config: HogConfig = HogConfig()

    def __post_init__(self):
        if not self.entries:
            raise ValueError("at least one known object is required")
        n = self.config.descriptor_length
        for e in self.entries:
            if e.centroid.shape != (n,):
                raise ValueError(
                    f"entry {e.label!r} centroid length {e.centroid.shape}, expected ({n},)"
                )
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def centroid_matrix(self) -> np.ndarray:
        return np.stack([e.centroid for e in self.entries])

    def thresholds(self) -> np.ndarray:
        return np.array([e.threshold for e in self.entries])


@dataclass(frozen=True)
class RankerConfig:
    """Distance softening constant for the inverse-distance score. Any
    positive value yields the same ordering; it only guards the division."""

    c: float = 1.0

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError(f"softening constant must be positive, got {self.c}")


@dataclass(frozen=True, eq=False)
class RankedPrediction:
    foreground: ForegroundMap
    label: str
    score: float
    centroid: Point2
    piece_ids: frozenset[int]
    entry_index: int

    def __post_init__(self):
        if self.score <= 0.0:
            raise ValueError("rank score must be positive")
        if self.foreground.is_empty():
            raise EmptyForegroundError("a ranked prediction cannot be empty")


def _cosine_to_entries(desc: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Cosine of one descriptor against every entry centroid.

    Zero-vector handling: two zero vectors are identical shapes (cosine 1);
    a zero against a nonzero is maximally dissimilar (cosine 0).
    """
    d_norm = float(np.linalg.norm(desc))
    m_norms = np.linalg.norm(matrix, axis=1)
    if d_norm == 0.0:
        return np.where(m_norms == 0.0, 1.0, 0.0)
    sims = matrix @ desc / (np.where(m_norms == 0.0, 1.0, m_norms) * d_norm)
    return np.where(m_norms == 0.0, 0.0, sims)


def train(
    exemplar_groups: Iterable[tuple[str, Sequence[ForegroundMap]]],
    cfg: HogConfig = HogConfig(),
) -> KnownObjects:
    """Build one entry per (label, exemplar set) group.

    The entry centroid is the mean descriptor of the group; the threshold is
    the cosine of the worst in-group exemplar against the centroid, capped at
    0.85 so single-exemplar entries keep a generalization margin. Every
    training exemplar therefore re-classifies as its own entry.
    """
    groups = list(exemplar_groups)
    if not groups:
        raise ValueError("no exemplar groups given")
    entries = []
    for label, masks in groups:
        masks = list(masks)
        if not masks:
            raise ValueError(f"entry {label!r} has no exemplars")
        descs = np.stack([describe(m, cfg).values for m in masks])
        centroid = descs.mean(axis=0)
        sims = _cosine_to_entries_many(descs, centroid)
        threshold = min(DEFAULT_THRESHOLD_CAP, float(sims.min()))
        entries.append(KnownObject(label, centroid, threshold))
    return KnownObjects(tuple(entries), cfg)


def _cosine_to_entries_many(descs: np.ndarray, centroid: np.ndarray) -> np.ndarray:
    c_norm = float(np.linalg.norm(centroid))
    d_norms = np.linalg.norm(descs, axis=1)
    if c_norm == 0.0:
        return np.where(d_norms == 0.0, 1.0, 0.0)
    sims = descs @ centroid / (np.where(d_norms == 0.0, 1.0, d_norms) * c_norm)
    return np.where(d_norms == 0.0, 0.0, sims)


def classify(
    hypothesis: ForegroundMap, known: KnownObjects
) -> list[tuple[KnownObject, int]]:
    """Evaluate every entry on one hypothesis; 1 accepts, 0 rejects."""
    if hypothesis.is_empty():
        raise EmptyForegroundError("cannot classify an empty hypothesis")
    desc = describe(hypothesis, known.config).values
    sims = _cosine_to_entries(desc, known.centroid_matrix())
    bits = (sims >= known.thresholds()).astype(int)
    return list(zip(known.entries, (int(b) for b in bits)))


def _accept_indices(desc: np.ndarray, known: KnownObjects) -> np.ndarray:
    sims = _cosine_to_entries(desc, known.centroid_matrix())
    return np.nonzero(sims >= known.thresholds())[0]


@dataclass(frozen=True)
class RankInput:
    """One accepted (hypothesis, entry) pair ready for ranking."""

    entry_index: int
    piece_ids: frozenset[int]
    foreground: ForegroundMap
    centroid: Point2


def rank(
    candidates: Sequence[RankInput],
    known: KnownObjects,
    action_centroids: Sequence[Point2],
    cfg: RankerConfig = RankerConfig(),
) -> list[RankedPrediction]:
    """Order candidates by summed inverse distance to the gesture centers.

    The score of a candidate is ``sum_g 1 / (c + |c_Z - c_a(g)|)``; larger is
    closer. Ties break toward the lowest entry index, then input order.
    """
    if not candidates:
        raise NoCandidatesError("no candidates to rank")
    if not action_centroids:
        raise ValueError("at least one gesture center is required")
    scored = []
    for order, cand in enumerate(candidates):
        d = sum(
            1.0 / (cfg.c + (cand.centroid - ca).norm()) for ca in action_centroids
        )
        scored.append((-d, cand.entry_index, order, cand))
    scored.sort(key=lambda item: item[:3])
    return [
        RankedPrediction(
            foreground=cand.foreground,
            label=known.entries[cand.entry_index].label,
            score=-neg_score,
            centroid=cand.centroid,
            piece_ids=cand.piece_ids,
            entry_index=cand.entry_index,
        )
        for neg_score, _, _, cand in scored
    ]


def predict_foreground(
    scene: Scene,
    gestures: GestureSequence,
    known: KnownObjects,
    ranker: RankerConfig = RankerConfig(),
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> RankedPrediction:
    """The full top-down pipeline for one gesture exchange.

    Fuse the gestures into a candidate set, enumerate piece-subset
    hypotheses (falling back to singletons plus the whole candidate set if
    enumeration would blow past ``cap``), keep the hypotheses some entry
    accepts, rank by inverse distance, and return the head.

    Raises :class:`EmptyRegionError` when no gesture touches the grid and
    :class:`NoCandidatesError` when nothing is accepted (an abstention).
    """
    cand = fuse_gestures(scene, gestures)
    try:
        subsets = enumerate_hypotheses(cand, cap)
    except EnumerationCapError:
        subsets = [frozenset([i]) for i in sorted(cand.piece_ids)]
        subsets.append(frozenset(cand.piece_ids))
    rank_inputs: list[RankInput] = []
    for subset in subsets:
        fg = subset_foreground(scene, subset)
        if fg.is_empty():
            continue  # fully clipped off-grid
        desc = describe(fg, known.config).values
        accepted = _accept_indices(desc, known)
        if accepted.size == 0:
            continue
        c_z = mask_centroid(fg)
        for entry_index in accepted:
            rank_inputs.append(RankInput(int(entry_index), subset, fg, c_z))
    if not rank_inputs:
        raise NoCandidatesError("no hypothesis was accepted by any known object")
    ranked = rank(rank_inputs, known, cand.per_action_centroids, ranker)
    return ranked[0]


# --- model files -------------------------------------------------------------


def known_objects_to_dict(known: KnownObjects) -> dict:
    return {
        "hog": {
            "window": known.config.window,
            "cell": known.config.cell,
            "block": known.config.block,
            "block_stride": known.config.block_stride,
            "bins": known.config.bins,
        },
        "entries": [
            {
                "label": e.label,
                "threshold": e.threshold,
                "centroid": [float(v) for v in e.centroid],
            }
            for e in known.entries
        ],
    }


def known_objects_from_dict(d: dict) -> KnownObjects:
    hog_d = d.get("hog", {})
    cfg = HogConfig(
        window=int(hog_d.get("window", 64)),
        cell=int(hog_d.get("cell", 8)),
        block=int(hog_d.get("block", 2)),
        block_stride=int(hog_d.get("block_stride", 1)),
        bins=int(hog_d.get("bins", 9)),
    )
    entries = tuple(
        KnownObject(e["label"], np.array(e["centroid"], dtype=float), float(e["threshold"]))
        for e in d["entries"]
    )
    return KnownObjects(entries, cfg)


def save_known_objects(known: KnownObjects, path) -> None:
    Path(path).write_text(json.dumps(known_objects_to_dict(known)) + "\n")


def load_known_objects(path) -> KnownObjects:
    return known_objects_from_dict(json.loads(Path(path).read_text()))
