"""Binary foreground maps and the error metric used to compare them.

The metric is ``(1 / (w*h)) * sqrt(sum of squared pixel differences)``. For
binary maps the squared differences are 0/1, so the value equals
``sqrt(hamming) / (w*h)`` and is bounded by ``(w*h) ** -0.5``. The
unconventional normalization (sqrt inside, full ``w*h`` outside) is the
defining formula of this codebase's error score and is kept verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import EmptyForegroundError, GridMismatchError, RleError
from .geometry import GridSpec, Point2


@dataclass(frozen=True, eq=False)
class ForegroundMap:
    """Binary map over a scene grid; bits stored row-major, row 0 at low y."""

    grid: GridSpec
    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.shape != (self.grid.h, self.grid.w):
            raise ValueError(
                f"bit array shape {arr.shape} does not match grid "
                f"{self.grid.h}x{self.grid.w}"
            )
        arr = arr.astype(bool)
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ForegroundMap):
            return NotImplemented
        return self.grid == other.grid and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.grid, self.bits.tobytes()))

    def count(self) -> int:
        return int(self.bits.sum())

    def is_empty(self) -> bool:
        return not self.bits.any()

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ForegroundMap":
        return cls(grid, np.zeros((grid.h, grid.w), dtype=bool))

    @classmethod
    def ones(cls, grid: GridSpec) -> "ForegroundMap":
        return cls(grid, np.ones((grid.h, grid.w), dtype=bool))


@dataclass(frozen=True, eq=False)
class SalienceMap:
    """Real-valued attention map in [0, 1] over a scene grid."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (self.grid.h, self.grid.w):
            raise ValueError(
                f"value array shape {arr.shape} does not match grid "
                f"{self.grid.h}x{self.grid.w}"
            )
        if not np.isfinite(arr).all():
            raise ValueError("salience values must be finite")
        arr = np.clip(arr, 0.0, 1.0)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SalienceMap):
            return NotImplemented
        return self.grid == other.grid and bool(np.array_equal(self.values, other.values))


def _require_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")


def nmse(pr: ForegroundMap, pp: ForegroundMap) -> float:
    """Normalized error between a reported and a predicted foreground."""
    _require_same_grid(pr, pp)
    diff = pr.bits.astype(np.int64) ^ pp.bits.astype(np.int64)
    total = float(diff.sum())  # squared 0/1 differences reduce to a popcount
    wh = pr.grid.w * pr.grid.h
    return float(np.sqrt(total)) / wh


def threshold(s: SalienceMap, tau: float) -> ForegroundMap:
    """Binarize a salience map: bit set iff value >= tau."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {tau}")
    return ForegroundMap(s.grid, s.values >= tau)


def mask_centroid(m: ForegroundMap) -> Point2:
    """Mean of set-pixel centers, in scene coordinates."""
    if m.is_empty():
        raise EmptyForegroundError("cannot take the centroid of an empty foreground")
    iy, ix = np.nonzero(m.bits)
    sx, sy = m.grid.pixel_size
    cx = m.grid.rect_min.x + float(np.mean(ix + 0.5)) * sx
    cy = m.grid.rect_min.y + float(np.mean(iy + 0.5)) * sy
    return Point2(cx, cy)


def align(goal: ForegroundMap, pred: ForegroundMap) -> tuple[ForegroundMap, ForegroundMap]:
    """Registration stage before scoring.

    Both maps already share scene coordinates, so this is the identity; it
    exists as an explicit pipeline step so a real registration can be slotted
    in without touching callers.
    """
    _require_same_grid(goal, pred)
    return goal, pred


def rle_encode(m: ForegroundMap) -> list[int]:
    """Row-major run lengths, starting with the run of zeros (possibly 0)."""
    flat = m.bits.ravel().astype(np.int8)
    runs: list[int] = []
    current = 0  # encoding starts on a zero run
    length = 0
    for bit in flat:
        if bit == current:
            length += 1
        else:
            runs.append(length)
            current = bit
            length = 1
    runs.append(length)
    return runs


def rle_decode(runs: Iterable[int], grid: GridSpec) -> ForegroundMap:
    """Inverse of :func:`rle_encode`; validates the total length."""
    runs = list(runs)
    if any(r < 0 for r in runs):
        raise RleError("negative run length")
    total = sum(runs)
    if total != grid.w * grid.h:
        raise RleError(f"run lengths sum to {total}, expected {grid.w * grid.h}")
    flat = np.zeros(total, dtype=bool)
    pos = 0
    value = False
    for run in runs:
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    return ForegroundMap(grid, flat.reshape(grid.h, grid.w))


def to_pgm(m: ForegroundMap) -> str:
    """Plain-text PGM (P2) with 0/255 gray levels, top row first."""
    lines = [f"P2", f"{m.grid.w} {m.grid.h}", "255"]
    for row in m.bits[::-1]:  # row 0 is low-y, PGM wants the top row first
        lines.append(" ".join("255" if b else "0" for b in row))
    return "\n".join(lines) + "\n"
