"""Shape descriptors for foreground hypotheses.

A foreground mask is first framed into a canonical square window (crop to the
content bounding box, zero-pad to square, nearest-neighbor resample), which
removes position and scale. The window is then described by a histogram of
oriented gradients: centered differences, unsigned orientations in [0, 180)
with linear votes split between the two nearest bins, 8x8-pixel cell
histograms, and 2x2-cell blocks normalized with L2 followed by a 0.2 clip and
renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyForegroundError
from .foreground import ForegroundMap

_NORM_EPS = 1e-12


@dataclass(frozen=True)
class HogConfig:
    window: int = 64  # square window side, pixels
    cell: int = 8  # cell side, pixels
    block: int = 2  # block side, cells
    block_stride: int = 1  # block step, cells
    bins: int = 9  # unsigned orientation bins over [0, 180)

    def __post_init__(self):
        if self.window % self.cell != 0:
            raise ValueError(f"window {self.window} not divisible by cell {self.cell}")
        if not 1 <= self.block <= self.cells_per_side:
            raise ValueError(f"block {self.block} exceeds {self.cells_per_side} cells per side")
        if self.block_stride < 1 or self.bins < 2:
            raise ValueError("stride must be >= 1 and bins >= 2")

    @property
    def cells_per_side(self) -> int:
        return self.window // self.cell

    @property
    def blocks_per_side(self) -> int:
        return (self.cells_per_side - self.block) // self.block_stride + 1

    @property
    def descriptor_length(self) -> int:
        return self.blocks_per_side**2 * self.block**2 * self.bins


@dataclass(frozen=True, eq=False)
class HogDescriptor:
    values: np.ndarray
    config: HogConfig

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (self.config.descriptor_length,):
            raise ValueError(
                f"descriptor length {arr.shape} does not match config "
                f"({self.config.descriptor_length},)"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HogDescriptor):
            return NotImplemented
        return self.config == other.config and bool(np.array_equal(self.values, other.values))


def canonical_window(m: ForegroundMap, cfg: HogConfig = HogConfig()) -> np.ndarray:
    """Frame a mask into a binary ``window x window`` array.

    Crop to the bounding box of the set pixels, zero-pad the short axis to a
    square (split evenly, extra row/column after), then nearest-neighbor
    resample. Scaling a grid-aligned shape by a power of two in scene space
    leaves the output unchanged.
    """
    if m.is_empty():
        raise EmptyForegroundError("cannot frame an empty foreground")
    iy, ix = np.nonzero(m.bits)
    crop = m.bits[iy.min() : iy.max() + 1, ix.min() : ix.max() + 1]
    h, w = crop.shape
    side = max(h, w)
    pad_y, pad_x = side - h, side - w
    crop = np.pad(
        crop,
        ((pad_y // 2, pad_y - pad_y // 2), (pad_x // 2, pad_x - pad_x // 2)),
    )
    src = np.floor((np.arange(cfg.window) + 0.5) * side / cfg.window).astype(int)
    src = np.clip(src, 0, side - 1)
    return crop[np.ix_(src, src)].astype(np.uint8)


def cell_histograms(window: np.ndarray, cfg: HogConfig = HogConfig()) -> np.ndarray:
    """Per-cell orientation histograms, shaped (cells, cells, bins).

    This is the descriptor before block grouping and normalization; exposed
    because total histogram energy is a meaningful quantity on its own.
    """
    if window.shape != (cfg.window, cfg.window):
        raise ValueError(f"window shape {window.shape}, expected {(cfg.window, cfg.window)}")
    img = window.astype(float)
    gy, gx = np.gradient(img)  # centered differences, one-sided at borders
    mag = np.hypot(gx, gy)
    ang = np.mod(np.arctan2(gy, gx), np.pi)  # unsigned, [0, pi)

    bin_width = np.pi / cfg.bins
    pos = ang / bin_width - 0.5  # bin centers at (k + 0.5) * width
    lower = np.floor(pos).astype(int)
    frac = pos - lower
    lower = np.mod(lower, cfg.bins)
    upper = np.mod(lower + 1, cfg.bins)

    n = cfg.cells_per_side
    hist = np.zeros((n, n, cfg.bins), dtype=float)
    idx = np.repeat(np.arange(n), cfg.cell)  # pixel row/col -> cell row/col
    flat_cell = (idx[:, None] * n + idx[None, :]).ravel()
    np.add.at(
        hist.reshape(-1, cfg.bins),
        (flat_cell, lower.ravel()),
        (mag * (1.0 - frac)).ravel(),
    )
    np.add.at(
        hist.reshape(-1, cfg.bins),
        (flat_cell, upper.ravel()),
        (mag * frac).ravel(),
    )
    return hist


def hog(window: np.ndarray, cfg: HogConfig = HogConfig()) -> HogDescriptor:
    """Block-normalized descriptor of a canonical window."""
    hist = cell_histograms(window, cfg)
    nblocks = cfg.blocks_per_side
    out = np.zeros((nblocks, nblocks, cfg.block, cfg.block, cfg.bins), dtype=float)
    for by in range(nblocks):
        for bx in range(nblocks):
            y0 = by * cfg.block_stride
            x0 = bx * cfg.block_stride
            v = hist[y0 : y0 + cfg.block, x0 : x0 + cfg.block, :]
            v = v / np.sqrt(np.sum(v * v) + _NORM_EPS)
            v = np.minimum(v, 0.2)  # L2-hys clip
            v = v / np.sqrt(np.sum(v * v) + _NORM_EPS)
            out[by, bx] = v
    return HogDescriptor(out.ravel(), cfg)


def describe(m: ForegroundMap, cfg: HogConfig = HogConfig()) -> HogDescriptor:
    """Canonical window framing followed by HOG, in one call."""
    return hog(canonical_window(m, cfg), cfg)
