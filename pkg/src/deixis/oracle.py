"""Brute-force reference implementations used to cross-check the fast paths.

Everything here favors clarity over speed: explicit pixel loops, powerset
enumeration, exact mask matching instead of learned classification, and
numerical integration instead of special functions. Disagreement with the
main implementations fails the build.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.integrate import quad

from .errors import EmptyRegionError, GridMismatchError, NoCandidatesError
from .foreground import ForegroundMap
from .gestures import DeicticAction
from .scene import Scene, piece_silhouette, subset_foreground


def oracle_nmse(pr: ForegroundMap, pp: ForegroundMap) -> float:
    """The error metric via a literal double loop over pixels."""
    if pr.grid != pp.grid:
        raise GridMismatchError("grids differ")
    total = 0.0
    a, b = pr.bits, pp.bits
    for iy in range(pr.grid.h):
        for ix in range(pr.grid.w):
            d = float(a[iy, ix]) - float(b[iy, ix])
            total += d * d
    return math.sqrt(total) / (pr.grid.w * pr.grid.h)


def _loop_mask_centroid(bits: np.ndarray, grid) -> tuple[float, float]:
    sx, sy = grid.pixel_size
    sum_x = sum_y = 0.0
    count = 0
    for iy in range(grid.h):
        for ix in range(grid.w):
            if bits[iy, ix]:
                sum_x += grid.rect_min.x + (ix + 0.5) * sx
                sum_y += grid.rect_min.y + (iy + 0.5) * sy
                count += 1
    return sum_x / count, sum_y / count


def _in_cone(apex, direction, theta, max_range, px, py) -> bool:
    vx, vy = px - apex.x, py - apex.y
    dist = math.hypot(vx, vy)
    if dist > max_range:
        return False
    if dist == 0.0:
        return True
    cos_angle = min(1.0, max(-1.0, (vx * direction.x + vy * direction.y) / dist))
    return math.acos(cos_angle) <= theta / 2.0 + 1e-12


def oracle_predict(
    scene: Scene,
    action: DeicticAction,
    exemplar_masks: list[ForegroundMap],
) -> tuple[frozenset[int], ForegroundMap]:
    """Reference pipeline for a single gesture with exact shape knowledge.

    Enumerates the full powerset of the pieces whose silhouette centroid is
    inside the cone, accepts a hypothesis iff its mask is pixel-identical to
    one of ``exemplar_masks``, and picks the accepted hypothesis whose
    centroid is nearest the cone footprint centroid (ties in enumeration
    order). Returns the chosen subset and its mask.
    """
    grid = scene.grid
    max_range = action.max_range if action.max_range is not None else grid.diagonal

    sx, sy = grid.pixel_size
    footprint = np.zeros((grid.h, grid.w), dtype=bool)
    for iy in range(grid.h):
        for ix in range(grid.w):
            px = grid.rect_min.x + (ix + 0.5) * sx
            py = grid.rect_min.y + (iy + 0.5) * sy
            footprint[iy, ix] = _in_cone(
                action.origin, action.direction, action.theta, max_range, px, py
            )
    if not footprint.any():
        raise EmptyRegionError("cone footprint contains no grid pixels")
    ca_x, ca_y = _loop_mask_centroid(footprint, grid)

    candidates = []
    for piece in scene.pieces:
        bits = piece_silhouette(scene, piece.id).bits
        if not bits.any():
            continue
        cz_x, cz_y = _loop_mask_centroid(bits, grid)
        if _in_cone(action.origin, action.direction, action.theta, max_range, cz_x, cz_y):
            candidates.append(piece.id)
    if len(candidates) > 6:
        raise ValueError(f"oracle expects <= 6 candidate pieces, got {len(candidates)}")

    best = None
    best_dist = math.inf
    for size in range(1, len(candidates) + 1):
        for combo in itertools.combinations(sorted(candidates), size):
            subset = frozenset(combo)
            mask = subset_foreground(scene, subset)
            if not any(mask == ex for ex in exemplar_masks):
                continue
            cz_x, cz_y = _loop_mask_centroid(mask.bits, grid)
            dist = math.hypot(cz_x - ca_x, cz_y - ca_y)
            if dist < best_dist:
                best = (subset, mask)
                best_dist = dist
    if best is None:
        raise NoCandidatesError("no hypothesis matches any exemplar mask")
    return best


def _t_density(x: float, df: int) -> float:
    return (
        math.exp(math.lgamma((df + 1) / 2.0) - math.lgamma(df / 2.0))
        / math.sqrt(df * math.pi)
        * (1.0 + x * x / df) ** (-(df + 1) / 2.0)
    )


def oracle_t_cdf(t: float, df: int) -> float:
    """Student-t CDF by adaptive quadrature of the density."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    value, _ = quad(_t_density, 0.0, abs(t), args=(df,), epsabs=1e-12, limit=200)
    return 0.5 + math.copysign(value, t)


def oracle_t_two_tailed_p(t: float, df: int) -> float:
    return 2.0 * (1.0 - oracle_t_cdf(abs(t), df))
