"""Planar geometry substrate: points, simple polygons, rigid poses, pixel
grids, and the cone region a pointing gesture projects onto the scene.

Conventions used throughout the library:

* polygons are simple, counter-clockwise, signed area > 0;
* a grid pixel (row ``iy``, column ``ix``) covers an axis-aligned cell of the
  scene rectangle and is represented by its center point; row 0 sits at the
  low-y edge of the rectangle, so row index increases with y;
* pixel membership uses the even-odd rule on the pixel center;
* a cone's ``theta`` is the full apex angle, membership tests use ``theta/2``
  on either side of the axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegeneratePolygonError

_AREA_EPS = 1e-12


@dataclass(frozen=True)
class Point2:
    """A point (or free vector) in scene units."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


def _signed_area(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_properly_intersect(p1, p2, q1, q2) -> bool:
    """True if open segments p1-p2 and q1-q2 cross at an interior point."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(v) < _AREA_EPS:
            return 0
        return 1 if v > 0 else -1

    o1 = orient(p1, p2, q1)
    o2 = orient(p1, p2, q2)
    o3 = orient(q1, q2, p1)
    o4 = orient(q1, q2, p2)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, vertices in counter-clockwise order."""

    vertices: tuple[Point2, ...]

    def __init__(self, vertices: Iterable[Point2]):
        verts = tuple(
            v if isinstance(v, Point2) else Point2(float(v[0]), float(v[1]))
            for v in vertices
        )
        if len(verts) < 3:
            raise ValueError(f"polygon needs >= 3 vertices, got {len(verts)}")
        xy = np.array([[v.x, v.y] for v in verts])
        area = _signed_area(xy)
        if area <= _AREA_EPS:
            raise ValueError(f"polygon must be CCW with positive area, signed area {area}")
        n = len(verts)
        for i in range(n):
            for j in range(i + 1, n):
                if abs(i - j) in (1, n - 1):
                    continue  # adjacent edges share a vertex, not a crossing
                a, b = xy[i], xy[(i + 1) % n]
                c, d = xy[j], xy[(j + 1) % n]
                if _segments_properly_intersect(a, b, c, d):
                    raise ValueError("polygon is self-intersecting")
        object.__setattr__(self, "vertices", verts)

    def as_array(self) -> np.ndarray:
        """Vertices as an (n, 2) float array."""
        return np.array([[v.x, v.y] for v in self.vertices], dtype=float)

    @property
    def area(self) -> float:
        return _signed_area(self.as_array())


@dataclass(frozen=True)
class Pose:
    """Rigid placement: optional mirror, then rotation, then translation."""

    translation: Point2 = Point2(0.0, 0.0)
    rotation: float = 0.0
    mirrored: bool = False

    def __post_init__(self):
        rot = float(self.rotation) % (2.0 * math.pi)
        object.__setattr__(self, "rotation", rot)


@dataclass(frozen=True)
class GridSpec:
    """Raster grid of ``w`` x ``h`` pixels over a scene rectangle."""

    w: int
    h: int
    rect_min: Point2
    rect_max: Point2

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.w}x{self.h}")
        if self.rect_max.x <= self.rect_min.x or self.rect_max.y <= self.rect_min.y:
            raise ValueError("scene rectangle is degenerate")

    @property
    def pixel_size(self) -> tuple[float, float]:
        return (
            (self.rect_max.x - self.rect_min.x) / self.w,
            (self.rect_max.y - self.rect_min.y) / self.h,
        )

    @property
    def diagonal(self) -> float:
        return (self.rect_max - self.rect_min).norm()

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid of pixel-center coordinates, each shaped (h, w)."""
        sx, sy = self.pixel_size
        xs = self.rect_min.x + (np.arange(self.w) + 0.5) * sx
        ys = self.rect_min.y + (np.arange(self.h) + 0.5) * sy
        return np.meshgrid(xs, ys)


@dataclass(frozen=True)
class ConeRegion:
    """Truncated cone projected by a gesture: apex, unit axis, full apex
    angle ``theta``, truncated at ``max_range``."""

    apex: Point2
    direction: Point2
    theta: float
    max_range: float

    def __post_init__(self):
        n = self.direction.norm()
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"direction must be unit length, |r| = {n}")
        if not (0.0 < self.theta <= math.pi):
            raise ValueError(f"apex angle must be in (0, pi], got {self.theta}")
        if self.max_range <= 0.0:
            raise ValueError(f"max range must be positive, got {self.max_range}")


def _snapped_cos_sin(angle: float) -> tuple[float, float]:
    # Snap to exact lattice values near multiples of pi/2 so that poses built
    # from quarter-turns keep integer vertices bit-exact; shared piece edges
    # then rasterize without hairline gaps.
    c, s = math.cos(angle), math.sin(angle)
    for v in (-1.0, 0.0, 1.0):
        if abs(c - v) < 1e-12:
            c = v
        if abs(s - v) < 1e-12:
            s = v
    return c, s


def apply_pose(poly: Polygon, pose: Pose) -> Polygon:
    """Mirror (x -> -x), rotate, then translate a polygon.

    Mirroring flips the winding, so the vertex order is reversed afterwards to
    keep the result counter-clockwise.
    """
    xy = poly.as_array()
    if pose.mirrored:
        xy = xy.copy()
        xy[:, 0] = -xy[:, 0]
        xy = xy[::-1]
    c, s = _snapped_cos_sin(pose.rotation)
    rot = np.array([[c, -s], [s, c]])
    xy = xy @ rot.T
    xy[:, 0] += pose.translation.x
    xy[:, 1] += pose.translation.y
    return Polygon(Point2(float(px), float(py)) for px, py in xy)


def polygon_centroid(poly: Polygon) -> Point2:
    """Area-weighted centroid (shoelace formula)."""
    xy = poly.as_array()
    x, y = xy[:, 0], xy[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * float(np.sum(cross))
    if abs(area) < 1e-12:
        raise DegeneratePolygonError("zero-area polygon has no centroid")
    cx = float(np.sum((x + xn) * cross)) / (6.0 * area)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * area)
    return Point2(cx, cy)


def polygon_mask(polys: Sequence[Polygon], grid: GridSpec) -> np.ndarray:
    """Even-odd pixel-center membership for a union of polygons.

    Returns an (h, w) bool array. The crossing test is the classic half-open
    ray cast, which partitions points on a shared edge between the two
    adjacent polygons, so unions of tiling pieces have no seams.
    """
    X, Y = grid.pixel_centers()
    inside = np.zeros((grid.h, grid.w), dtype=bool)
    for poly in polys:
        xy = poly.as_array()
        crossings = np.zeros((grid.h, grid.w), dtype=np.int32)
        n = xy.shape[0]
        for i in range(n):
            x1, y1 = xy[i]
            x2, y2 = xy[(i + 1) % n]
            straddles = (y1 > Y) != (y2 > Y)
            if not straddles.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = x1 + (Y - y1) * (x2 - x1) / (y2 - y1)
            crossings += (straddles & (X < xint)).astype(np.int32)
        inside |= crossings % 2 == 1
    return inside


def point_in_cone(region: ConeRegion, p: Point2) -> bool:
    """Membership test: within range of the apex and within ``theta/2`` of
    the axis. The apex itself is inside."""
    vx, vy = p.x - region.apex.x, p.y - region.apex.y
    dist = math.hypot(vx, vy)
    if dist > region.max_range:
        return False
    if dist == 0.0:
        return True
    cos_angle = (vx * region.direction.x + vy * region.direction.y) / dist
    cos_angle = min(1.0, max(-1.0, cos_angle))
    return math.acos(cos_angle) <= region.theta / 2.0 + 1e-12


def cone_mask(region: ConeRegion, grid: GridSpec) -> np.ndarray:
    """Pixel-center membership of the cone footprint, shaped (h, w)."""
    X, Y = grid.pixel_centers()
    vx = X - region.apex.x
    vy = Y - region.apex.y
    dist = np.hypot(vx, vy)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_angle = (vx * region.direction.x + vy * region.direction.y) / dist
    cos_angle = np.clip(cos_angle, -1.0, 1.0)
    angle_ok = np.arccos(cos_angle) <= region.theta / 2.0 + 1e-12
    angle_ok |= dist == 0.0
    return (dist <= region.max_range) & angle_ok


def rasterize(polys: Sequence[Polygon], grid: GridSpec):
    """Rasterize a union of polygons to a binary foreground map.

    A pixel is set iff its center lies inside any polygon (even-odd rule).
    An empty polygon list yields an all-zero map.
    """
    from .foreground import ForegroundMap  # ForegroundMap lives with the metric code

    return ForegroundMap(grid, polygon_mask(polys, grid))
