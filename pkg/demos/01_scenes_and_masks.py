#!/usr/bin/env python3
"""Tour of the scene substrate: the seven-piece vocabulary, posed scenes,
rasterization, and the binary-map toolkit (metric, centroids, RLE, PGM)."""

import deixis as dx
from deixis.scene import PIECE_KINDS, PIECE_POLYGONS

print("== the piece vocabulary ==")
for kind in PIECE_KINDS:
    poly = PIECE_POLYGONS[kind]
    verts = ", ".join(f"({v.x:g},{v.y:g})" for v in poly.vertices)
    print(f"{kind:18s} area {poly.area:g}  vertices {verts}")
print("areas sum to", sum(PIECE_POLYGONS[k].area for k in PIECE_KINDS), "(the side-4 square)")

print()
print("== the assembled square ==")
scene = dx.assembled_square()
union = dx.subset_foreground(scene, scene.piece_ids)
print(f"{len(scene.pieces)} pieces rasterize to {union.count()} pixels on a "
      f"{scene.grid.w}x{scene.grid.h} grid")
square = dx.rasterize([dx.Polygon([(6, 6), (10, 6), (10, 10), (6, 10)])], scene.grid)
print("identical to rasterizing the solid square:", union == square)

print()
print("== a generated scene ==")
scene = dx.generate_scene(seed=42, piece_count=4)
for piece in scene.pieces:
    c = dx.mask_centroid(dx.piece_silhouette(scene, piece.id))
    print(f"piece {piece.id} {piece.kind:18s} centroid ({c.x:.2f}, {c.y:.2f})")

mask = dx.subset_foreground(scene, {0, 1})
print("pieces {0,1} cover", mask.count(), "pixels")
runs = dx.rle_encode(mask)
print("run-length encoding:", len(runs), "runs; round-trips:",
      dx.rle_decode(runs, scene.grid) == mask)

print()
print("== the error metric ==")
a = dx.piece_silhouette(scene, 0)
b = dx.piece_silhouette(scene, 1)
print("nmse(piece0, piece0) =", dx.nmse(a, a))
print("nmse(piece0, piece1) = %.6f" % dx.nmse(a, b))
print("upper bound for this grid:", (scene.grid.w * scene.grid.h) ** -0.5)

pgm = dx.to_pgm(mask)
print()
print("PGM preview of pieces {0,1} (first 3 lines):")
print("\n".join(pgm.splitlines()[:3]))
