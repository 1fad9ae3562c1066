// Pure geometry for the canvas layer: scene <-> pixel mapping, posed piece
// outlines, and the wedge polygon a gesture cone draws. Kept DOM-free so the
// drawing math is unit-testable.

import type { Rect, ScenePiece } from "./types.js";

export interface Viewport {
  rect: Rect;
  width: number; // canvas pixels
  height: number;
}

export function sceneToCanvas(vp: Viewport, x: number, y: number): [number, number] {
  const sx = vp.width / (vp.rect.xmax - vp.rect.xmin);
  const sy = vp.height / (vp.rect.ymax - vp.rect.ymin);
  // canvas y grows downward, scene y grows upward
  return [(x - vp.rect.xmin) * sx, vp.height - (y - vp.rect.ymin) * sy];
}

export function canvasToScene(vp: Viewport, px: number, py: number): [number, number] {
  const sx = (vp.rect.xmax - vp.rect.xmin) / vp.width;
  const sy = (vp.rect.ymax - vp.rect.ymin) / vp.height;
  return [vp.rect.xmin + px * sx, vp.rect.ymin + (vp.height - py) * sy];
}

export function sceneToGridCell(
  rect: Rect,
  gridW: number,
  gridH: number,
  x: number,
  y: number,
): [number, number] {
  const ix = Math.floor(((x - rect.xmin) / (rect.xmax - rect.xmin)) * gridW);
  const iy = Math.floor(((y - rect.ymin) / (rect.ymax - rect.ymin)) * gridH);
  return [
    Math.min(gridW - 1, Math.max(0, ix)),
    Math.min(gridH - 1, Math.max(0, iy)),
  ];
}

// Canonical piece outlines, matching the engine's piece table.
const CANONICAL: Record<string, [number, number][]> = {
  "large-triangle-A": [[0, 0], [4, 0], [2, 2]],
  "large-triangle-B": [[0, 0], [4, 0], [2, 2]],
  "medium-triangle": [[0, 0], [2, 0], [0, 2]],
  "small-triangle-A": [[0, 0], [2, 0], [1, 1]],
  "small-triangle-B": [[0, 0], [2, 0], [1, 1]],
  square: [[1, 0], [2, 1], [1, 2], [0, 1]],
  parallelogram: [[0, 0], [2, 0], [3, 1], [1, 1]],
};

export function piecePolygon(piece: ScenePiece): [number, number][] {
  const base = CANONICAL[piece.kind];
  if (!base) throw new Error(`unknown piece kind ${piece.kind}`);
  let points = base.map(([x, y]) => [x, y] as [number, number]);
  if (piece.pose.mirrored) {
    points = points.map(([x, y]) => [-x, y] as [number, number]).reverse();
  }
  const c = Math.cos(piece.pose.rot);
  const s = Math.sin(piece.pose.rot);
  return points.map(([x, y]) => [
    c * x - s * y + piece.pose.tx,
    s * x + c * y + piece.pose.ty,
  ]);
}

// Wedge outline for a cone: apex plus an arc of chord points spanning theta
// symmetrically about the direction, truncated at range.
export function coneWedge(
  originX: number,
  originY: number,
  dx: number,
  dy: number,
  theta: number,
  range: number,
  segments = 24,
): [number, number][] {
  const heading = Math.atan2(dy, dx);
  const points: [number, number][] = [[originX, originY]];
  for (let i = 0; i <= segments; i++) {
    const a = heading - theta / 2 + (theta * i) / segments;
    points.push([originX + range * Math.cos(a), originY + range * Math.sin(a)]);
  }
  return points;
}

export function defaultRange(rect: Rect): number {
  return Math.hypot(rect.xmax - rect.xmin, rect.ymax - rect.ymin);
}
