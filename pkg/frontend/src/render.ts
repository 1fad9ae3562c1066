// Canvas drawing. Everything here is presentation: masks, scores, and
// labels are taken from state verbatim (they originate server-side).

import type { ConsoleState } from "./state.js";
import type { GesturePayload } from "./types.js";
import {
  Viewport,
  coneWedge,
  defaultRange,
  piecePolygon,
  sceneToCanvas,
} from "./transform.js";

const PIECE_FILL = "#cdb88a";
const PIECE_EDGE = "#8a7548";
const PREDICTED = [64, 140, 255, 110] as const; // translucent blue overlay
const PAINTED = [250, 120, 60, 110] as const; // translucent orange layer
const GOAL_EDGE = "#2da65a";

export function viewportFor(state: ConsoleState, canvas: HTMLCanvasElement): Viewport | null {
  if (!state.scene) return null;
  return { rect: state.scene.grid.rect, width: canvas.width, height: canvas.height };
}

function tracePolygon(
  ctx: CanvasRenderingContext2D,
  vp: Viewport,
  points: [number, number][],
) {
  ctx.beginPath();
  points.forEach(([x, y], i) => {
    const [px, py] = sceneToCanvas(vp, x, y);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.closePath();
}

function maskToImage(
  mask: Uint8Array,
  w: number,
  h: number,
  rgba: readonly [number, number, number, number],
): ImageData {
  const img = new ImageData(w, h);
  for (let iy = 0; iy < h; iy++) {
    // mask row 0 is the low-y edge; image row 0 is the top
    const srcRow = h - 1 - iy;
    for (let ix = 0; ix < w; ix++) {
      if (mask[srcRow * w + ix]) {
        const o = (iy * w + ix) * 4;
        img.data[o] = rgba[0];
        img.data[o + 1] = rgba[1];
        img.data[o + 2] = rgba[2];
        img.data[o + 3] = rgba[3];
      }
    }
  }
  return img;
}

function drawMask(
  ctx: CanvasRenderingContext2D,
  mask: Uint8Array,
  w: number,
  h: number,
  rgba: readonly [number, number, number, number],
) {
  if (!mask.some((b) => b)) return; // empty mask draws no overlay
  const off = document.createElement("canvas");
  off.width = w;
  off.height = h;
  const offCtx = off.getContext("2d")!;
  offCtx.putImageData(maskToImage(mask, w, h, rgba), 0, 0);
  ctx.save();
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.restore();
}

function drawGesture(
  ctx: CanvasRenderingContext2D,
  vp: Viewport,
  g: GesturePayload,
  current = false,
) {
  const range = g.max_range ?? defaultRange(vp.rect);
  const wedge = coneWedge(g.x, g.y, g.dx, g.dy, g.theta_rad, range);
  tracePolygon(ctx, vp, wedge);
  ctx.fillStyle = current ? "rgba(255, 210, 70, 0.25)" : "rgba(120, 120, 160, 0.12)";
  ctx.fill();

  const [ox, oy] = sceneToCanvas(vp, g.x, g.y);
  const tip = sceneToCanvas(vp, g.x + g.dx * range * 0.35, g.y + g.dy * range * 0.35);
  ctx.strokeStyle = current ? "#c79b1b" : "#666688";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(ox, oy);
  ctx.lineTo(tip[0], tip[1]);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(ox, oy, 4, 0, 2 * Math.PI);
  ctx.fillStyle = ctx.strokeStyle;
  ctx.fill();
}

export function renderScene(state: ConsoleState, canvas: HTMLCanvasElement): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const vp = viewportFor(state, canvas);
  if (!vp || !state.scene) return;

  ctx.fillStyle = "#f7f4ec";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  for (const piece of state.scene.pieces) {
    tracePolygon(ctx, vp, piecePolygon(piece));
    ctx.fillStyle = PIECE_FILL;
    ctx.fill();
    ctx.strokeStyle = PIECE_EDGE;
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }

  const { w, h } = state.scene.grid;
  if (state.predictedMask) drawMask(ctx, state.predictedMask, w, h, PREDICTED);
  if (state.paintedMask) drawMask(ctx, state.paintedMask, w, h, PAINTED);

  // in shower mode the goal is the human's secret to convey; outline it
  if (state.role === "shower" && state.revealGoal && state.goal) {
    outlineGoal(ctx, vp, state);
  }

  state.gestures.forEach((g, i) =>
    drawGesture(ctx, vp, g, i === state.gestures.length - 1),
  );
}

function outlineGoal(ctx: CanvasRenderingContext2D, vp: Viewport, state: ConsoleState): void {
  const scene = state.scene!;
  const goal = state.goal!;
  if (goal.kind === "object-level" && goal.label) {
    const label = scene.labels.find((l) => l.label === goal.label);
    if (!label) return;
    for (const pid of label.piece_ids) {
      const piece = scene.pieces.find((p) => p.id === pid);
      if (!piece) continue;
      tracePolygon(ctx, vp, piecePolygon(piece));
      ctx.strokeStyle = GOAL_EDGE;
      ctx.lineWidth = 3;
      ctx.stroke();
    }
  }
}

export function renderTrace(trace: number[], canvas: HTMLCanvasElement): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#fcfbf7";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (trace.length === 0) return;
  const max = Math.max(...trace, 1e-9);
  const stepX = canvas.width / Math.max(trace.length, 2);
  ctx.strokeStyle = "#4a7dd9";
  ctx.lineWidth = 2;
  ctx.beginPath();
  trace.forEach((v, i) => {
    const x = stepX * (i + 0.5);
    const y = canvas.height - (v / max) * (canvas.height - 8) - 4;
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
  trace.forEach((v, i) => {
    const x = stepX * (i + 0.5);
    const y = canvas.height - (v / max) * (canvas.height - 8) - 4;
    ctx.beginPath();
    ctx.arc(x, y, 3, 0, 2 * Math.PI);
    ctx.fillStyle = "#4a7dd9";
    ctx.fill();
  });
}
