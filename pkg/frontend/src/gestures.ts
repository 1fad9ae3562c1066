// Building and serializing gesture JSON. The emitted shape is shared with
// the engine's CLI files and HTTP API; fixture files under fixtures/gestures
// pin the exact bytes, and the engine-side tests parse the same files.

import type { GesturePayload } from "./types.js";

export interface DragInput {
  originX: number; // scene units
  originY: number;
  dragX: number; // drag end point, scene units
  dragY: number;
  theta: number; // full apex angle, radians
  t: number; // seconds
  maxRange?: number;
}

export interface BuiltGesture {
  gesture: GesturePayload;
  defaultedDirection: boolean; // zero-length drag fell back to +x
}

export function buildGesture(input: DragInput): BuiltGesture {
  const vx = input.dragX - input.originX;
  const vy = input.dragY - input.originY;
  const norm = Math.hypot(vx, vy);
  let dx: number;
  let dy: number;
  let defaulted = false;
  if (norm === 0) {
    dx = 1; // documented default: a zero-length drag points along +x
    dy = 0;
    defaulted = true;
  } else {
    dx = vx / norm;
    dy = vy / norm;
  }
  const gesture: GesturePayload = {
    x: input.originX,
    y: input.originY,
    dx,
    dy,
    theta_rad: input.theta,
    t: input.t,
  };
  if (input.maxRange !== undefined) gesture.max_range = input.maxRange;
  return { gesture, defaultedDirection: defaulted };
}

// Canonical serialization: fixed key order, no spaces. Fixture files hold
// exactly these bytes.
export function serializeGesture(g: GesturePayload): string {
  const parts = [
    `"x":${JSON.stringify(g.x)}`,
    `"y":${JSON.stringify(g.y)}`,
    `"dx":${JSON.stringify(g.dx)}`,
    `"dy":${JSON.stringify(g.dy)}`,
    `"theta_rad":${JSON.stringify(g.theta_rad)}`,
  ];
  if (g.max_range !== undefined) {
    parts.push(`"max_range":${JSON.stringify(g.max_range)}`);
  }
  parts.push(`"t":${JSON.stringify(g.t)}`);
  return `{${parts.join(",")}}`;
}

export function serializeSequence(gestures: GesturePayload[]): string {
  return `[${gestures.map(serializeGesture).join(",")}]`;
}
