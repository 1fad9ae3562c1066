// DOM bootstrap: wires pointer/wheel events to the API client and repaints
// from state. Pointer-down places the gesture origin, dragging sets the
// direction, the wheel adjusts the apex angle; in observer mode the pointer
// paints the reported foreground instead.

import { ApiClient, ApiError } from "./client.js";
import { buildGesture } from "./gestures.js";
import { encodeRle } from "./rle.js";
import { renderScene, renderTrace, viewportFor } from "./render.js";
import {
  ConsoleState,
  adjustTheta,
  applyPrediction,
  applyReported,
  applySessionCreated,
  clearPaint,
  copyPredictionToPaint,
  initialState,
  paintCell,
  setBanner,
  setRole,
} from "./state.js";
import { canvasToScene, sceneToGridCell } from "./transform.js";

const client = new ApiClient("");
let state: ConsoleState = initialState();

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const traceCanvas = document.getElementById("trace") as HTMLCanvasElement;
const statusEl = document.getElementById("status")!;
const bannerEl = document.getElementById("banner")!;
const bannerText = document.getElementById("banner-text")!;
const goalEl = document.getElementById("goal")!;
const thetaEl = document.getElementById("theta")!;

let drag: { ox: number; oy: number; cx: number; cy: number } | null = null;
let painting = false;

function update(next: ConsoleState): void {
  state = next;
  repaint();
}

function repaint(): void {
  renderScene(state, canvas);
  renderTrace(state.trace, traceCanvas);
  thetaEl.textContent = state.theta.toFixed(2);

  const parts: string[] = [];
  if (state.abstained) {
    parts.push(`<span class="badge warn">no known object (${state.abstainReason})</span>`);
  } else if (state.predictedLabel) {
    parts.push(`<span class="badge ok">predicted: ${state.predictedLabel}</span>`);
  }
  if (state.trace.length) {
    parts.push(`error: ${state.trace[state.trace.length - 1].toFixed(6)}`);
  }
  if (state.reportedScores.length) {
    const last = state.reportedScores[state.reportedScores.length - 1];
    parts.push(`reported vs predicted: ${last.toFixed(6)}`);
  }
  statusEl.innerHTML = parts.join(" &nbsp; ");

  if (state.goal && state.revealGoal) {
    goalEl.textContent =
      state.goal.kind === "object-level"
        ? `goal: ${state.goal.label}`
        : "goal: pixel-level region";
  } else {
    goalEl.textContent = state.sessionId ? "goal hidden" : "";
  }

  if (state.banner) {
    bannerText.textContent = state.banner;
    bannerEl.classList.remove("hidden");
  } else {
    bannerEl.classList.add("hidden");
  }
}

function fail(err: unknown): void {
  const message =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  update(setBanner(state, message));
}

async function newSession(): Promise<void> {
  const seed = Number((document.getElementById("seed") as HTMLInputElement).value) || 0;
  const pieces = Number((document.getElementById("pieces") as HTMLInputElement).value) || 4;
  const goalKind = (document.getElementById("goal-kind") as HTMLSelectElement).value as
    | "object-level"
    | "pixel-level";
  const reveal = (document.getElementById("reveal") as HTMLInputElement).checked;
  try {
    const created = await client.createSession({
      scene: { generate: { seed, pieces } },
      goal: { sample: { seed, kind: goalKind } },
      reveal_goal: reveal,
    });
    update(applySessionCreated(state, created));
  } catch (err) {
    fail(err);
  }
}

async function sendGesture(ox: number, oy: number, cx: number, cy: number): Promise<void> {
  if (!state.sessionId) return;
  const built = buildGesture({
    originX: ox,
    originY: oy,
    dragX: cx,
    dragY: cy,
    theta: state.theta,
    t: state.gestures.length, // strictly increasing server-side clock
  });
  if (built.defaultedDirection) {
    update(setBanner(state, "zero-length drag: direction defaulted to +x"));
  }
  try {
    const response = await client.postGesture(state.sessionId, built.gesture);
    update(applyPrediction(state, response));
  } catch (err) {
    fail(err);
  }
}

async function sendPainted(): Promise<void> {
  if (!state.sessionId || !state.scene || !state.paintedMask) return;
  const { w, h } = state.scene.grid;
  try {
    const response = await client.postReported(
      state.sessionId,
      encodeRle(state.paintedMask, w, h),
    );
    update(applyReported(state, response.nmse));
  } catch (err) {
    fail(err);
  }
}

function pointerScene(ev: PointerEvent): [number, number] | null {
  const vp = viewportFor(state, canvas);
  if (!vp) return null;
  const bounds = canvas.getBoundingClientRect();
  const px = ((ev.clientX - bounds.left) / bounds.width) * canvas.width;
  const py = ((ev.clientY - bounds.top) / bounds.height) * canvas.height;
  return canvasToScene(vp, px, py);
}

canvas.addEventListener("pointerdown", (ev) => {
  const pt = pointerScene(ev);
  if (!pt || !state.scene) return;
  canvas.setPointerCapture(ev.pointerId);
  if (state.role === "shower") {
    drag = { ox: pt[0], oy: pt[1], cx: pt[0], cy: pt[1] };
  } else {
    painting = true;
    const [ix, iy] = sceneToGridCell(
      state.scene.grid.rect, state.scene.grid.w, state.scene.grid.h, pt[0], pt[1],
    );
    update(paintCell(state, ix, iy, 3, ev.shiftKey ? 0 : 1));
  }
});

canvas.addEventListener("pointermove", (ev) => {
  const pt = pointerScene(ev);
  if (!pt || !state.scene) return;
  if (state.role === "shower" && drag) {
    drag.cx = pt[0];
    drag.cy = pt[1];
    repaint();
    previewDrag();
  } else if (state.role === "observer" && painting) {
    const [ix, iy] = sceneToGridCell(
      state.scene.grid.rect, state.scene.grid.w, state.scene.grid.h, pt[0], pt[1],
    );
    update(paintCell(state, ix, iy, 3, ev.shiftKey ? 0 : 1));
  }
});

canvas.addEventListener("pointerup", (ev) => {
  if (state.role === "shower" && drag) {
    const { ox, oy, cx, cy } = drag;
    drag = null;
    void sendGesture(ox, oy, cx, cy);
  }
  painting = false;
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  update(adjustTheta(state, ev.deltaY > 0 ? -0.05 : 0.05));
});

function previewDrag(): void {
  if (!drag) return;
  const ctx = canvas.getContext("2d");
  const vp = viewportFor(state, canvas);
  if (!ctx || !vp) return;
  const [ox, oy] = [drag.ox, drag.oy];
  const dxv = drag.cx - ox;
  const dyv = drag.cy - oy;
  const norm = Math.hypot(dxv, dyv);
  if (norm === 0) return;
  const ghost = {
    x: ox, y: oy,
    dx: dxv / norm, dy: dyv / norm,
    theta_rad: state.theta,
    t: 0,
  };
  // draw the in-progress gesture on top of the current frame
  renderScene({ ...state, gestures: [...state.gestures, ghost] }, canvas);
}

document.getElementById("new-session")!.addEventListener("click", () => void newSession());
document.getElementById("send-paint")!.addEventListener("click", () => void sendPainted());
document.getElementById("copy-prediction")!.addEventListener("click", () =>
  update(copyPredictionToPaint(state)),
);
document.getElementById("clear-paint")!.addEventListener("click", () =>
  update(clearPaint(state)),
);
document.getElementById("banner-dismiss")!.addEventListener("click", () =>
  update(setBanner(state, null)),
);
for (const role of ["shower", "observer"] as const) {
  document.getElementById(`role-${role}`)!.addEventListener("click", () => {
    document.getElementById("role-shower")!.classList.toggle("active", role === "shower");
    document.getElementById("role-observer")!.classList.toggle("active", role === "observer");
    update(setRole(state, role));
  });
}

repaint();
