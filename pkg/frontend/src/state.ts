// Console state and its transitions. Overlay masks and error values only
// ever enter through server responses; the reducers copy them verbatim.

import { decodeRle } from "./rle.js";
import type {
  GesturePayload,
  GoalPayload,
  PredictionResponse,
  ScenePayload,
  SessionCreated,
} from "./types.js";

export type Role = "shower" | "observer";

export interface ConsoleState {
  sessionId: string | null;
  scene: ScenePayload | null;
  revealGoal: boolean;
  goal: GoalPayload | null;
  role: Role;
  theta: number; // apex angle for the next gesture
  gestures: GesturePayload[];
  predictedMask: Uint8Array | null; // decoded overlay, row-major, row 0 = low y
  predictedLabel: string | null;
  abstained: boolean;
  abstainReason: string | null;
  trace: number[]; // per-gesture error values from the server
  reportedScores: number[];
  paintedMask: Uint8Array | null; // the observer's brush layer
  banner: string | null; // dismissible error/notice text
}

export function initialState(): ConsoleState {
  return {
    sessionId: null,
    scene: null,
    revealGoal: true,
    goal: null,
    role: "shower",
    theta: 0.6,
    gestures: [],
    predictedMask: null,
    predictedLabel: null,
    abstained: false,
    abstainReason: null,
    trace: [],
    reportedScores: [],
    paintedMask: null,
    banner: null,
  };
}

export function applySessionCreated(state: ConsoleState, created: SessionCreated): ConsoleState {
  const { w, h } = created.scene.grid;
  return {
    ...initialState(),
    role: state.role,
    theta: state.theta,
    sessionId: created.session_id,
    scene: created.scene,
    revealGoal: created.reveal_goal,
    goal: created.goal,
    paintedMask: new Uint8Array(w * h),
  };
}

export function applyPrediction(
  state: ConsoleState,
  response: PredictionResponse,
): ConsoleState {
  const gestures = [...state.gestures, response.gesture];
  const trace =
    response.nmse !== undefined ? [...state.trace, response.nmse] : state.trace;
  return {
    ...state,
    gestures,
    trace,
    predictedMask: decodeRle(response.foreground),
    predictedLabel: response.label,
    abstained: response.abstained,
    abstainReason: response.reason,
  };
}

export function applyReported(state: ConsoleState, nmse: number): ConsoleState {
  return { ...state, reportedScores: [...state.reportedScores, nmse] };
}

export function setBanner(state: ConsoleState, banner: string | null): ConsoleState {
  return { ...state, banner };
}

export function setRole(state: ConsoleState, role: Role): ConsoleState {
  return { ...state, role };
}

export function adjustTheta(state: ConsoleState, delta: number): ConsoleState {
  const theta = Math.min(Math.PI, Math.max(0.05, state.theta + delta));
  return { ...state, theta };
}

export function paintCell(
  state: ConsoleState,
  ix: number,
  iy: number,
  radius: number,
  value: 0 | 1,
): ConsoleState {
  if (!state.scene || !state.paintedMask) return state;
  const { w, h } = state.scene.grid;
  const next = state.paintedMask.slice();
  const r2 = radius * radius;
  for (let y = Math.max(0, iy - radius); y <= Math.min(h - 1, iy + radius); y++) {
    for (let x = Math.max(0, ix - radius); x <= Math.min(w - 1, ix + radius); x++) {
      if ((x - ix) * (x - ix) + (y - iy) * (y - iy) <= r2) {
        next[y * w + x] = value;
      }
    }
  }
  return { ...state, paintedMask: next };
}

export function copyPredictionToPaint(state: ConsoleState): ConsoleState {
  if (!state.predictedMask) return state;
  return { ...state, paintedMask: state.predictedMask.slice() };
}

export function clearPaint(state: ConsoleState): ConsoleState {
  if (!state.scene) return state;
  const { w, h } = state.scene.grid;
  return { ...state, paintedMask: new Uint8Array(w * h) };
}
