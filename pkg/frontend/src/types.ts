// Wire types for the session API. The console performs no prediction math:
// every mask and score it displays arrives in these payloads.

export interface RleMask {
  w: number;
  h: number;
  rle: number[];
}

export interface GesturePayload {
  x: number;
  y: number;
  dx: number;
  dy: number;
  theta_rad: number;
  max_range?: number;
  t: number;
}

export interface Rect {
  xmin: number;
  ymin: number;
  xmax: number;
  ymax: number;
}

export interface ScenePiece {
  id: number;
  kind: string;
  pose: { tx: number; ty: number; rot: number; mirrored: boolean };
}

export interface ScenePayload {
  figure_name: string;
  grid: { w: number; h: number; rect: Rect };
  pieces: ScenePiece[];
  labels: { label: string; piece_ids: number[] }[];
  goals: unknown[];
}

export interface GoalPayload {
  kind: "object-level" | "pixel-level";
  label?: string;
  mask?: RleMask;
}

export interface SessionCreated {
  session_id: string;
  scene: ScenePayload;
  reveal_goal: boolean;
  goal: GoalPayload | null;
}

export interface PredictionResponse {
  gesture: GesturePayload;
  gesture_count: number;
  foreground: RleMask;
  label: string | null;
  score: number | null;
  abstained: boolean;
  reason: string | null;
  nmse?: number;
}

export interface ReportedResponse {
  nmse: number;
}

export interface SessionSnapshot {
  session_id: string;
  scene: ScenePayload;
  reveal_goal: boolean;
  goal: GoalPayload | null;
  gestures: GesturePayload[];
  trace: number[];
  reported_nmse: number[];
  prediction: {
    foreground: RleMask;
    label: string | null;
    score: number | null;
    abstained: boolean;
    reason: string | null;
  } | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
