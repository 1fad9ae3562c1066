// Thin fetch wrapper over the session API. Requests within one session are
// serialized through a promise queue, matching the server's single-writer
// contract; responses are returned untouched.

import type {
  ApiErrorBody,
  GesturePayload,
  PredictionResponse,
  ReportedResponse,
  RleMask,
  ScenePayload,
  SessionCreated,
  SessionSnapshot,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface CreateSessionRequest {
  scene:
    | { generate: { seed: number; pieces: number } }
    | { inline: ScenePayload };
  goal?:
    | { sample: { seed: number; kind: "object-level" | "pixel-level" } }
    | { inline: unknown };
  reveal_goal?: boolean;
}

export class ApiClient {
  private queue: Promise<unknown> = Promise.resolve();

  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private enqueue<T>(work: () => Promise<T>): Promise<T> {
    const next = this.queue.then(work, work);
    this.queue = next.catch(() => undefined); // keep the chain alive on errors
    return next;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.base + path, {
      method,
      headers: body !== undefined ? { "content-type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const err = (payload ?? {}) as Partial<ApiErrorBody>;
      throw new ApiError(response.status, err.code ?? "error", err.message ?? text);
    }
    return payload as T;
  }

  createSession(req: CreateSessionRequest): Promise<SessionCreated> {
    return this.enqueue(() => this.request("POST", "/sessions", req));
  }

  postGesture(sessionId: string, gesture: GesturePayload): Promise<PredictionResponse> {
    return this.enqueue(() =>
      this.request("POST", `/sessions/${sessionId}/gestures`, gesture),
    );
  }

  postReported(sessionId: string, mask: RleMask): Promise<ReportedResponse> {
    return this.enqueue(() =>
      this.request("POST", `/sessions/${sessionId}/reported`, { mask }),
    );
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.enqueue(() => this.request("GET", `/sessions/${sessionId}`));
  }

  generateScene(seed: number, n: number): Promise<ScenePayload> {
    return this.enqueue(() =>
      this.request("GET", `/scenes/generate?seed=${seed}&n=${n}`),
    );
  }
}
