"""Session-oriented HTTP API for the interactive guided-search loop.

A session holds a scene, a goal (optionally hidden from responses), the
gesture history, and a per-gesture error trace. Each posted gesture re-runs
the predictor over the whole history, so the API adds no semantics beyond
the library call; abstentions are reported as an empty prediction rather
than an error so every gesture produces a trace entry.
"""

from __future__ import annotations

import json
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import DeixisError, EmptyRegionError, NoCandidatesError
from .foreground import ForegroundMap, nmse, rle_decode, rle_encode
from .gestures import GestureSequence, action_from_dict, action_to_dict
from .recognition import KnownObjects, predict_foreground, train
from .scene import (
    Goal,
    Scene,
    _goal_from_dict,
    _goal_to_dict,
    auto_part_labels,
    generate_scene,
    goal_foreground,
    scene_from_dict,
    scene_to_dict,
    subset_foreground,
)
from .evaluation import random_salience
from .foreground import threshold


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class Session:
    id: str
    scene: Scene
    goal: Goal
    reveal_goal: bool
    known: KnownObjects
    actions: list = field(default_factory=list)
    timestamps: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    last_foreground: ForegroundMap | None = None
    last_label: str | None = None
    last_score: float | None = None
    last_abstained: bool = False
    last_reason: str | None = None
    reported_nmse: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _mask_payload(m: ForegroundMap) -> dict:
    return {"w": m.grid.w, "h": m.grid.h, "rle": rle_encode(m)}


def _self_trained(scene: Scene) -> KnownObjects:
    labels = scene.labels or auto_part_labels(scene)
    groups = [(lab.label, [subset_foreground(scene, lab.piece_ids)]) for lab in labels]
    return train(groups)


def create_app(
    model: KnownObjects | None = None,
    static_dir: str | None = None,
    snapshot_path: str | None = None,
) -> FastAPI:
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    @asynccontextmanager
    async def _lifespan(_app: FastAPI):
        yield
        if snapshot_path is not None:
            # in-memory store; an optional JSON dump survives shutdown
            with registry_lock:
                payload = {"sessions": [_snapshot(s) for s in sessions.values()]}
            Path(snapshot_path).write_text(json.dumps(payload) + "\n")

    app = FastAPI(title="deixis", docs_url=None, redoc_url=None, lifespan=_lifespan)

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(DeixisError)
    async def _domain_error(_request: Request, exc: DeixisError):
        return JSONResponse(status_code=400, content={"code": exc.code, "message": str(exc)})

    def _get_session(sid: str) -> Session:
        with registry_lock:
            session = sessions.get(sid)
        if session is None:
            raise ApiError(404, "unknown-session", f"no session {sid!r}")
        return session

    def _build_scene(spec: dict) -> Scene:
        if "generate" in spec:
            g = spec["generate"]
            try:
                return generate_scene(int(g["seed"]), int(g.get("pieces", 4)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ApiError(400, "bad-scene-spec", f"bad generate spec: {exc}") from exc
        if "inline" in spec:
            try:
                return scene_from_dict(spec["inline"])
            except DeixisError:
                raise
            except Exception as exc:
                raise ApiError(400, "bad-scene-spec", f"bad inline scene: {exc}") from exc
        raise ApiError(400, "bad-scene-spec", "scene needs 'generate' or 'inline'")

    def _build_goal(spec: dict, scene: Scene) -> Goal:
        if "inline" in spec:
            try:
                return _goal_from_dict(spec["inline"], scene.grid)
            except DeixisError:
                raise
            except Exception as exc:
                raise ApiError(400, "bad-goal-spec", f"bad inline goal: {exc}") from exc
        sample = spec.get("sample", {})
        seed = int(sample.get("seed", 0))
        kind = sample.get("kind", "object-level")
        rng = np.random.default_rng(seed)
        if kind == "object-level":
            labels = scene.labels or auto_part_labels(scene)
            lab = labels[int(rng.integers(0, len(labels)))]
            if not scene.labels:
                raise ApiError(400, "bad-goal-spec", "scene has no labels to sample from")
            return Goal("object-level", label=lab.label)
        if kind == "pixel-level":
            return Goal("pixel-level", mask=threshold(random_salience(scene.grid, rng), 0.5))
        raise ApiError(400, "bad-goal-spec", f"unknown goal kind {kind!r}")

    def _goal_payload(session: Session) -> dict | None:
        if not session.reveal_goal:
            return None
        return _goal_to_dict(session.goal)

    def _snapshot(session: Session) -> dict:
        payload = {
            "session_id": session.id,
            "scene": scene_to_dict(session.scene),
            "reveal_goal": session.reveal_goal,
            "goal": _goal_payload(session),
            "gestures": [
                action_to_dict(a, t) for a, t in zip(session.actions, session.timestamps)
            ],
            "trace": list(session.trace),
            "reported_nmse": list(session.reported_nmse),
            "prediction": None,
        }
        if session.actions:
            payload["prediction"] = {
                "foreground": _mask_payload(
                    session.last_foreground
                    if session.last_foreground is not None
                    else ForegroundMap.zeros(session.scene.grid)
                ),
                "label": session.last_label,
                "score": session.last_score,
                "abstained": session.last_abstained,
                "reason": session.last_reason,
            }
        return payload

    @app.post("/sessions")
    async def create_session(payload: dict):
        if not isinstance(payload, dict):
            raise ApiError(400, "bad-request", "body must be a JSON object")
        scene = _build_scene(payload.get("scene", {}))
        goal = _build_goal(payload.get("goal", {}), scene)
        reveal = bool(payload.get("reveal_goal", True))
        known = model if model is not None else _self_trained(scene)
        session = Session(
            id=uuid.uuid4().hex,
            scene=scene,
            goal=goal,
            reveal_goal=reveal,
            known=known,
        )
        with registry_lock:
            sessions[session.id] = session
        return {
            "session_id": session.id,
            "scene": scene_to_dict(scene),
            "reveal_goal": reveal,
            "goal": _goal_payload(session),
        }

    @app.post("/sessions/{sid}/gestures")
    async def post_gesture(sid: str, payload: dict):
        session = _get_session(sid)
        try:
            action, t = action_from_dict(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise ApiError(400, "bad-gesture", f"malformed gesture: {exc}") from exc
        with session.lock:
            if session.timestamps and t <= session.timestamps[-1]:
                raise ApiError(
                    400, "bad-gesture",
                    f"timestamp {t} not after previous {session.timestamps[-1]}",
                )
            session.actions.append(action)
            session.timestamps.append(t)
            history = GestureSequence(list(session.actions), list(session.timestamps))
            abstained, reason = False, None
            label = score = None
            try:
                top = predict_foreground(session.scene, history, session.known)
                predicted = top.foreground
                label, score = top.label, top.score
            except (NoCandidatesError, EmptyRegionError) as exc:
                predicted = ForegroundMap.zeros(session.scene.grid)
                abstained, reason = True, exc.code
            session.last_foreground = predicted
            session.last_label = label
            session.last_score = score
            session.last_abstained = abstained
            session.last_reason = reason
            goal_mask = goal_foreground(session.scene, session.goal)
            err = nmse(goal_mask, predicted)
            session.trace.append(err)
            response = {
                "gesture": action_to_dict(action, t),  # echoed normalized
                "gesture_count": len(session.actions),
                "foreground": _mask_payload(predicted),
                "label": label,
                "score": score,
                "abstained": abstained,
                "reason": reason,
            }
            if session.reveal_goal:
                response["nmse"] = err
            return response

    @app.post("/sessions/{sid}/reported")
    async def post_reported(sid: str, payload: dict):
        session = _get_session(sid)
        mask_spec = payload.get("mask")
        if not isinstance(mask_spec, dict):
            raise ApiError(400, "bad-mask", "body must contain a 'mask' object")
        grid = session.scene.grid
        if (mask_spec.get("w"), mask_spec.get("h")) != (grid.w, grid.h):
            raise ApiError(
                400, "grid-mismatch",
                f"mask is {mask_spec.get('w')}x{mask_spec.get('h')}, "
                f"session grid is {grid.w}x{grid.h}",
            )
        reported = rle_decode(mask_spec.get("rle", []), grid)
        with session.lock:
            predicted = (
                session.last_foreground
                if session.last_foreground is not None
                else ForegroundMap.zeros(grid)
            )
            err = nmse(reported, predicted)
            session.reported_nmse.append(err)
        return {"nmse": err}

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        session = _get_session(sid)
        with session.lock:
            return _snapshot(session)

    @app.get("/scenes/generate")
    async def scenes_generate(seed: int = 0, n: int = 4):
        try:
            scene = generate_scene(seed, n)
        except ValueError as exc:
            raise ApiError(400, "bad-scene-spec", str(exc)) from exc
        return scene_to_dict(scene)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
