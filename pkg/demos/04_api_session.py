#!/usr/bin/env python3
"""The interactive loop over the HTTP API, driven in-process: create a
session, point twice, paint a reported foreground, and read the trace.
The same requests work against a live `deixis serve`."""

import math

from fastapi.testclient import TestClient

import deixis as dx
from deixis.scene import scene_from_dict
from deixis.server import create_app

client = TestClient(create_app())

created = client.post("/sessions", json={
    "scene": {"generate": {"seed": 11, "pieces": 4}},
    "goal": {"sample": {"seed": 4, "kind": "object-level"}},
    "reveal_goal": True,
}).json()
sid = created["session_id"]
scene = scene_from_dict(created["scene"])
print("session", sid[:8], "scene", scene.figure_name, "goal", created["goal"])

goal_label = created["goal"]["label"]
target = dx.mask_centroid(
    dx.subset_foreground(scene, scene.label_named(goal_label).piece_ids)
)


def gesture(origin, theta, t, offset=(0.0, 0.0)):
    aim = dx.Point2(target.x + offset[0], target.y + offset[1])
    v = dx.Point2(aim.x - origin[0], aim.y - origin[1])
    n = v.norm()
    half = theta / 2.0
    return {
        "x": origin[0], "y": origin[1],
        "dx": v.x / n, "dy": v.y / n,
        "theta_rad": theta,
        "max_range": n * 3 * half / (2 * math.sin(half)),
        "t": t,
    }


print("\nfirst gesture, badly aimed at empty space below the part:")
r1 = client.post(
    f"/sessions/{sid}/gestures", json=gesture((0.0, 8.0), 1.5, 0.0, offset=(0.0, -4.0))
).json()
print("  predicted:", r1["label"], f"(abstained: {r1['abstained']})",
      " nmse vs goal: %.6f" % r1["nmse"])

print("corrective gesture, narrow, from the other side:")
r2 = client.post(f"/sessions/{sid}/gestures", json=gesture((16.0, 8.0), 0.5, 1.0)).json()
print("  predicted:", r2["label"], " nmse vs goal: %.6f" % r2["nmse"])

print("\npainting exactly the predicted overlay as the reported foreground:")
reported = client.post(f"/sessions/{sid}/reported", json={"mask": r2["foreground"]}).json()
print("  reported-vs-predicted nmse:", reported["nmse"])

snapshot = client.get(f"/sessions/{sid}").json()
print("\nsession trace:", ["%.6f" % v for v in snapshot["trace"]],
      "over", len(snapshot["gestures"]), "gestures")
