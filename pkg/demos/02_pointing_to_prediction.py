#!/usr/bin/env python3
"""The full top-down pipeline, stage by stage: a pointing cone selects
candidate pieces, piece subsets become foreground hypotheses, shape
classifiers filter them, and inverse-distance ranking picks the referent.
A second gesture then sharpens a deliberately sloppy first one."""

import math

import deixis as dx
from deixis.gestures import enumerate_hypotheses, fuse_gestures, pieces_in_region
from deixis.recognition import classify

scene = dx.generate_scene(seed=42, piece_count=4)
print("scene:", ", ".join(f"{p.id}:{p.kind}" for p in scene.pieces))

# the engine knows this scene's labeled parts by shape
groups = [(lab.label, [dx.subset_foreground(scene, lab.piece_ids)]) for lab in scene.labels]
known = dx.train(groups)
print("known objects:", ", ".join(e.label for e in known.entries))


def aim(origin, target, theta):
    # choose the range so the cone footprint centers on the target
    dist = (target - origin).norm()
    half = theta / 2.0
    return dx.action_toward(origin, target, theta, dist * 3 * half / (2 * math.sin(half)))


goal = dx.mask_centroid(dx.piece_silhouette(scene, 2))
print(f"\npointing at piece 2's centroid ({goal.x:.2f}, {goal.y:.2f}) from the left edge")
action = aim(dx.Point2(0.0, 8.0), goal, theta=0.9)

cand = pieces_in_region(scene, action)
print("candidates in the cone:", sorted(cand.piece_ids),
      f" region center ({cand.centroid.x:.2f}, {cand.centroid.y:.2f})")

hypotheses = enumerate_hypotheses(cand)
print(f"{len(hypotheses)} subset hypotheses, e.g.", [sorted(h) for h in hypotheses[:5]], "...")

accepted = []
for subset in hypotheses:
    mask = dx.subset_foreground(scene, subset)
    if any(bit for _, bit in classify(mask, known)):
        accepted.append(subset)
print(f"{len(accepted)} hypotheses accepted by some classifier")

prediction = dx.predict_foreground(scene, dx.GestureSequence([action]), known)
print("top-ranked:", prediction.label, sorted(prediction.piece_ids),
      f"score {prediction.score:.3f}")
print("exact match with the intended piece:",
      dx.nmse(dx.piece_silhouette(scene, 2), prediction.foreground) == 0.0)

print("\n== a sloppy gesture, then a corrective one ==")
sloppy = aim(dx.Point2(0.0, 0.0), dx.Point2(goal.x + 2.5, goal.y + 2.0), theta=1.2)
first = dx.predict_foreground(scene, dx.GestureSequence([sloppy]), known)
print("after one wide, offset gesture:", first.label, sorted(first.piece_ids))

followup = aim(dx.Point2(16.0, 8.0), goal, theta=0.5)
both = dx.GestureSequence([sloppy, followup])
fused = fuse_gestures(scene, both)
print("fused candidates:", sorted(fused.piece_ids), "from", len(fused.per_action_centroids), "gestures")
second = dx.predict_foreground(scene, both, known)
print("after the follow-up:", second.label, sorted(second.piece_ids))
