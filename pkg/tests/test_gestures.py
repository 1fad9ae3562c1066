import math

import numpy as np
import pytest

from deixis.errors import EmptyRegionError, EnumerationCapError
from deixis.foreground import mask_centroid
from deixis.gestures import (
    DeicticAction,
    GestureSequence,
    action_from_dict,
    action_to_dict,
    action_toward,
    enumerate_hypotheses,
    fuse_gestures,
    load_gestures,
    pieces_in_region,
    save_gestures,
)
from deixis.geometry import Point2, point_in_cone
from deixis.scene import generate_scene, piece_silhouette


def centroid_of(scene, pid):
    return mask_centroid(piece_silhouette(scene, pid))


class TestPiecesInRegion:
    def test_wide_cone_selects_everything(self):
        scene = generate_scene(12, 4)
        action = DeicticAction(Point2(0.0, 0.0), Point2(math.sqrt(0.5), math.sqrt(0.5)), math.pi)
        cand = pieces_in_region(scene, action)
        assert cand.piece_ids == scene.piece_ids

    def test_narrow_cone_misses_everything(self):
        scene = generate_scene(12, 3)
        # graze the near corner of the rectangle, away from the pieces
        action = DeicticAction(Point2(-1.0, 0.5), Point2(1.0, 0.0), 0.1, 2.0)
        cand = pieces_in_region(scene, action)
        assert cand.piece_ids == frozenset()

    def test_matches_per_piece_cone_oracle(self):
        scene = generate_scene(21, 3)
        target = centroid_of(scene, 1)
        action = action_toward(Point2(0.0, 8.0), target, 0.7)
        cand = pieces_in_region(scene, action)
        region = action.region(scene.grid)
        expected = {
            p.id for p in scene.pieces if point_in_cone(region, centroid_of(scene, p.id))
        }
        assert cand.piece_ids == frozenset(expected)
        assert 1 in cand.piece_ids

    def test_empty_footprint_raises(self):
        scene = generate_scene(12, 3)
        action = DeicticAction(Point2(-5.0, -5.0), Point2(-1.0, 0.0), 0.4, 3.0)
        with pytest.raises(EmptyRegionError):
            pieces_in_region(scene, action)


class TestEnumerate:
    def test_three_candidates_give_seven(self):
        assert len(enumerate_hypotheses(frozenset({1, 2, 3}))) == 7

    def test_single_candidate(self):
        assert enumerate_hypotheses(frozenset({4})) == [frozenset({4})]

    def test_documented_order(self):
        got = enumerate_hypotheses(frozenset({1, 2}))
        assert got == [frozenset({1}), frozenset({2}), frozenset({1, 2})]

    def test_size_then_lexicographic(self):
        got = enumerate_hypotheses(frozenset({3, 1, 2}))
        assert got == [
            frozenset({1}), frozenset({2}), frozenset({3}),
            frozenset({1, 2}), frozenset({1, 3}), frozenset({2, 3}),
            frozenset({1, 2, 3}),
        ]

    def test_cap_error_carries_count(self):
        with pytest.raises(EnumerationCapError) as err:
            enumerate_hypotheses(frozenset(range(12)), cap=10)
        assert err.value.count == 12

    def test_counts_and_uniqueness(self):
        for k in range(1, 7):
            subsets = enumerate_hypotheses(frozenset(range(k)), cap=10)
            assert len(subsets) == 2**k - 1
            assert len(set(subsets)) == len(subsets)


class TestFuse:
    def test_single_gesture_reduces(self):
        scene = generate_scene(33, 4)
        action = action_toward(Point2(0.0, 0.0), centroid_of(scene, 0), 0.8)
        single = pieces_in_region(scene, action)
        fused = fuse_gestures(scene, GestureSequence([action]))
        assert fused.piece_ids == single.piece_ids
        assert fused.centroid == single.centroid
        assert fused.per_action_centroids == (single.centroid,)

    def test_disjoint_regions_union(self):
        scene = generate_scene(33, 4)
        a0 = action_toward(Point2(0.0, 0.0), centroid_of(scene, 0), 0.3)
        a1 = action_toward(Point2(16.0, 16.0), centroid_of(scene, 1), 0.3)
        fused = fuse_gestures(scene, GestureSequence([a0, a1]))
        ids0 = pieces_in_region(scene, a0).piece_ids
        ids1 = pieces_in_region(scene, a1).piece_ids
        assert fused.piece_ids == ids0 | ids1

    def test_idempotent_ids(self):
        scene = generate_scene(33, 4)
        action = action_toward(Point2(0.0, 0.0), centroid_of(scene, 0), 0.8)
        once = fuse_gestures(scene, GestureSequence([action]))
        twice = fuse_gestures(scene, GestureSequence([action, action]))
        assert twice.piece_ids == once.piece_ids
        assert twice.centroid == once.centroid  # mean of identical centers

    def test_order_insensitive_ids(self):
        scene = generate_scene(8, 4)
        a0 = action_toward(Point2(0.0, 2.0), centroid_of(scene, 0), 0.6)
        a1 = action_toward(Point2(16.0, 14.0), centroid_of(scene, 2), 0.6)
        fwd = fuse_gestures(scene, GestureSequence([a0, a1]))
        rev = fuse_gestures(scene, GestureSequence([a1, a0]))
        assert fwd.piece_ids == rev.piece_ids

    def test_all_empty_raises(self):
        scene = generate_scene(8, 3)
        off = DeicticAction(Point2(-5.0, -5.0), Point2(-1.0, 0.0), 0.4, 3.0)
        with pytest.raises(EmptyRegionError):
            fuse_gestures(scene, GestureSequence([off, off]))


class TestThetaMonotonicity:
    def test_candidates_grow_with_theta(self):
        scene = generate_scene(44, 5)
        rng = np.random.default_rng(17)
        for _ in range(30):
            origin = Point2(float(rng.uniform(0, 16)), 0.0)
            target = Point2(float(rng.uniform(2, 14)), float(rng.uniform(2, 14)))
            t1, t2 = sorted(rng.uniform(0.1, math.pi, size=2))
            small = pieces_in_region(scene, action_toward(origin, target, float(t1)))
            large = pieces_in_region(scene, action_toward(origin, target, float(t2)))
            assert small.piece_ids <= large.piece_ids


class TestGestureSequence:
    def test_requires_actions(self):
        with pytest.raises(ValueError):
            GestureSequence([])

    def test_default_timestamps(self):
        a = DeicticAction(Point2(0, 0), Point2(1, 0), 0.5)
        g = GestureSequence([a, a, a])
        assert g.timestamps == (0.0, 1.0, 2.0)

    def test_strictly_increasing(self):
        a = DeicticAction(Point2(0, 0), Point2(1, 0), 0.5)
        with pytest.raises(ValueError):
            GestureSequence([a, a], [0.0, 0.0])

    def test_direction_must_be_unit(self):
        with pytest.raises(ValueError):
            DeicticAction(Point2(0, 0), Point2(2, 0), 0.5)


class TestGestureJson:
    def test_round_trip(self, tmp_path):
        g = GestureSequence(
            [
                DeicticAction(Point2(1.5, 2.25), Point2(0.6, 0.8), 0.7, 12.0),
                DeicticAction(Point2(0.0, 3.0), Point2(1.0, 0.0), 0.5),
            ],
            [0.25, 1.75],
        )
        path = tmp_path / "gestures.json"
        save_gestures(g, path)
        assert load_gestures(path) == g

    def test_normalizes_direction(self):
        action, t = action_from_dict(
            {"x": 0, "y": 0, "dx": 3.0, "dy": 4.0, "theta_rad": 0.5, "t": 0.0}
        )
        assert action.direction.x == pytest.approx(0.6)
        assert action.direction.y == pytest.approx(0.8)
        assert t == 0.0

    def test_zero_direction_rejected(self):
        with pytest.raises(ValueError):
            action_from_dict({"x": 0, "y": 0, "dx": 0, "dy": 0, "theta_rad": 0.5, "t": 0})

    def test_field_names(self):
        a = DeicticAction(Point2(1, 2), Point2(0, 1), 0.9, 5.0)
        d = action_to_dict(a, 3.0)
        assert set(d) == {"x", "y", "dx", "dy", "theta_rad", "max_range", "t"}
        no_range = DeicticAction(Point2(1, 2), Point2(0, 1), 0.9)
        assert "max_range" not in action_to_dict(no_range, 0.0)
