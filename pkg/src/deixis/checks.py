"""Agreement suites between the fast paths and the brute-force references.

Used by the ``oracle-check`` command and by the acceptance tests, so the two
always run the same cases.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRegionError, NoCandidatesError
from .evaluation import student_t_two_tailed_p
from .foreground import ForegroundMap, nmse
from .gestures import GestureSequence, action_toward
from .geometry import GridSpec, Point2
from .oracle import oracle_nmse, oracle_predict, oracle_t_two_tailed_p
from .recognition import predict_foreground, train
from .scene import generate_scene, subset_foreground


@dataclass
class SuiteResult:
    name: str
    ok: bool
    detail: str


def nmse_agreement_suite(seed: int = 0, trials: int = 1000, w: int = 16, h: int = 12) -> SuiteResult:
    """Random mask pairs: fast metric vs double-loop metric within 1e-12."""
    rng = np.random.default_rng(seed)
    grid = GridSpec(w, h, Point2(0.0, 0.0), Point2(float(w), float(h)))
    worst = 0.0
    for _ in range(trials):
        a = ForegroundMap(grid, rng.integers(0, 2, size=(h, w)).astype(bool))
        b = ForegroundMap(grid, rng.integers(0, 2, size=(h, w)).astype(bool))
        worst = max(worst, abs(nmse(a, b) - oracle_nmse(a, b)))
    ok = worst <= 1e-12
    return SuiteResult("nmse-agreement", ok, f"max |fast - oracle| = {worst:.3e} over {trials} pairs")


def t_cdf_agreement_suite(tol: float = 1e-8) -> SuiteResult:
    """Beta-function p-values vs quadrature p-values across t and df."""
    worst = 0.0
    for df in (1, 2, 3, 4, 5, 10, 30, 58, 118):
        for t in (-5.0, -1.2247448713915892, -0.5, 0.0, 0.3, 1.0, 2.5, 8.0):
            p_fast = student_t_two_tailed_p(t, df)
            p_ref = oracle_t_two_tailed_p(t, df)
            worst = max(worst, abs(p_fast - p_ref))
    ok = worst <= tol
    return SuiteResult("t-cdf-agreement", ok, f"max |beta - quadrature| = {worst:.3e}")


def _equivalence_case(case_seed: int):
    """One seeded scene where every piece subset is a trained exemplar, so
    the pipeline and the exact-match oracle search the same hypothesis space."""
    rng = np.random.default_rng(case_seed)
    grid = GridSpec(64, 64, Point2(0.0, 0.0), Point2(16.0, 16.0))
    n_pieces = int(rng.integers(2, 6))
    scene = generate_scene(int(rng.integers(0, 2**62)), n_pieces, grid=grid)
    ids = sorted(scene.piece_ids)
    subsets = [
        frozenset(combo)
        for size in range(1, len(ids) + 1)
        for combo in itertools.combinations(ids, size)
    ]
    masks = [subset_foreground(scene, s) for s in subsets]
    known = train(
        [("+".join(map(str, sorted(s))), [m]) for s, m in zip(subsets, masks)]
    )
    target = masks[int(rng.integers(0, len(masks)))]
    from .foreground import mask_centroid

    aim = mask_centroid(target)
    side = int(rng.integers(0, 4))
    u = float(rng.uniform(0.1, 0.9))
    origin = [
        Point2(16.0 * u, 0.0), Point2(16.0, 16.0 * u),
        Point2(16.0 * u, 16.0), Point2(0.0, 16.0 * u),
    ][side]
    theta = float(rng.uniform(0.4, 1.2))
    dist = (aim - origin).norm()
    half = theta / 2.0
    action = action_toward(origin, aim, theta, dist * 3.0 * half / (2.0 * math.sin(half)))
    return scene, action, masks, known


def predict_equivalence_suite(seed: int = 0, cases: int = 200) -> SuiteResult:
    """Pipeline subset choice vs oracle subset choice on seeded scenes."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    abstained = 0
    compared = 0
    for _ in range(cases):
        scene, action, masks, known = _equivalence_case(int(rng.integers(0, 2**62)))
        try:
            fast = predict_foreground(scene, GestureSequence([action]), known)
            fast_subset = fast.piece_ids
        except (NoCandidatesError, EmptyRegionError):
            fast_subset = None
        try:
            ref_subset, _ = oracle_predict(scene, action, masks)
        except (NoCandidatesError, EmptyRegionError):
            ref_subset = None
        if fast_subset is None or ref_subset is None:
            abstained += 1
            continue
        compared += 1
        if fast_subset != ref_subset:
            mismatches += 1
    ok = mismatches == 0 and compared > 0
    return SuiteResult(
        "predict-equivalence",
        ok,
        f"{compared} compared, {mismatches} mismatches, {abstained} abstained of {cases}",
    )


def run_suites(which: str = "all", seed: int = 0, cases: int = 200) -> list[SuiteResult]:
    results = []
    if which in ("all", "nmse"):
        results.append(nmse_agreement_suite(seed))
    if which in ("all", "t-cdf"):
        results.append(t_cdf_agreement_suite())
    if which in ("all", "predict"):
        results.append(predict_equivalence_suite(seed, cases))
    if not results:
        raise ValueError(f"unknown suite {which!r}")
    return results
