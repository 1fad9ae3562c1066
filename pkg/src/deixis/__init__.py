"""Guided search over tangram scenes: from a pointing gesture to the
foreground it refers to, plus the evaluation machinery around it."""

from .errors import (
    DeixisError,
    DuplicateIdError,
    EmptyForegroundError,
    EmptyRegionError,
    EnumerationCapError,
    GridMismatchError,
    MalformedSceneError,
    NoCandidatesError,
    PlacementError,
    RleError,
    SceneFormatError,
    UnknownKindError,
    UnknownPieceError,
)
from .features import HogConfig, HogDescriptor, canonical_window, describe, hog
from .foreground import (
    ForegroundMap,
    SalienceMap,
    align,
    mask_centroid,
    nmse,
    rle_decode,
    rle_encode,
    threshold,
    to_pgm,
)
from .gestures import (
    CandidateSet,
    DeicticAction,
    GestureSequence,
    action_toward,
    enumerate_hypotheses,
    fuse_gestures,
    pieces_in_region,
    region_centroid,
)
from .geometry import (
    ConeRegion,
    GridSpec,
    Point2,
    Polygon,
    Pose,
    apply_pose,
    point_in_cone,
    polygon_centroid,
    rasterize,
)
from .evaluation import (
    CONDITIONS,
    DyadRecord,
    EvalReport,
    GestureNoise,
    emit_report,
    evaluate,
    exemplar_groups_from_records,
    synth_dyads,
    t_test,
    train_from_records,
)
from .recognition import (
    KnownObject,
    KnownObjects,
    RankedPrediction,
    RankerConfig,
    classify,
    load_known_objects,
    predict_foreground,
    rank,
    save_known_objects,
    train,
)
from .scene import (
    Goal,
    PartLabel,
    Piece,
    Scene,
    assembled_square,
    auto_part_labels,
    default_grid,
    generate_scene,
    goal_foreground,
    load_scene,
    piece_silhouette,
    save_scene,
    subset_foreground,
)

__version__ = "0.1.0"
