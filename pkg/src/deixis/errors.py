"""Exception types shared across the library.

Every error carries a short machine-readable ``code`` so batch tools and the
HTTP layer can map failures to structured diagnostics without parsing
messages.
"""


class DeixisError(Exception):
    """Base class for all domain errors."""

    code = "error"


class GridMismatchError(DeixisError):
    """Two maps with different grids were combined."""

    code = "grid-mismatch"


class DegeneratePolygonError(DeixisError):
    """Polygon with (near) zero area where area is required."""

    code = "degenerate-polygon"


class EmptyForegroundError(DeixisError):
    """A foreground map with no set pixels where content is required."""

    code = "empty-foreground"


class EmptyRegionError(DeixisError):
    """A gesture cone whose footprint contains no grid pixels."""

    code = "empty-region"


class NoCandidatesError(DeixisError):
    """No foreground hypothesis passed classification (abstention)."""

    code = "no-candidates"


class EnumerationCapError(DeixisError):
    """Candidate count exceeds the subset-enumeration cap."""

    code = "enumeration-cap"

    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} candidates exceed enumeration cap {cap}")
        self.count = count
        self.cap = cap


class UnknownPieceError(DeixisError):
    """A piece id not present in the scene."""

    code = "unknown-piece"


class PlacementError(DeixisError):
    """Scene generation failed to place a piece within the retry budget."""

    code = "placement-failure"


class SceneFormatError(DeixisError):
    """Base for scene/dataset file problems."""

    code = "scene-format"


class MalformedSceneError(SceneFormatError):
    code = "malformed-json"


class UnknownKindError(SceneFormatError):
    code = "unknown-kind"


class DuplicateIdError(SceneFormatError):
    code = "duplicate-id"


class RleError(DeixisError):
    """Run-length data inconsistent with its grid."""

    code = "rle-mismatch"
