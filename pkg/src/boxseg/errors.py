"""Exception hierarchy shared across the toolkit."""


class BoxSegError(Exception):
    """Base class for all toolkit errors."""


class DegenerateBox(BoxSegError):
    """Clicks do not define a box with positive extents, or extreme clicks
    are inconsistent with their top/bottom/left/right labels."""


class DegenerateOrientation(BoxSegError):
    """The two orientation clicks coincide."""


class AngleMismatch(BoxSegError):
    """Same-angle IoU requested for boxes with different angles."""


class EmptyMask(BoxSegError):
    """A mask that must contain foreground pixels is empty."""


class EmptyImage(BoxSegError):
    """An image that must contain pixels is empty or unreadable as such."""


class UnreadableFile(BoxSegError):
    """File missing or not decodable in the expected format."""


class DimensionMismatch(BoxSegError):
    """Two rasters that must share dimensions do not."""


class NoComponents(BoxSegError):
    """Domain partition requested for a segmentation with no components."""


class GraphSearchError(BoxSegError):
    """Base class for refinement failures; callers fall back to the rough mask."""


class DegenerateBoundary(GraphSearchError):
    """Component boundary too short to build columns on."""


class Infeasible(GraphSearchError):
    """No closed path satisfies the smoothness and node constraints."""


class SelfIntersecting(GraphSearchError):
    """The optimal contour is not a simple polygon."""


class TopologyChanged(GraphSearchError):
    """Refinement produced a mask whose component count differs from one."""


class MissingMask(BoxSegError):
    """A matched pair reached assembly with neither a refined nor a fallback mask."""


class PlacementFailed(BoxSegError):
    """Synthetic object placement did not succeed within the retry budget."""


class EmptyList(BoxSegError):
    """Aggregation over an empty score list."""


class AnnotationError(BoxSegError):
    """Annotation file is malformed or inconsistent with its stored box."""
