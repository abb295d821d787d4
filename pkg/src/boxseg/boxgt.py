"""Box ground truth: weak per-pixel labels derived from tilted boxes alone.

Three cues produce the label map: pixels covered by no box are background;
a small core rectangle around each object center plus four spokes to the
extreme points are object; everything else inside boxes is ignored (weight
0 in downstream training).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .geometry import Point2, TiltedBox

log = logging.getLogger(__name__)

BACKGROUND = 0
OBJECT = 1
IGNORE = 255


@dataclass
class LabelMap:
    """Per-pixel class map with the fixed codes 0/1/255 and implied weights
    (0 for IGNORE, 1 otherwise)."""

    classes: np.ndarray  # uint8, HxW
    warnings: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return self.classes.shape

    @property
    def weights(self) -> np.ndarray:
        return (self.classes != IGNORE).astype(np.float64)

    def counts(self) -> dict[str, int]:
        c = self.classes
        return {
            "background": int(np.sum(c == BACKGROUND)),
            "object": int(np.sum(c == OBJECT)),
            "ignore": int(np.sum(c == IGNORE)),
        }


@dataclass(frozen=True)
class BoxGtConfig:
    k: float = 0.4  # core rectangle scale per side
    spoke_thickness: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.k < 1.0:
            raise ValueError("k must be in (0, 1)")
        if self.spoke_thickness <= 0:
            raise ValueError("spoke_thickness must be positive")


def segment_rasterize(a: Point2, b: Point2, thickness: float = 1.0) -> set[tuple[int, int]]:
    """Discrete 8-connected cover of the segment a-b.

    Returns (row, col) pixels: every pixel whose center is within
    thickness/2 of the segment, plus the pixels walked by dense sampling so
    the result always covers the segment and stays 8-connected.
    """
    ax, ay, bx, by = a[0], a[1], b[0], b[1]
    length = float(np.hypot(bx - ax, by - ay))
    n = max(2, int(np.ceil(length / 0.45)) + 1)
    ts = np.linspace(0.0, 1.0, n)
    sx = ax + ts * (bx - ax)
    sy = ay + ts * (by - ay)
    pixels = set(zip(np.floor(sy).astype(int).tolist(), np.floor(sx).astype(int).tolist()))

    half = thickness / 2.0
    r0 = int(np.floor(min(ay, by) - half))
    r1 = int(np.ceil(max(ay, by) + half))
    c0 = int(np.floor(min(ax, bx) - half))
    c1 = int(np.ceil(max(ax, bx) + half))
    cols, rows = np.meshgrid(np.arange(c0, c1 + 1), np.arange(r0, r1 + 1))
    px = cols + 0.5
    py = rows + 0.5
    if length == 0.0:
        dist = np.hypot(px - ax, py - ay)
    else:
        t = ((px - ax) * (bx - ax) + (py - ay) * (by - ay)) / (length * length)
        t = np.clip(t, 0.0, 1.0)
        dist = np.hypot(px - (ax + t * (bx - ax)), py - (ay + t * (by - ay)))
    near = dist <= half
    pixels.update(zip(rows[near].tolist(), cols[near].tolist()))
    return pixels


def rasterize_box_gt(
    boxes: list[TiltedBox],
    image_bounds: tuple[int, int],
    config: BoxGtConfig | None = None,
) -> LabelMap:
    """Rasterize the box ground truth for one image; `image_bounds` is (h, w).

    Class precedence where cues overlap: OBJECT > BACKGROUND > IGNORE.
    An empty box list yields an all-background map with a warning recorded.
    """
    config = config or BoxGtConfig()
    h, w = image_bounds
    classes = np.full((h, w), BACKGROUND, dtype=np.uint8)
    out = LabelMap(classes=classes)
    if not boxes:
        out.warnings.append("empty annotation: no boxes, whole image labeled background")
        log.warning("rasterize_box_gt called with no boxes")
        return out

    covered = np.zeros((h, w), dtype=bool)
    obj = np.zeros((h, w), dtype=bool)
    for box in boxes:
        covered |= box.footprint((h, w))

        core = TiltedBox(
            center=box.object_center,
            angle=box.angle,
            half_u=config.k * box.half_u,
            half_v=config.k * box.half_v,
            object_center=box.object_center,
            extreme_points=box.extreme_points,
        )
        if not bool(np.all(box.contains(core.corners()))):
            out.warnings.append("core rectangle extends beyond its box")
            log.warning("core rectangle escapes its box (object center far off-center)")
        obj |= core.footprint((h, w))

        for extreme in box.extreme_points:
            for r, c in segment_rasterize(box.object_center, extreme, config.spoke_thickness):
                if 0 <= r < h and 0 <= c < w:
                    obj[r, c] = True

    classes[covered] = IGNORE
    classes[obj] = OBJECT
    return out
