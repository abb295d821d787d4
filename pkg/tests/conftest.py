import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from boxseg.geometry import ClickSequence, Point2, TiltedBox


def make_box(cx, cy, angle, half_u, half_v, object_center=None) -> TiltedBox:
    """TiltedBox with extreme points at the edge midpoints."""
    oc = Point2(*object_center) if object_center else Point2(cx, cy)
    c, s = math.cos(angle), math.sin(angle)
    ua = np.array([c, s])
    va = np.array([-s, c])
    center = np.array([cx, cy])
    extremes = (
        center - half_v * va,
        center + half_v * va,
        center - half_u * ua,
        center + half_u * ua,
    )
    return TiltedBox(
        center=Point2(cx, cy),
        angle=angle,
        half_u=half_u,
        half_v=half_v,
        object_center=oc,
        extreme_points=tuple(Point2(float(p[0]), float(p[1])) for p in extremes),
    )


def random_click_sequence(rng: np.random.Generator) -> ClickSequence:
    """A consistent six-click annotation: extremes sampled on the edges of a
    random tilted rectangle, orientation clicks along its u-axis."""
    angle = rng.uniform(-math.pi / 2, math.pi / 2)
    cx, cy = rng.uniform(-100, 100, size=2)
    half_u = rng.uniform(2.0, 50.0)
    half_v = rng.uniform(2.0, 50.0)
    c, s = math.cos(angle), math.sin(angle)
    ua = np.array([c, s])
    va = np.array([-s, c])
    center = np.array([cx, cy])

    def at(u, v):
        p = center + u * ua + v * va
        return Point2(float(p[0]), float(p[1]))

    top = at(rng.uniform(-half_u, half_u), -half_v)
    bottom = at(rng.uniform(-half_u, half_u), half_v)
    left = at(-half_u, rng.uniform(-half_v, half_v))
    right = at(half_u, rng.uniform(-half_v, half_v))
    r = rng.uniform(0.5, 3.0)
    return ClickSequence(
        orientation_clicks=(at(-r, 0.0), at(r, 0.0)),
        extreme_clicks=(top, bottom, left, right),
    )


def random_blob_mask(rng: np.random.Generator, shape=(64, 64),
                     n_seeds: int = 3, radius=(4, 10)) -> np.ndarray:
    """Union of a few random disks; may be disconnected."""
    h, w = shape
    ys, xs = np.mgrid[0:h, 0:w]
    mask = np.zeros(shape, dtype=bool)
    for _ in range(n_seeds):
        r = rng.uniform(*radius)
        cy = rng.uniform(r, h - r)
        cx = rng.uniform(r, w - r)
        mask |= (ys + 0.5 - cy) ** 2 + (xs + 0.5 - cx) ** 2 <= r * r
    return mask


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
