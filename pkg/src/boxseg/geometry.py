"""Tilted-box geometry: boxes from six-click annotations, same-angle IoU,
assistive grids.

Conventions used throughout the toolkit:

* Continuous image coordinates; pixel (row i, col j) has center (j + 0.5, i + 0.5).
* A box angle is a line direction normalized to [-pi/2, pi/2).  The rotated
  frame has u-axis (cos a, sin a) and v-axis (-sin a, cos a); with y growing
  downward, "top" means smallest v, "leftmost" means smallest u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AngleMismatch, DegenerateBox, DegenerateOrientation, EmptyMask

ANGLE_TOL = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class ClickSequence:
    """Six annotation clicks: two for orientation, four for the extremes.

    Extreme clicks are ordered (top, bottom, leftmost, rightmost) in the
    rotated frame derived from the orientation clicks.
    """

    orientation_clicks: tuple[Point2, Point2]
    extreme_clicks: tuple[Point2, Point2, Point2, Point2]

    def __post_init__(self):
        a, b = self.orientation_clicks
        if a.x == b.x and a.y == b.y:
            raise DegenerateOrientation("orientation clicks coincide")


@dataclass(frozen=True)
class TiltedBox:
    """Oriented rectangle with the extreme points that defined it.

    `center` is the rectangle center; `object_center` is the midpoint of the
    two orientation clicks (kept separately, they differ in general).
    `extreme_points` are ordered (top, bottom, leftmost, rightmost).
    """

    center: Point2
    angle: float
    half_u: float
    half_v: float
    object_center: Point2
    extreme_points: tuple[Point2, Point2, Point2, Point2]

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit u- and v-axis of the rotated frame."""
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([c, s]), np.array([-s, c])

    def to_frame(self, xy: np.ndarray) -> np.ndarray:
        """Map (..., 2) image coordinates to box-centered (u, v) coordinates."""
        xy = np.asarray(xy, dtype=float)
        c, s = math.cos(self.angle), math.sin(self.angle)
        dx = xy[..., 0] - self.center.x
        dy = xy[..., 1] - self.center.y
        return np.stack([dx * c + dy * s, -dx * s + dy * c], axis=-1)

    def contains(self, xy: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Boolean test of (..., 2) points against the closed rectangle."""
        uv = self.to_frame(xy)
        return (np.abs(uv[..., 0]) <= self.half_u + tol) & (
            np.abs(uv[..., 1]) <= self.half_v + tol
        )

    def corners(self) -> np.ndarray:
        """4x2 corner coordinates in image space (u-v rectangle order)."""
        ua, va = self.axes()
        c = np.array([self.center.x, self.center.y])
        out = []
        for su, sv in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
            out.append(c + su * self.half_u * ua + sv * self.half_v * va)
        return np.array(out)

    def footprint(self, image_shape: tuple[int, int]) -> np.ndarray:
        """Boolean mask of pixels whose centers lie inside the box."""
        h, w = image_shape
        xs = np.arange(w) + 0.5
        ys = np.arange(h) + 0.5
        gx, gy = np.meshgrid(xs, ys)
        return self.contains(np.stack([gx, gy], axis=-1))

    @property
    def area(self) -> float:
        return 4.0 * self.half_u * self.half_v


@dataclass(frozen=True)
class AssistiveGrid:
    """Grid lines parallel/perpendicular to an annotation orientation,
    clipped to the image; `segments` is a list of ((x0, y0), (x1, y1))."""

    angle: float
    origin: Point2
    spacing: float
    segments: list[tuple[tuple[float, float], tuple[float, float]]]


def normalize_angle(angle: float) -> float:
    """Fold a direction angle into [-pi/2, pi/2)."""
    a = math.remainder(angle, math.pi)
    if a >= math.pi / 2:
        a -= math.pi
    elif a < -math.pi / 2:
        a += math.pi
    return a


def _uv(points: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    points = np.asarray(points, dtype=float)
    return np.stack(
        [points[..., 0] * c + points[..., 1] * s,
         -points[..., 0] * s + points[..., 1] * c],
        axis=-1,
    )


def box_from_clicks(clicks: ClickSequence) -> TiltedBox:
    """Derive the tilted box whose edges pass through the four extreme clicks.

    The top/bottom/left/right labels are interpreted in the frame of the
    clicked direction itself (click1 -> click2), which makes the derivation
    exactly equivariant under rigid motions of all six clicks; the stored
    angle is the same line direction folded into [-pi/2, pi/2).

    Raises DegenerateBox when the extreme clicks are inconsistent with their
    labels (non-positive extents, or a click falling outside the box).
    """
    p1, p2 = clicks.orientation_clicks
    raw_angle = math.atan2(p2.y - p1.y, p2.x - p1.x)
    angle = normalize_angle(raw_angle)

    ext = np.array(clicks.extreme_clicks, dtype=float)
    uv = _uv(ext, raw_angle)
    (u_t, v_t), (u_b, v_b), (u_l, v_l), (u_r, v_r) = uv

    half_u = (u_r - u_l) / 2.0
    half_v = (v_b - v_t) / 2.0
    if half_u <= 0 or half_v <= 0:
        raise DegenerateBox(
            f"extreme clicks inconsistent with labels (half_u={half_u:.3g}, "
            f"half_v={half_v:.3g})"
        )

    cu = (u_l + u_r) / 2.0
    cv = (v_t + v_b) / 2.0
    tol = 1e-9 * max(1.0, abs(cu), abs(cv), half_u, half_v)
    if not (abs(u_t - cu) <= half_u + tol and abs(u_b - cu) <= half_u + tol
            and abs(v_l - cv) <= half_v + tol and abs(v_r - cv) <= half_v + tol):
        raise DegenerateBox("an extreme click lies outside the derived box")

    c, s = math.cos(raw_angle), math.sin(raw_angle)
    center = Point2(float(cu * c - cv * s), float(cu * s + cv * c))
    object_center = Point2((p1.x + p2.x) / 2.0, (p1.y + p2.y) / 2.0)
    return TiltedBox(
        center=center,
        angle=angle,
        half_u=float(half_u),
        half_v=float(half_v),
        object_center=object_center,
        extreme_points=tuple(Point2(float(x), float(y)) for x, y in ext),
    )


def same_angle_bounding_box(mask: np.ndarray, angle: float) -> TiltedBox:
    """Minimal rectangle at `angle` containing all foreground pixel centers.

    Extreme points are the touching pixel centers (ties broken by scan
    order).  A single-pixel mask yields a degenerate zero-extent box.
    """
    mask = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise EmptyMask("cannot bound an empty mask")
    angle = normalize_angle(angle)
    centers = np.stack([xs + 0.5, ys + 0.5], axis=-1)
    uv = _uv(centers, angle)
    u, v = uv[:, 0], uv[:, 1]

    i_l, i_r = int(np.argmin(u)), int(np.argmax(u))
    i_t, i_b = int(np.argmin(v)), int(np.argmax(v))
    cu = (u[i_l] + u[i_r]) / 2.0
    cv = (v[i_t] + v[i_b]) / 2.0
    c, s = math.cos(angle), math.sin(angle)
    center = Point2(float(cu * c - cv * s), float(cu * s + cv * c))
    extremes = tuple(
        Point2(float(centers[i, 0]), float(centers[i, 1])) for i in (i_t, i_b, i_l, i_r)
    )
    return TiltedBox(
        center=center,
        angle=angle,
        half_u=float(u[i_r] - u[i_l]) / 2.0,
        half_v=float(v[i_b] - v[i_t]) / 2.0,
        object_center=center,
        extreme_points=extremes,
    )


def same_angle_iou(a: TiltedBox, b: TiltedBox) -> float:
    """Analytic IoU of two boxes sharing one angle (axis-aligned overlap in
    the shared rotated frame).  Two identical degenerate boxes score 1."""
    if abs(a.angle - b.angle) > ANGLE_TOL:
        raise AngleMismatch(f"angles differ: {a.angle} vs {b.angle}")
    if (a.center == b.center and a.half_u == b.half_u and a.half_v == b.half_v):
        return 1.0
    ca = _uv(np.array([[a.center.x, a.center.y]]), a.angle)[0]
    cb = _uv(np.array([[b.center.x, b.center.y]]), a.angle)[0]

    du = min(ca[0] + a.half_u, cb[0] + b.half_u) - max(ca[0] - a.half_u, cb[0] - b.half_u)
    dv = min(ca[1] + a.half_v, cb[1] + b.half_v) - max(ca[1] - a.half_v, cb[1] - b.half_v)
    inter = max(du, 0.0) * max(dv, 0.0)
    union = a.area + b.area - inter
    if union <= 0.0:
        same = (
            abs(ca[0] - cb[0]) <= ANGLE_TOL and abs(ca[1] - cb[1]) <= ANGLE_TOL
            and abs(a.half_u - b.half_u) <= ANGLE_TOL
            and abs(a.half_v - b.half_v) <= ANGLE_TOL
        )
        return 1.0 if same else 0.0
    return float(inter / union)


def _clip_line(origin: np.ndarray, direction: np.ndarray,
               width: float, height: float):
    """Clip the infinite line origin + t*direction to [0,w]x[0,h].

    Returns a segment ((x0, y0), (x1, y1)) or None when the line misses the
    rectangle (Liang-Barsky on an unbounded parameter)."""
    t0, t1 = -math.inf, math.inf
    for o, d, lo, hi in (
        (origin[0], direction[0], 0.0, width),
        (origin[1], direction[1], 0.0, height),
    ):
        if abs(d) < 1e-12:
            if o < lo or o > hi:
                return None
            continue
        ta, tb = (lo - o) / d, (hi - o) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
    if t1 - t0 < 1e-9 or math.isinf(t0) or math.isinf(t1):
        return None
    p0 = origin + t0 * direction
    p1 = origin + t1 * direction
    return (float(p0[0]), float(p0[1])), (float(p1[0]), float(p1[1]))


def assistive_grid(
    orientation_clicks: tuple[Point2, Point2],
    image_bounds: tuple[int, int],
    spacing: float,
) -> AssistiveGrid:
    """Grid aligned with the clicked orientation, anchored at the click
    midpoint, with lines every `spacing` pixels; `image_bounds` is (h, w)."""
    p1, p2 = orientation_clicks
    if p1.x == p2.x and p1.y == p2.y:
        raise DegenerateOrientation("orientation clicks coincide")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    angle = normalize_angle(math.atan2(p2.y - p1.y, p2.x - p1.x))
    origin = Point2((p1.x + p2.x) / 2.0, (p1.y + p2.y) / 2.0)
    h, w = image_bounds
    c, s = math.cos(angle), math.sin(angle)
    ua = np.array([c, s])
    va = np.array([-s, c])
    anchor = np.array([origin.x, origin.y])

    # Offsets large enough for any line family to cross the image diagonal.
    n_max = int(math.ceil(math.hypot(w, h) / spacing)) + 1
    segments = []
    for axis, normal in ((ua, va), (va, ua)):
        for k in range(-n_max, n_max + 1):
            seg = _clip_line(anchor + k * spacing * normal, axis, float(w), float(h))
            if seg is not None:
                segments.append(seg)
    return AssistiveGrid(angle=angle, origin=origin, spacing=spacing, segments=segments)
