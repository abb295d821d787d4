import math

import numpy as np
import pytest

from boxseg.errors import (
    AngleMismatch,
    DegenerateBox,
    DegenerateOrientation,
    EmptyMask,
)
from boxseg.geometry import (
    ClickSequence,
    Point2,
    assistive_grid,
    box_from_clicks,
    normalize_angle,
    same_angle_bounding_box,
    same_angle_iou,
)
from conftest import random_click_sequence
from oracles import rasterized_same_angle_iou, rotated_extents


def axis_aligned_clicks():
    return ClickSequence(
        orientation_clicks=(Point2(0, 0), Point2(1, 0)),
        extreme_clicks=(Point2(2, -3), Point2(2, 3), Point2(-4, 0), Point2(8, 0)),
    )


def rotate_clicks(clicks, theta, shift=(0.0, 0.0)):
    c, s = math.cos(theta), math.sin(theta)

    def rot(p):
        return Point2(p.x * c - p.y * s + shift[0], p.x * s + p.y * c + shift[1])

    return ClickSequence(
        orientation_clicks=tuple(rot(p) for p in clicks.orientation_clicks),
        extreme_clicks=tuple(rot(p) for p in clicks.extreme_clicks),
    )


class TestBoxFromClicks:
    def test_axis_aligned_example(self):
        box = box_from_clicks(axis_aligned_clicks())
        assert box.angle == 0.0
        assert box.center == Point2(2.0, 0.0)
        assert box.half_u == 6.0
        assert box.half_v == 3.0
        assert box.object_center == Point2(0.5, 0.0)

    def test_rotation_equivariance_30_degrees(self):
        theta = math.pi / 6
        box = box_from_clicks(rotate_clicks(axis_aligned_clicks(), theta))
        assert box.angle == pytest.approx(theta, abs=1e-12)
        assert box.half_u == pytest.approx(6.0, abs=1e-9)
        assert box.half_v == pytest.approx(3.0, abs=1e-9)
        c, s = math.cos(theta), math.sin(theta)
        assert box.center.x == pytest.approx(2 * c, abs=1e-9)
        assert box.center.y == pytest.approx(2 * s, abs=1e-9)

    def test_random_sequences_satisfy_invariants(self, rng):
        for _ in range(100):
            clicks = random_click_sequence(rng)
            box = box_from_clicks(clicks)
            uv = box.to_frame(np.array(box.extreme_points))
            (u_t, v_t), (u_b, v_b), (u_l, v_l), (u_r, v_r) = uv
            # extreme points lie exactly on the box boundary
            assert abs(abs(v_t) - box.half_v) <= 1e-9
            assert abs(abs(v_b) - box.half_v) <= 1e-9
            assert abs(abs(u_l) - box.half_u) <= 1e-9
            assert abs(abs(u_r) - box.half_u) <= 1e-9
            # and inside the box in the other coordinate
            assert np.all(np.abs(uv[:, 0]) <= box.half_u + 1e-9)
            assert np.all(np.abs(uv[:, 1]) <= box.half_v + 1e-9)

    def test_rigid_motion_equivariance_random(self, rng):
        for _ in range(50):
            clicks = random_click_sequence(rng)
            box = box_from_clicks(clicks)
            theta = rng.uniform(-math.pi, math.pi)
            shift = tuple(rng.uniform(-50, 50, size=2))
            moved = box_from_clicks(rotate_clicks(clicks, theta, shift))
            assert moved.half_u == pytest.approx(box.half_u, abs=1e-6)
            assert moved.half_v == pytest.approx(box.half_v, abs=1e-6)

    def test_swapped_left_right_is_degenerate(self):
        clicks = ClickSequence(
            orientation_clicks=(Point2(0, 0), Point2(1, 0)),
            extreme_clicks=(Point2(2, -3), Point2(2, 3), Point2(8, 0), Point2(-4, 0)),
        )
        with pytest.raises(DegenerateBox):
            box_from_clicks(clicks)

    def test_extreme_outside_box_is_degenerate(self):
        clicks = ClickSequence(
            orientation_clicks=(Point2(0, 0), Point2(1, 0)),
            extreme_clicks=(Point2(20, -3), Point2(2, 3), Point2(-4, 0), Point2(8, 0)),
        )
        with pytest.raises(DegenerateBox):
            box_from_clicks(clicks)

    def test_coincident_orientation_clicks_rejected(self):
        with pytest.raises(DegenerateOrientation):
            ClickSequence(
                orientation_clicks=(Point2(1, 1), Point2(1, 1)),
                extreme_clicks=(Point2(0, -1), Point2(0, 1), Point2(-1, 0), Point2(1, 0)),
            )


class TestNormalizeAngle:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            (0.0, 0.0),
            (math.pi, 0.0),
            (-math.pi, 0.0),
            (math.pi / 2, -math.pi / 2),
            (-math.pi / 2, -math.pi / 2),
            (3 * math.pi / 4, -math.pi / 4),
        ],
    )
    def test_folding(self, raw, expected):
        assert normalize_angle(raw) == pytest.approx(expected, abs=1e-12)

    def test_range(self, rng):
        for a in rng.uniform(-10, 10, size=200):
            out = normalize_angle(float(a))
            assert -math.pi / 2 <= out < math.pi / 2


class TestSameAngleBoundingBox:
    def test_single_pixel_degenerate(self):
        mask = np.zeros((10, 10), dtype=bool)
        mask[5, 5] = True
        box = same_angle_bounding_box(mask, 0.0)
        assert box.center == Point2(5.5, 5.5)
        assert box.half_u == 0.0
        assert box.half_v == 0.0

    def test_axis_aligned_rectangle(self):
        mask = np.zeros((20, 20), dtype=bool)
        mask[5:9, 3:13] = True  # 10 x 4 pixels
        box = same_angle_bounding_box(mask, 0.0)
        # extents over pixel centers: 9 x 3
        assert box.half_u == pytest.approx(4.5)
        assert box.half_v == pytest.approx(1.5)
        ys, xs = np.nonzero(mask)
        centers = np.stack([xs + 0.5, ys + 0.5], axis=-1)
        assert box.contains(centers).all()

    def test_empty_mask_raises(self):
        with pytest.raises(EmptyMask):
            same_angle_bounding_box(np.zeros((5, 5), dtype=bool), 0.0)

    def test_random_blob_matches_bruteforce(self, rng):
        from conftest import random_blob_mask

        angle = math.pi / 7
        for _ in range(5):
            mask = random_blob_mask(rng, shape=(40, 40))
            box = same_angle_bounding_box(mask, angle)
            u_min, u_max, v_min, v_max = rotated_extents(mask, angle)
            assert box.half_u == pytest.approx((u_max - u_min) / 2, abs=1e-9)
            assert box.half_v == pytest.approx((v_max - v_min) / 2, abs=1e-9)

    def test_contains_every_foreground_center(self, rng):
        from conftest import random_blob_mask

        for _ in range(5):
            mask = random_blob_mask(rng)
            angle = rng.uniform(-math.pi / 2, math.pi / 2)
            box = same_angle_bounding_box(mask, angle)
            ys, xs = np.nonzero(mask)
            centers = np.stack([xs + 0.5, ys + 0.5], axis=-1)
            assert box.contains(centers, tol=1e-9).all()


def _random_box_pair(rng):
    angle = rng.uniform(-math.pi / 2, math.pi / 2)
    boxes = []
    for _ in range(2):
        clicks = random_click_sequence(rng)
        box = box_from_clicks(clicks)
        # rebuild at the shared angle via its own frame: reuse extents
        boxes.append(box)
    a = boxes[0]
    from dataclasses import replace

    b = replace(
        boxes[1],
        angle=a.angle,
        center=Point2(a.center.x + rng.uniform(-20, 20), a.center.y + rng.uniform(-20, 20)),
    )
    return a, b


class TestSameAngleIou:
    def test_identical_is_one(self, rng):
        box = box_from_clicks(random_click_sequence(rng))
        assert same_angle_iou(box, box) == 1.0

    def test_disjoint_is_zero(self):
        box = box_from_clicks(axis_aligned_clicks())
        from dataclasses import replace

        far = replace(box, center=Point2(100.0, 100.0))
        assert same_angle_iou(box, far) == 0.0

    def test_angle_mismatch_raises(self, rng):
        box = box_from_clicks(axis_aligned_clicks())
        from dataclasses import replace

        tilted = replace(box, angle=0.1)
        with pytest.raises(AngleMismatch):
            same_angle_iou(box, tilted)

    def test_symmetry_and_bounds(self, rng):
        for _ in range(50):
            a, b = _random_box_pair(rng)
            iou_ab = same_angle_iou(a, b)
            iou_ba = same_angle_iou(b, a)
            assert iou_ab == pytest.approx(iou_ba, abs=1e-12)
            assert 0.0 <= iou_ab <= 1.0

    def test_against_rasterization_oracle(self, rng):
        for _ in range(20):
            a, b = _random_box_pair(rng)
            analytic = same_angle_iou(a, b)
            sampled = rasterized_same_angle_iou(a, b, resolution=0.1)
            assert abs(analytic - sampled) <= 0.01


class TestAssistiveGrid:
    def test_horizontal_orientation(self):
        grid = assistive_grid((Point2(0, 0), Point2(1, 0)), (100, 100), 10.0)
        assert grid.angle == 0.0
        assert grid.origin == Point2(0.5, 0.0)
        h_lines = set()
        v_lines = set()
        for (x0, y0), (x1, y1) in grid.segments:
            if abs(y0 - y1) < 1e-9:
                h_lines.add(round(y0, 6))
            elif abs(x0 - x1) < 1e-9:
                v_lines.add(round(x0, 6))
            else:
                pytest.fail("grid segment neither horizontal nor vertical")
        # horizontal lines pass multiples of 10 from v=0, verticals from u=0.5
        assert h_lines == {float(k) for k in range(0, 101, 10)}
        assert v_lines == {0.5 + 10.0 * k for k in range(0, 10)}

    def test_vertical_orientation_is_rotated_grid(self):
        grid = assistive_grid((Point2(0, 0), Point2(0, 1)), (100, 100), 10.0)
        for (x0, y0), (x1, y1) in grid.segments:
            assert abs(y0 - y1) < 1e-9 or abs(x0 - x1) < 1e-9

    def test_tilted_directions(self):
        grid = assistive_grid((Point2(0, 0), Point2(3, 4)), (200, 200), 15.0)
        d1 = np.array([0.6, 0.8])
        for (x0, y0), (x1, y1) in grid.segments:
            d = np.array([x1 - x0, y1 - y0])
            d = d / np.linalg.norm(d)
            cross_u = abs(d[0] * d1[1] - d[1] * d1[0])
            # parallel to the orientation or to its normal
            assert min(cross_u, abs(abs(cross_u) - 1.0)) < 1e-9

    def test_coincident_clicks_raise(self):
        with pytest.raises(DegenerateOrientation):
            assistive_grid((Point2(5, 5), Point2(5, 5)), (10, 10), 2.0)
