import math

import numpy as np
import pytest

from boxseg.boxgt import (
    BACKGROUND,
    IGNORE,
    OBJECT,
    BoxGtConfig,
    rasterize_box_gt,
    segment_rasterize,
)
from boxseg.geometry import ClickSequence, Point2, TiltedBox, box_from_clicks
from conftest import make_box
from oracles import box_gt_reference


class TestSegmentRasterize:
    def test_degenerate_point(self):
        assert segment_rasterize(Point2(0.5, 0.5), Point2(0.5, 0.5)) == {(0, 0)}

    def test_horizontal_unit_thickness(self):
        pixels = segment_rasterize(Point2(0.5, 0.5), Point2(5.5, 0.5), 1.0)
        assert pixels == {(0, c) for c in range(6)}

    def test_random_segments_stay_near_line(self, rng):
        for _ in range(30):
            a = Point2(*rng.uniform(0, 40, size=2))
            b = Point2(*rng.uniform(0, 40, size=2))
            thickness = rng.uniform(0.5, 3.0)
            for r, c in segment_rasterize(a, b, thickness):
                x, y = c + 0.5, r + 0.5
                dx, dy = b.x - a.x, b.y - a.y
                denom = dx * dx + dy * dy
                t = 0.0 if denom == 0 else max(0.0, min(1.0, ((x - a.x) * dx + (y - a.y) * dy) / denom))
                dist = math.hypot(x - (a.x + t * dx), y - (a.y + t * dy))
                assert dist <= thickness / 2 + 0.71

    def test_covers_endpoints(self, rng):
        for _ in range(20):
            a = Point2(*rng.uniform(0, 30, size=2))
            b = Point2(*rng.uniform(0, 30, size=2))
            pixels = segment_rasterize(a, b, 1.0)
            assert (int(a.y), int(a.x)) in pixels
            assert (int(b.y), int(b.x)) in pixels


class TestRasterizeBoxGt:
    def test_no_boxes_all_background_with_warning(self):
        lm = rasterize_box_gt([], (8, 8))
        assert (lm.classes == BACKGROUND).all()
        assert (lm.weights == 1.0).all()
        assert lm.warnings

    def test_full_image_box_cue_by_cue(self):
        box = make_box(10.0, 10.0, 0.0, 10.0, 10.0)
        lm = rasterize_box_gt([box], (20, 20), BoxGtConfig(k=0.4))
        classes = lm.classes
        assert not (classes == BACKGROUND).any()
        # core rectangle: |x-10| <= 4, |y-10| <= 4 over pixel centers
        ys, xs = np.mgrid[0:20, 0:20]
        core = (np.abs(xs + 0.5 - 10.0) <= 4.0) & (np.abs(ys + 0.5 - 10.0) <= 4.0)
        assert (classes[core] == OBJECT).all()
        # spokes from center to edge midpoints
        assert (classes[10, :] == OBJECT).sum() >= 18
        outside = ~core
        outside[10, :] = False
        outside[:, 10] = False
        outside[9, :] = False
        outside[:, 9] = False
        assert (classes[outside] == IGNORE).all()

    def test_weights_zero_iff_ignore(self, rng):
        box = make_box(12.0, 10.0, 0.3, 8.0, 5.0)
        lm = rasterize_box_gt([box], (24, 24))
        assert ((lm.weights == 0.0) == (lm.classes == IGNORE)).all()
        assert set(np.unique(lm.classes)) <= {BACKGROUND, OBJECT, IGNORE}

    def test_monotone_in_boxes(self):
        a = make_box(10.0, 10.0, 0.2, 6.0, 4.0)
        b = make_box(20.0, 18.0, -0.5, 5.0, 5.0)
        lm_one = rasterize_box_gt([a], (32, 32))
        lm_two = rasterize_box_gt([a, b], (32, 32))
        obj_one = lm_one.classes == OBJECT
        assert (lm_two.classes[obj_one] == OBJECT).all()

    def test_core_contained_in_box(self):
        box = make_box(16.0, 16.0, 0.7, 9.0, 6.0)
        lm = rasterize_box_gt([box], (32, 32), BoxGtConfig(k=0.4))
        assert not lm.warnings
        core_corners = TiltedBox(
            center=box.object_center, angle=box.angle,
            half_u=0.4 * box.half_u, half_v=0.4 * box.half_v,
            object_center=box.object_center, extreme_points=box.extreme_points,
        ).corners()
        assert box.contains(core_corners).all()

    def test_two_tilted_boxes_match_per_pixel_oracle(self, rng):
        boxes = [
            make_box(20.0, 24.0, 0.4, 12.0, 7.0, object_center=(21.0, 23.0)),
            make_box(40.0, 30.0, -0.9, 10.0, 9.0, object_center=(39.0, 31.5)),
        ]
        lm = rasterize_box_gt(boxes, (64, 64), BoxGtConfig(k=0.4))
        expected = box_gt_reference(boxes, (64, 64), k=0.4)
        assert (lm.classes == expected).all()

    def test_random_scenes_match_oracle(self, rng):
        for _ in range(5):
            boxes = []
            for _ in range(rng.integers(1, 4)):
                cx, cy = rng.uniform(12, 52, size=2)
                angle = rng.uniform(-math.pi / 2, math.pi / 2)
                hu = rng.uniform(3, 11)
                hv = rng.uniform(3, 11)
                oc = (cx + rng.uniform(-2, 2), cy + rng.uniform(-2, 2))
                boxes.append(make_box(cx, cy, angle, hu, hv, object_center=oc))
            lm = rasterize_box_gt(boxes, (64, 64), BoxGtConfig(k=0.4))
            expected = box_gt_reference(boxes, (64, 64), k=0.4)
            assert (lm.classes == expected).all()

    def test_derived_box_scene(self):
        clicks = ClickSequence(
            orientation_clicks=(Point2(14, 15), Point2(18, 17)),
            extreme_clicks=(Point2(17, 8), Point2(15, 24), Point2(6, 18), Point2(26, 13)),
        )
        box = box_from_clicks(clicks)
        lm = rasterize_box_gt([box], (32, 32))
        expected = box_gt_reference([box], (32, 32), k=0.4)
        assert (lm.classes == expected).all()

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            BoxGtConfig(k=0.0)
        with pytest.raises(ValueError):
            BoxGtConfig(k=1.0)
