import filecmp
import math
from pathlib import Path

import numpy as np
import pytest

from boxseg.errors import PlacementFailed
from boxseg.geometry import box_from_clicks
from boxseg.synth import SynthConfig, generate, generate_dataset


def directory_digest(root: Path) -> dict:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*")) if p.is_file()
    }


class TestGenerate:
    def test_zero_amplitude_gives_disk(self):
        cfg = SynthConfig(
            seed=1, image_size=128, n_objects=1, radius_range=(25.0, 25.0),
            harmonic_amplitude=0.0, noise_sigma=0.0,
        )
        scene = generate(cfg)
        box = scene.annotation.objects[0].box
        assert box.half_u == pytest.approx(25.0, abs=1.0)
        assert box.half_v == pytest.approx(25.0, abs=1.0)
        assert box.half_u == pytest.approx(box.half_v, abs=1.0)

    def test_seed_determinism(self):
        cfg = SynthConfig(seed=99, image_size=96, n_objects=2, radius_range=(8.0, 16.0))
        a = generate(cfg)
        b = generate(cfg)
        assert np.array_equal(a.image, b.image)
        assert np.array_equal(a.gt_labels(), b.gt_labels())
        assert a.annotation == b.annotation

    def test_masks_pairwise_disjoint_and_separated(self):
        from scipy import ndimage

        cfg = SynthConfig(seed=4, image_size=256, n_objects=4)
        scene = generate(cfg)
        union = np.zeros(scene.image.shape, dtype=int)
        for m in scene.gt_masks:
            union += m.mask.astype(int)
        assert union.max() <= 1
        for i, a in enumerate(scene.gt_masks):
            for b in scene.gt_masks[i + 1:]:
                dist = ndimage.distance_transform_edt(~a.mask)
                assert dist[b.mask].min() >= cfg.min_separation

    def test_annotations_pass_geometry_invariants(self):
        for seed in range(5):
            scene = generate(SynthConfig(seed=seed, image_size=160, n_objects=2))
            for obj in scene.annotation.objects:
                rebuilt = box_from_clicks(obj.clicks)
                assert rebuilt == obj.box
                uv = obj.box.to_frame(np.array(obj.box.extreme_points))
                assert np.all(np.abs(uv[:, 0]) <= obj.box.half_u + 1e-9)
                assert np.all(np.abs(uv[:, 1]) <= obj.box.half_v + 1e-9)

    def test_masks_star_shaped_about_center(self):
        for seed in range(3):
            scene = generate(SynthConfig(seed=seed, image_size=160, n_objects=2))
            for m in scene.gt_masks:
                ys, xs = np.nonzero(m.mask)
                cx, cy = xs.mean() + 0.5, ys.mean() + 0.5
                # every boundary pixel must see the centroid within the mask
                boundary = m.mask & ~np.pad(m.mask, 1)[2:, 1:-1]
                bys, bxs = np.nonzero(boundary)
                for by, bx in zip(bys[::5], bxs[::5]):
                    n = int(math.hypot(bx + 0.5 - cx, by + 0.5 - cy) * 3) + 2
                    ts = np.linspace(0.0, 1.0, n)
                    px = np.floor(cx + ts * (bx + 0.5 - cx)).astype(int)
                    py = np.floor(cy + ts * (by + 0.5 - cy)).astype(int)
                    assert m.mask[py, px].all()

    def test_extreme_points_on_mask_and_box_boundary(self):
        scene = generate(SynthConfig(seed=8, image_size=160, n_objects=2))
        for obj, gt in zip(scene.annotation.objects, scene.gt_masks):
            for p in obj.clicks.extreme_clicks:
                r, c = int(p.y), int(p.x)
                assert gt.mask[r, c]
            uv = obj.box.to_frame(np.array(obj.clicks.extreme_clicks))
            on_v = np.isclose(np.abs(uv[:, 1]), obj.box.half_v, atol=1e-9)
            on_u = np.isclose(np.abs(uv[:, 0]), obj.box.half_u, atol=1e-9)
            assert on_v[0] and on_v[1] and on_u[2] and on_u[3]

    def test_placement_failure(self):
        cfg = SynthConfig(
            seed=0, image_size=96, n_objects=12, radius_range=(20.0, 22.0)
        )
        with pytest.raises(PlacementFailed):
            generate(cfg)

    def test_jitter_changes_clicks_but_stays_valid(self):
        plain = generate(SynthConfig(seed=21, image_size=160, n_objects=2))
        jittered = generate(SynthConfig(seed=21, image_size=160, n_objects=2, jitter=True))
        assert plain.annotation != jittered.annotation
        for obj in jittered.annotation.objects:
            assert box_from_clicks(obj.clicks) == obj.box

    def test_amplitude_validation(self):
        with pytest.raises(ValueError):
            SynthConfig(harmonic_amplitude=0.5)


class TestGenerateDataset:
    def test_layout_and_determinism(self, tmp_path):
        cfg = SynthConfig(seed=7, image_size=96, n_objects=2, radius_range=(8.0, 16.0))
        ids = generate_dataset(cfg, 3, tmp_path / "a")
        assert ids == ["synth_0000", "synth_0001", "synth_0002"]
        for iid in ids:
            assert (tmp_path / "a" / "images" / f"{iid}.png").is_file()
            assert (tmp_path / "a" / "gt" / f"{iid}.png").is_file()
            assert (tmp_path / "a" / "annotations" / f"{iid}.json").is_file()
        assert (tmp_path / "a" / "dataset.json").is_file()

        generate_dataset(cfg, 3, tmp_path / "b")
        da = directory_digest(tmp_path / "a")
        db = directory_digest(tmp_path / "b")
        assert da == db

    def test_images_differ_across_dataset(self, tmp_path):
        generate_dataset(SynthConfig(seed=7, image_size=96, n_objects=1, radius_range=(8.0, 16.0)), 2, tmp_path)
        a = (tmp_path / "images" / "synth_0000.png").read_bytes()
        b = (tmp_path / "images" / "synth_0001.png").read_bytes()
        assert a != b
