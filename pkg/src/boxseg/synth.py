"""Synthetic star-shaped scenes with exact ground truth and annotations.

Each object boundary is a truncated harmonic series around a circle,
r(phi) = R * (1 + sum_j a_j cos(j*phi + phi_j)), which is star-shaped about
its center by construction.  Masks are exact radial pixel-center tests, and
annotations are derived from the masks, so every pipeline stage can be
verified against known truth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import imgio
from .annotations import AnnotatedObject, ImageAnnotation, annotation_to_dict
from .errors import DegenerateBox, PlacementFailed
from .geometry import ClickSequence, Point2, box_from_clicks, same_angle_bounding_box
from .segmenter import InstanceMask


@dataclass(frozen=True)
class SynthConfig:
    image_size: int = 256
    n_objects: int = 3
    radius_range: tuple[float, float] = (18.0, 36.0)
    harmonic_count: int = 3
    harmonic_amplitude: float = 0.25  # sum of |a_j|; < 0.35 keeps r(phi) well-behaved
    edge_sharpness: float = 1.5
    noise_sigma: float = 0.02
    seed: int = 0
    jitter: bool = False
    fg_intensity: float = 0.75
    bg_intensity: float = 0.25
    min_separation: float = 4.0

    def __post_init__(self):
        if not 0.0 <= self.harmonic_amplitude < 0.35:
            raise ValueError("harmonic_amplitude must be in [0, 0.35)")
        if self.radius_range[0] <= 0 or self.radius_range[1] < self.radius_range[0]:
            raise ValueError("invalid radius_range")
        if self.n_objects < 1 or self.image_size < 32:
            raise ValueError("need n_objects >= 1 and image_size >= 32")


@dataclass
class SynthScene:
    image: np.ndarray              # float in [0, 1]
    gt_masks: list[InstanceMask]
    annotation: ImageAnnotation
    config: SynthConfig | None = field(repr=False, default=None)

    def gt_labels(self) -> np.ndarray:
        out = np.zeros(self.image.shape, dtype=np.uint16)
        for m in self.gt_masks:
            out[m.mask] = m.id
        return out


def _radial_mask(size: int, center: tuple[float, float], base_radius: float,
                 amps: np.ndarray, phases: np.ndarray,
                 harmonics: np.ndarray) -> np.ndarray:
    xs = np.arange(size) + 0.5
    ys = np.arange(size) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    dx = gx - center[0]
    dy = gy - center[1]
    phi = np.arctan2(dy, dx)
    r = base_radius * (
        1.0 + sum(a * np.cos(j * phi + p) for a, p, j in zip(amps, phases, harmonics))
    )
    return dx * dx + dy * dy <= r * r


def _derive_annotation_object(
    oid: int, mask: np.ndarray, center: tuple[float, float],
    angle: float, rng: np.random.Generator, jitter: bool,
) -> AnnotatedObject:
    for _ in range(20):
        c, s = math.cos(angle), math.sin(angle)
        c1 = np.array([center[0] - 2.0 * c, center[1] - 2.0 * s])
        c2 = np.array([center[0] + 2.0 * c, center[1] + 2.0 * s])
        extremes = [np.array(p) for p in same_angle_bounding_box(mask, angle).extreme_points]
        if jitter:
            c1 = c1 + rng.uniform(-2.0, 2.0, size=2)
            c2 = c2 + rng.uniform(-2.0, 2.0, size=2)
            extremes = [p + rng.uniform(-2.0, 2.0, size=2) for p in extremes]
        clicks = ClickSequence(
            orientation_clicks=(
                Point2(float(c1[0]), float(c1[1])),
                Point2(float(c2[0]), float(c2[1])),
            ),
            extreme_clicks=tuple(Point2(float(p[0]), float(p[1])) for p in extremes),
        )
        try:
            return AnnotatedObject(id=oid, clicks=clicks, box=box_from_clicks(clicks))
        except DegenerateBox:
            if not jitter:
                raise
    raise PlacementFailed("could not draw consistent jittered clicks")


def generate(config: SynthConfig, image_id: str = "synth_0000") -> SynthScene:
    """Generate one scene: image, per-object GT masks, derived annotation."""
    rng = np.random.default_rng(config.seed)
    size = config.image_size
    masks: list[np.ndarray] = []
    params = []

    min_margin = config.radius_range[0] * (1.0 + config.harmonic_amplitude) + 3.0
    if 2 * min_margin >= size:
        raise PlacementFailed("even the smallest object cannot fit in the image")

    union = np.zeros((size, size), dtype=bool)
    attempts = 0
    max_attempts = 200 * config.n_objects
    while len(masks) < config.n_objects:
        if attempts >= max_attempts:
            raise PlacementFailed(
                f"placed {len(masks)}/{config.n_objects} objects in {attempts} attempts"
            )
        attempts += 1
        base_r = rng.uniform(*config.radius_range)
        margin = base_r * (1.0 + config.harmonic_amplitude) + 3.0
        if 2 * margin >= size:
            continue
        center = tuple(rng.uniform(margin, size - margin, size=2))
        harmonics = np.arange(2, 2 + config.harmonic_count)
        raw = rng.uniform(-1.0, 1.0, size=config.harmonic_count)
        total = np.sum(np.abs(raw))
        scale = rng.uniform(0.3, 1.0) * config.harmonic_amplitude
        amps = raw / total * scale if total > 0 else raw * 0.0
        phases = rng.uniform(0.0, 2.0 * math.pi, size=config.harmonic_count)
        mask = _radial_mask(size, center, base_r, amps, phases, harmonics)
        if not mask.any():
            continue
        if union.any():
            dist = ndimage.distance_transform_edt(~union)
            if dist[mask].min() < config.min_separation:
                continue
        union |= mask
        masks.append(mask)
        params.append(center)

    fg = union
    d_out = ndimage.distance_transform_edt(~fg)
    d_in = ndimage.distance_transform_edt(fg)
    signed = d_out - d_in  # positive outside
    sharp = max(config.edge_sharpness, 0.1)
    blend = 1.0 / (1.0 + np.exp(np.clip(signed / sharp, -50, 50)))
    image = config.bg_intensity + (config.fg_intensity - config.bg_intensity) * blend
    if config.noise_sigma > 0:
        image = image + rng.normal(0.0, config.noise_sigma, size=image.shape)
    image = np.clip(image, 0.0, 1.0)

    objects = []
    gt_masks = []
    for i, (mask, center) in enumerate(zip(masks, params), start=1):
        angle = rng.uniform(-math.pi / 2, math.pi / 2)
        objects.append(
            _derive_annotation_object(i, mask, center, angle, rng, config.jitter)
        )
        gt_masks.append(InstanceMask(id=i, mask=mask))

    annotation = ImageAnnotation(
        image=image_id, width=size, height=size, objects=tuple(objects)
    )
    return SynthScene(image=image, gt_masks=gt_masks, annotation=annotation, config=config)


def generate_dataset(config: SynthConfig, n_images: int, out_dir: str | Path) -> list[str]:
    """Write a dataset: images/, gt/ (16-bit instance labels), annotations/,
    and a manifest listing per-image seeds.  Deterministic per seed."""
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    (out / "gt").mkdir(parents=True, exist_ok=True)
    (out / "annotations").mkdir(parents=True, exist_ok=True)

    children = np.random.SeedSequence(config.seed).spawn(n_images)
    ids = []
    entries = []
    for i, child in enumerate(children):
        image_id = f"synth_{i:04d}"
        seed_i = int(child.generate_state(1)[0])
        scene = generate(replace(config, seed=seed_i), image_id=image_id)
        imgio.write_intensity(out / "images" / f"{image_id}.png", scene.image, bits=16)
        imgio.write_gray(out / "gt" / f"{image_id}.png", scene.gt_labels())
        payload = json.dumps(annotation_to_dict(scene.annotation), indent=2) + "\n"
        (out / "annotations" / f"{image_id}.json").write_text(payload, encoding="utf-8")
        ids.append(image_id)
        entries.append({"id": image_id, "seed": seed_i})

    manifest = {
        "generator": "boxseg.synth",
        "root_seed": config.seed,
        "n_images": n_images,
        "config": {
            "image_size": config.image_size,
            "n_objects": config.n_objects,
            "radius_range": list(config.radius_range),
            "harmonic_count": config.harmonic_count,
            "harmonic_amplitude": config.harmonic_amplitude,
            "edge_sharpness": config.edge_sharpness,
            "noise_sigma": config.noise_sigma,
            "jitter": config.jitter,
        },
        "images": entries,
    }
    (out / "dataset.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return ids
