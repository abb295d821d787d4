"""Rough-segmentation providers and component labeling.

The refinement stage only needs a foreground probability map with correct
object topology.  A learned model would normally produce it; here it enters
either from files (import) or from a classical intensity baseline, both
behind the same provider contract:

    provider(image, image_id) -> ProbabilityMap     # same shape, values in [0, 1]
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np
from scipy import ndimage
from skimage.filters import threshold_otsu
from skimage.morphology import binary_opening, disk

from . import imgio
from .errors import EmptyImage

EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class ProbabilityMap:
    """Per-pixel foreground probability in [0, 1]."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 2 or p.size == 0:
            raise EmptyImage("probability map must be a non-empty 2-D array")
        if p.min() < 0.0 or p.max() > 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "p", p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.p.shape


@dataclass
class InstanceMask:
    """One labeled object: integer id plus a full-size boolean mask."""

    id: int
    mask: np.ndarray

    @property
    def area(self) -> int:
        return int(np.count_nonzero(self.mask))


@dataclass
class RoughSegmentation:
    """Binarized foreground with its 8-connected components."""

    foreground: np.ndarray
    components: list[InstanceMask]

    def labels(self) -> np.ndarray:
        """Component-id map (uint16, 0 = background)."""
        out = np.zeros(self.foreground.shape, dtype=np.uint16)
        for comp in self.components:
            out[comp.mask] = comp.id
        return out


Provider = Callable[[np.ndarray, str], ProbabilityMap]


class RoughSegmentationProvider(Protocol):
    def __call__(self, image: np.ndarray, image_id: str) -> ProbabilityMap: ...


def baseline_segment(
    image: np.ndarray,
    threshold_mode: str = "otsu",
    fixed_threshold: float = 0.5,
    min_area: int = 0,
    opening_radius: int = 0,
    smoothing_sigma: float = 0.0,
) -> ProbabilityMap:
    """Classical bright-object baseline on a [0, 1] grayscale image.

    The smoothed intensity is remapped piecewise-linearly so the chosen
    threshold lands at probability 0.5; pixels discarded by morphological
    opening or the minimum-area filter are zeroed.  Deterministic.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2 or image.size == 0:
        raise EmptyImage("expected a non-empty 2-D grayscale image")
    if image.min() < 0.0 or image.max() > 1.0:
        raise ValueError("intensities must be rescaled to [0, 1]")
    if threshold_mode not in ("otsu", "fixed"):
        raise ValueError(f"unknown threshold_mode {threshold_mode!r}")

    smoothed = ndimage.gaussian_filter(image, smoothing_sigma) if smoothing_sigma > 0 else image
    if threshold_mode == "fixed":
        t = float(fixed_threshold)
    elif smoothed.min() == smoothed.max():
        t = float(smoothed.min())
    else:
        t = float(threshold_otsu(smoothed))

    p = np.empty_like(smoothed)
    below = smoothed < t
    if t > 0:
        p[below] = 0.5 * smoothed[below] / t
    else:
        p[below] = 0.0
    if t < 1.0:
        p[~below] = 0.5 + 0.5 * (smoothed[~below] - t) / (1.0 - t)
    else:
        p[~below] = 1.0
    p = np.clip(p, 0.0, 1.0)

    binary = ~below
    if opening_radius > 0:
        binary = binary_opening(binary, disk(opening_radius))
    if min_area > 0:
        labels, n = ndimage.label(binary, structure=EIGHT_CONNECTED)
        if n:
            areas = np.bincount(labels.ravel())
            small = np.nonzero(areas < min_area)[0]
            binary[np.isin(labels, small[small > 0])] = False
    p[(p >= 0.5) & ~binary] = 0.0
    return ProbabilityMap(p)


def binarize_and_label(
    p: ProbabilityMap, threshold: float = 0.5, min_area: int = 0
) -> RoughSegmentation:
    """Threshold a probability map and label 8-connected components,
    dropping those smaller than `min_area` pixels.  Ids run 1..n in scan
    order; the foreground map is exactly the union of kept components."""
    binary = p.p >= threshold
    labels, n = ndimage.label(binary, structure=EIGHT_CONNECTED)
    components = []
    next_id = 1
    for lab in range(1, n + 1):
        mask = labels == lab
        if min_area > 0 and np.count_nonzero(mask) < min_area:
            continue
        components.append(InstanceMask(id=next_id, mask=mask))
        next_id += 1
    foreground = np.zeros_like(binary)
    for comp in components:
        foreground |= comp.mask
    return RoughSegmentation(foreground=foreground, components=components)


def import_probability_map(
    path: str | os.PathLike, expect_shape: tuple[int, int] | None = None
) -> ProbabilityMap:
    """Load an 8- or 16-bit single-channel image as probabilities
    (values divided by the dtype maximum)."""
    return ProbabilityMap(imgio.read_intensity(path, expect_shape=expect_shape))


def export_probability_map(p: ProbabilityMap, path: str | os.PathLike, bits: int = 8) -> None:
    """Write a probability map as an 8- or 16-bit image; 8-bit values
    round-trip exactly through import_probability_map."""
    imgio.write_intensity(path, p.p, bits=bits)


def baseline_provider(
    threshold_mode: str = "otsu",
    fixed_threshold: float = 0.5,
    min_area: int = 0,
    opening_radius: int = 0,
    smoothing_sigma: float = 1.0,
) -> Provider:
    """Provider backed by baseline_segment (image id unused)."""

    def provide(image: np.ndarray, image_id: str) -> ProbabilityMap:
        return baseline_segment(
            image,
            threshold_mode=threshold_mode,
            fixed_threshold=fixed_threshold,
            min_area=min_area,
            opening_radius=opening_radius,
            smoothing_sigma=smoothing_sigma,
        )

    return provide


def import_provider(rough_dir: str | os.PathLike) -> Provider:
    """Provider reading `<rough_dir>/<image_id>.png` per image."""

    def provide(image: np.ndarray, image_id: str) -> ProbabilityMap:
        path = os.path.join(os.fspath(rough_dir), f"{image_id}.png")
        return import_probability_map(path, expect_shape=image.shape)

    return provide
