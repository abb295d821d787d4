"""Pixel-level segmentation metrics: F1/precision/recall, morphological
best-F1 sweep, and micro-averaged aggregation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from skimage.morphology import binary_dilation, binary_erosion, disk

from .boxgt import IGNORE, OBJECT
from .errors import DimensionMismatch, EmptyList


@dataclass(frozen=True)
class PixelScore:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r) if p + r else 0.0

    def as_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
        }


def as_object_mask(arr: np.ndarray) -> np.ndarray:
    """Foreground of a prediction array: bool arrays pass through, class
    maps contribute their OBJECT pixels (IGNORE counts as not-object)."""
    arr = np.asarray(arr)
    if arr.dtype == bool:
        return arr
    return arr == OBJECT


def ignore_mask(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.dtype == bool:
        return np.zeros(arr.shape, dtype=bool)
    return arr == IGNORE


def pixel_f1(pred: np.ndarray, gt: np.ndarray) -> PixelScore:
    """Pixel-level score of predicted object pixels against ground truth.

    Accepts boolean masks or class maps with the 0/1/255 codes; pixels
    marked IGNORE in the ground truth are excluded from every count.
    """
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise DimensionMismatch(f"pred {pred.shape} vs gt {gt.shape}")
    valid = ~ignore_mask(gt)
    p = as_object_mask(pred) & valid
    g = as_object_mask(gt) & valid
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    return PixelScore(tp=tp, fp=fp, fn=fn)


def dilate_erode_to_max_f1(
    pred: np.ndarray, gt: np.ndarray, max_steps: int = 5
) -> dict:
    """Sweep pred through k in [-max_steps, max_steps] morphological steps
    (disk radius 1 each; negative erodes) and return the best F1 and its k.
    Ties prefer the smallest |k|, then the smaller k.
    """
    pred = as_object_mask(np.asarray(pred))
    if pred.shape != np.asarray(gt).shape:
        raise DimensionMismatch(f"pred {pred.shape} vs gt {np.asarray(gt).shape}")
    se = disk(1)
    results = {0: pixel_f1(pred, gt).f1}
    grown = pred
    shrunk = pred
    for k in range(1, max_steps + 1):
        grown = binary_dilation(grown, se)
        shrunk = binary_erosion(shrunk, se)
        results[k] = pixel_f1(grown, gt).f1
        results[-k] = pixel_f1(shrunk, gt).f1
    best_step = max(results, key=lambda k: (results[k], -abs(k), -k))
    return {"best_f1": results[best_step], "step": best_step}


def aggregate(scores: Sequence[PixelScore] | Iterable[PixelScore]) -> PixelScore:
    """Micro-average: sum the counts, recompute precision/recall/F1."""
    scores = list(scores)
    if not scores:
        raise EmptyList("cannot aggregate zero scores")
    return PixelScore(
        tp=sum(s.tp for s in scores),
        fp=sum(s.fp for s in scores),
        fn=sum(s.fn for s in scores),
    )


def macro_f1(scores: Sequence[PixelScore]) -> float:
    """Unweighted mean of per-image F1 (reported alongside the micro value)."""
    if not scores:
        raise EmptyList("cannot average zero scores")
    return float(np.mean([s.f1 for s in scores]))
