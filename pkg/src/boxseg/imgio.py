"""Single-channel image I/O (8- and 16-bit PNG/PGM) via Pillow."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionMismatch, UnreadableFile


def read_gray(path: str | os.PathLike) -> np.ndarray:
    """Read a single-channel image as its native integer array (uint8/uint16)."""
    try:
        with Image.open(path) as im:
            if im.mode in ("I", "I;16", "I;16B"):
                arr = np.asarray(im, dtype=np.int64)
                if arr.min() < 0 or arr.max() > 65535:
                    raise UnreadableFile(f"{path}: 16-bit range exceeded")
                return arr.astype(np.uint16)
            if im.mode != "L":
                im = im.convert("L")
            return np.asarray(im, dtype=np.uint8)
    except (OSError, ValueError) as exc:
        raise UnreadableFile(f"cannot read image {path}: {exc}") from exc


def write_gray(path: str | os.PathLike, array: np.ndarray) -> None:
    """Write a uint8 or uint16 array as a single-channel PNG/PGM."""
    array = np.asarray(array)
    if array.ndim != 2:
        raise ValueError("expected a 2-D array")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if array.dtype == np.uint8:
        Image.fromarray(array, mode="L").save(path)
    elif array.dtype == np.uint16:
        Image.fromarray(array).save(path)  # mode I;16
    else:
        raise ValueError(f"unsupported dtype {array.dtype}; pass uint8 or uint16")


def read_intensity(path: str | os.PathLike,
                   expect_shape: tuple[int, int] | None = None) -> np.ndarray:
    """Read a grayscale image rescaled to [0, 1] by its dtype maximum."""
    raw = read_gray(path)
    if expect_shape is not None and raw.shape != tuple(expect_shape):
        raise DimensionMismatch(f"{path}: shape {raw.shape}, expected {tuple(expect_shape)}")
    denom = 255.0 if raw.dtype == np.uint8 else 65535.0
    return raw.astype(np.float64) / denom


def write_intensity(path: str | os.PathLike, intensity: np.ndarray,
                    bits: int = 16) -> None:
    """Quantize a [0, 1] image to 8 or 16 bits and write it."""
    intensity = np.clip(np.asarray(intensity, dtype=np.float64), 0.0, 1.0)
    if bits == 8:
        write_gray(path, np.rint(intensity * 255.0).astype(np.uint8))
    elif bits == 16:
        write_gray(path, np.rint(intensity * 65535.0).astype(np.uint16))
    else:
        raise ValueError("bits must be 8 or 16")
