/** Zoom/pan view transform between screen (canvas CSS px) and image
 * coordinates.  screen = image * scale + offset.  Kept as plain floats so
 * click positions map back to image space exactly (well under the 0.5 px
 * accuracy budget at any zoom). */

import type { Pt } from "./types.js";

export interface ViewTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function identityTransform(): ViewTransform {
  return { scale: 1, offsetX: 0, offsetY: 0 };
}

/** Fit an image into a viewport with a small margin, centered. */
export function fitTransform(
  imageW: number,
  imageH: number,
  viewW: number,
  viewH: number,
  margin = 10,
): ViewTransform {
  const scale = Math.min(
    (viewW - 2 * margin) / imageW,
    (viewH - 2 * margin) / imageH,
  );
  return {
    scale,
    offsetX: (viewW - imageW * scale) / 2,
    offsetY: (viewH - imageH * scale) / 2,
  };
}

export function toScreen(t: ViewTransform, p: Pt): Pt {
  return [p[0] * t.scale + t.offsetX, p[1] * t.scale + t.offsetY];
}

export function toImage(t: ViewTransform, p: Pt): Pt {
  return [(p[0] - t.offsetX) / t.scale, (p[1] - t.offsetY) / t.scale];
}

/** Zoom by `factor` keeping the image point under `screenPos` fixed. */
export function zoomAt(
  t: ViewTransform,
  screenPos: Pt,
  factor: number,
  minScale = 0.05,
  maxScale = 64,
): ViewTransform {
  const scale = Math.min(maxScale, Math.max(minScale, t.scale * factor));
  const pivot = toImage(t, screenPos);
  return {
    scale,
    offsetX: screenPos[0] - pivot[0] * scale,
    offsetY: screenPos[1] - pivot[1] * scale,
  };
}

export function pan(t: ViewTransform, dx: number, dy: number): ViewTransform {
  return { ...t, offsetX: t.offsetX + dx, offsetY: t.offsetY + dy };
}
