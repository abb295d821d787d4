/** Assistive grid: line segments parallel and perpendicular to the clicked
 * orientation, anchored at the click midpoint and clipped to the image.
 * Only used for display while the extreme points are placed; boxes always
 * come from the service. */

import type { Pt } from "./types.js";

export interface GridSegment {
  a: Pt;
  b: Pt;
}

function clipLine(
  ox: number,
  oy: number,
  dx: number,
  dy: number,
  w: number,
  h: number,
): GridSegment | null {
  let t0 = -Infinity;
  let t1 = Infinity;
  for (const [o, d, hi] of [
    [ox, dx, w],
    [oy, dy, h],
  ] as const) {
    if (Math.abs(d) < 1e-12) {
      if (o < 0 || o > hi) return null;
      continue;
    }
    let ta = (0 - o) / d;
    let tb = (hi - o) / d;
    if (ta > tb) [ta, tb] = [tb, ta];
    t0 = Math.max(t0, ta);
    t1 = Math.min(t1, tb);
  }
  if (!(t1 - t0 > 1e-9) || !isFinite(t0) || !isFinite(t1)) return null;
  return {
    a: [ox + t0 * dx, oy + t0 * dy],
    b: [ox + t1 * dx, oy + t1 * dy],
  };
}

export function gridSegments(
  orientation: [Pt, Pt],
  imageW: number,
  imageH: number,
  spacing: number,
): GridSegment[] {
  const [p1, p2] = orientation;
  const angle = Math.atan2(p2[1] - p1[1], p2[0] - p1[0]);
  const ux = Math.cos(angle);
  const uy = Math.sin(angle);
  const vx = -uy;
  const vy = ux;
  const anchorX = (p1[0] + p2[0]) / 2;
  const anchorY = (p1[1] + p2[1]) / 2;

  const nMax = Math.ceil(Math.hypot(imageW, imageH) / spacing) + 1;
  const segments: GridSegment[] = [];
  for (const [ax, ay, nx, ny] of [
    [ux, uy, vx, vy],
    [vx, vy, ux, uy],
  ] as const) {
    for (let k = -nMax; k <= nMax; k++) {
      const seg = clipLine(
        anchorX + k * spacing * nx,
        anchorY + k * spacing * ny,
        ax,
        ay,
        imageW,
        imageH,
      );
      if (seg) segments.push(seg);
    }
  }
  return segments;
}

/** Grid spacing that stays visually constant: a round image-space value
 * close to `targetScreenPx / scale`. */
export function adaptiveSpacing(scale: number, targetScreenPx = 40): number {
  const raw = targetScreenPx / scale;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}
