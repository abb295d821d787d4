/** Canvas drawing for the annotator: image, assistive grid, committed
 * boxes, the in-progress click buffer, and the pending derived box. */

import { adaptiveSpacing, gridSegments } from "./grid.js";
import type { Session } from "./state.js";
import { toScreen, type ViewTransform } from "./transform.js";
import type { Pt, WireBox } from "./types.js";
import { EXTREME_LABELS } from "./types.js";

export const COLORS = {
  orientation: "#3d8bff",
  extreme: "#35c04b",
  box: "#ff9f2e",
  pendingBox: "#ffe14d",
  grid: "rgba(90, 200, 250, 0.35)",
  label: "#e8e8e8",
};

export function boxCorners(box: WireBox): Pt[] {
  const [cx, cy] = box.center;
  const c = Math.cos(box.angle);
  const s = Math.sin(box.angle);
  const out: Pt[] = [];
  for (const [su, sv] of [
    [-1, -1],
    [1, -1],
    [1, 1],
    [-1, 1],
  ] as const) {
    const u = su * box.half_u;
    const v = sv * box.half_v;
    out.push([cx + u * c - v * s, cy + u * s + v * c]);
  }
  return out;
}

function drawPolyline(
  ctx: CanvasRenderingContext2D,
  t: ViewTransform,
  points: Pt[],
  close: boolean,
): void {
  ctx.beginPath();
  points.forEach((p, i) => {
    const [x, y] = toScreen(t, p);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  if (close) ctx.closePath();
  ctx.stroke();
}

function drawDot(
  ctx: CanvasRenderingContext2D,
  t: ViewTransform,
  p: Pt,
  color: string,
  r = 4,
): void {
  const [x, y] = toScreen(t, p);
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fillStyle = color;
  ctx.fill();
}

export function render(
  ctx: CanvasRenderingContext2D,
  t: ViewTransform,
  image: CanvasImageSource | null,
  session: Session | null,
): void {
  const canvas = ctx.canvas;
  ctx.save();
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.fillStyle = "#181818";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.restore();
  if (!image || !session) return;

  ctx.save();
  ctx.imageSmoothingEnabled = t.scale < 4;
  ctx.setTransform(t.scale, 0, 0, t.scale, t.offsetX, t.offsetY);
  ctx.drawImage(image, 0, 0);
  ctx.restore();

  // assistive grid while extreme points are being placed
  if (session.buffer.length >= 2 && session.buffer.length < 6) {
    const spacing = adaptiveSpacing(t.scale);
    const segs = gridSegments(
      [session.buffer[0]!, session.buffer[1]!],
      session.imageWidth,
      session.imageHeight,
      spacing,
    );
    ctx.strokeStyle = COLORS.grid;
    ctx.lineWidth = 1;
    for (const seg of segs) drawPolyline(ctx, t, [seg.a, seg.b], false);
  }

  // committed objects
  ctx.lineWidth = 2;
  for (const obj of session.committed) {
    ctx.strokeStyle = COLORS.box;
    drawPolyline(ctx, t, boxCorners(obj.box), true);
    for (const label of EXTREME_LABELS) {
      drawDot(ctx, t, obj.extreme_points[label], COLORS.extreme, 3);
    }
    const [x, y] = toScreen(t, obj.box.center);
    ctx.fillStyle = COLORS.label;
    ctx.font = "12px sans-serif";
    ctx.fillText(`#${obj.id}`, x + 4, y - 4);
  }

  // in-progress clicks
  session.buffer.forEach((p, i) => {
    drawDot(ctx, t, p, i < 2 ? COLORS.orientation : COLORS.extreme, 5);
  });
  if (session.buffer.length >= 2) {
    ctx.strokeStyle = COLORS.orientation;
    ctx.lineWidth = 1.5;
    drawPolyline(ctx, t, [session.buffer[0]!, session.buffer[1]!], false);
  }

  // pending derived box awaiting confirmation
  if (session.pendingBox) {
    ctx.strokeStyle = COLORS.pendingBox;
    ctx.lineWidth = 2;
    ctx.setLineDash([6, 4]);
    drawPolyline(ctx, t, boxCorners(session.pendingBox), true);
    ctx.setLineDash([]);
  }
}
