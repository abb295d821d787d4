/** Annotation session state machine.
 *
 * Pure data + transition functions, no DOM: clicks 1-2 are the orientation,
 * clicks 3-6 the extreme points in the fixed order top, bottom, left,
 * right.  Out-of-order input is impossible by construction; the only error
 * path is a degenerate orientation (second click within 2 px of the first).
 * After the sixth click the caller asks the service for the derived box and
 * stores it with setPendingBox; commit() turns buffer + box into a
 * completed object.
 */

import type { AnnotationObject, DeriveBoxRequest, Pt, WireBox } from "./types.js";
import { EXTREME_LABELS } from "./types.js";

export const MIN_ORIENTATION_GAP = 2.0; // px in image coordinates

export interface Session {
  imageId: string;
  imageWidth: number;
  imageHeight: number;
  committed: AnnotationObject[];
  buffer: Pt[]; // 0..6 in-progress clicks
  pendingBox: WireBox | null; // service-derived box for a full buffer
  dirty: boolean;
}

export type Prompt =
  | { kind: "orientation"; index: 1 | 2 }
  | { kind: "extreme"; label: (typeof EXTREME_LABELS)[number] }
  | { kind: "review" };

export function newSession(
  imageId: string,
  imageWidth: number,
  imageHeight: number,
  committed: AnnotationObject[] = [],
): Session {
  return {
    imageId,
    imageWidth,
    imageHeight,
    committed: [...committed],
    buffer: [],
    pendingBox: null,
    dirty: false,
  };
}

export function prompt(session: Session): Prompt {
  const n = session.buffer.length;
  if (n === 0) return { kind: "orientation", index: 1 };
  if (n === 1) return { kind: "orientation", index: 2 };
  if (n < 6) return { kind: "extreme", label: EXTREME_LABELS[n - 2]! };
  return { kind: "review" };
}

export function promptText(session: Session): string {
  const p = prompt(session);
  switch (p.kind) {
    case "orientation":
      return p.index === 1
        ? "click the object center (orientation start)"
        : "click along the object orientation (orientation end)";
    case "extreme":
      return `click the ${p.label} extreme point`;
    case "review":
      return "review the derived box: confirm or adjust";
  }
}

export interface ClickResult {
  session: Session;
  error?: string;
}

export function captureClick(session: Session, point: Pt): ClickResult {
  if (session.buffer.length >= 6) {
    return { session, error: "six clicks already placed; confirm or undo" };
  }
  if (session.buffer.length === 1) {
    const [first] = session.buffer;
    const d = Math.hypot(point[0] - first![0], point[1] - first![1]);
    if (d < MIN_ORIENTATION_GAP) {
      return {
        session,
        error: `orientation clicks must be at least ${MIN_ORIENTATION_GAP}px apart; re-click`,
      };
    }
  }
  return {
    session: { ...session, buffer: [...session.buffer, point], pendingBox: null },
  };
}

/** Move one in-progress click (drag-to-adjust before commit). Invalidates
 * any previously derived box. */
export function adjustClick(session: Session, index: number, point: Pt): Session {
  if (index < 0 || index >= session.buffer.length) return session;
  const buffer = session.buffer.slice();
  buffer[index] = point;
  return { ...session, buffer, pendingBox: null };
}

/** Undo: drop the derived box first, then the last click, then the last
 * committed object. */
export function undo(session: Session): Session {
  if (session.pendingBox !== null) {
    return { ...session, pendingBox: null, buffer: session.buffer.slice(0, -1) };
  }
  if (session.buffer.length > 0) {
    return { ...session, buffer: session.buffer.slice(0, -1) };
  }
  if (session.committed.length > 0) {
    return { ...session, committed: session.committed.slice(0, -1), dirty: true };
  }
  return session;
}

export function deriveRequest(session: Session): DeriveBoxRequest {
  if (session.buffer.length !== 6) {
    throw new Error("derive-box needs exactly six clicks");
  }
  const [o1, o2, top, bottom, left, right] = session.buffer;
  return {
    orientation_clicks: [o1!, o2!],
    extreme_points: { top: top!, bottom: bottom!, left: left!, right: right! },
  };
}

export function setPendingBox(session: Session, box: WireBox): Session {
  if (session.buffer.length !== 6) {
    throw new Error("no complete click buffer to attach a box to");
  }
  return { ...session, pendingBox: box };
}

function nextObjectId(session: Session): number {
  return session.committed.reduce((m, o) => Math.max(m, o.id), 0) + 1;
}

export function commit(session: Session): Session {
  if (session.buffer.length !== 6 || session.pendingBox === null) {
    throw new Error("commit needs six clicks and a service-derived box");
  }
  const request = deriveRequest(session);
  const object: AnnotationObject = {
    id: nextObjectId(session),
    orientation_clicks: request.orientation_clicks,
    extreme_points: request.extreme_points,
    box: session.pendingBox,
  };
  return {
    ...session,
    committed: [...session.committed, object],
    buffer: [],
    pendingBox: null,
    dirty: true,
  };
}

export function toAnnotationFile(session: Session) {
  return {
    image: session.imageId,
    width: session.imageWidth,
    height: session.imageHeight,
    objects: session.committed,
  };
}

export function markSaved(session: Session): Session {
  return { ...session, dirty: false };
}
