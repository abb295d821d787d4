import { describe, expect, it } from "vitest";

import {
  adjustClick,
  captureClick,
  commit,
  deriveRequest,
  markSaved,
  newSession,
  prompt,
  promptText,
  setPendingBox,
  undo,
  type Session,
} from "../src/state.js";
import type { Pt, WireBox } from "../src/types.js";

const BOX: WireBox = { center: [10, 10], angle: 0.2, half_u: 6, half_v: 4 };

const CLICKS: Pt[] = [
  [10, 10],
  [14, 11],
  [12, 4],
  [11, 16],
  [3, 10],
  [18, 11],
];

function clickAll(session: Session, clicks: Pt[] = CLICKS): Session {
  for (const c of clicks) {
    const result = captureClick(session, c);
    expect(result.error).toBeUndefined();
    session = result.session;
  }
  return session;
}

describe("click protocol", () => {
  it("prompts in the fixed order", () => {
    let s = newSession("img", 64, 64);
    const expected = [
      { kind: "orientation", index: 1 },
      { kind: "orientation", index: 2 },
      { kind: "extreme", label: "top" },
      { kind: "extreme", label: "bottom" },
      { kind: "extreme", label: "left" },
      { kind: "extreme", label: "right" },
      { kind: "review" },
    ];
    for (const want of expected) {
      expect(prompt(s)).toEqual(want);
      if (want.kind !== "review") {
        s = captureClick(s, [CLICKS[s.buffer.length]![0], CLICKS[s.buffer.length]![1]]).session;
      }
    }
  });

  it("rejects a seventh click", () => {
    const s = clickAll(newSession("img", 64, 64));
    const result = captureClick(s, [1, 1]);
    expect(result.error).toMatch(/six clicks/);
    expect(result.session.buffer).toHaveLength(6);
  });

  it("rejects a degenerate orientation and keeps the buffer", () => {
    let s = newSession("img", 64, 64);
    s = captureClick(s, [10, 10]).session;
    const result = captureClick(s, [10.5, 11]); // 1.1px away
    expect(result.error).toMatch(/re-click/);
    expect(result.session.buffer).toHaveLength(1);
    // a click 2px away is fine
    expect(captureClick(s, [12, 10]).error).toBeUndefined();
  });

  it("never exceeds six buffered clicks", () => {
    let s = newSession("img", 64, 64);
    for (let i = 0; i < 20; i++) {
      s = captureClick(s, [i * 3, 7]).session;
      expect(s.buffer.length).toBeLessThanOrEqual(6);
    }
  });
});

describe("undo", () => {
  it("returns the prompt to 'bottom' after undoing click 4", () => {
    let s = newSession("img", 64, 64);
    for (const c of CLICKS.slice(0, 4)) s = captureClick(s, c).session;
    expect(prompt(s)).toEqual({ kind: "extreme", label: "left" });
    s = undo(s);
    expect(s.buffer).toHaveLength(3);
    expect(prompt(s)).toEqual({ kind: "extreme", label: "bottom" });
    expect(promptText(s)).toContain("bottom");
  });

  it("drops the pending box together with the sixth click", () => {
    let s = clickAll(newSession("img", 64, 64));
    s = setPendingBox(s, BOX);
    s = undo(s);
    expect(s.pendingBox).toBeNull();
    expect(s.buffer).toHaveLength(5);
    expect(prompt(s)).toEqual({ kind: "extreme", label: "right" });
  });

  it("removes the last committed object once the buffer is empty", () => {
    let s = clickAll(newSession("img", 64, 64));
    s = commit(setPendingBox(s, BOX));
    s = markSaved(s);
    expect(s.committed).toHaveLength(1);
    s = undo(s);
    expect(s.committed).toHaveLength(0);
    expect(s.dirty).toBe(true); // deleting a saved object re-dirties
  });

  it("is a no-op on a fresh session", () => {
    const s = newSession("img", 64, 64);
    expect(undo(s)).toEqual(s);
  });
});

describe("commit and save", () => {
  it("builds the wire object from the buffer", () => {
    let s = clickAll(newSession("img", 64, 64));
    const request = deriveRequest(s);
    expect(request.orientation_clicks).toEqual([CLICKS[0], CLICKS[1]]);
    expect(request.extreme_points).toEqual({
      top: CLICKS[2],
      bottom: CLICKS[3],
      left: CLICKS[4],
      right: CLICKS[5],
    });
    s = commit(setPendingBox(s, BOX));
    expect(s.buffer).toHaveLength(0);
    expect(s.pendingBox).toBeNull();
    expect(s.dirty).toBe(true);
    expect(s.committed[0]).toMatchObject({ id: 1, box: BOX });
  });

  it("assigns increasing object ids starting after existing ones", () => {
    const existing = {
      id: 7,
      orientation_clicks: [CLICKS[0], CLICKS[1]] as [Pt, Pt],
      extreme_points: {
        top: CLICKS[2]!,
        bottom: CLICKS[3]!,
        left: CLICKS[4]!,
        right: CLICKS[5]!,
      },
      box: BOX,
    };
    let s = newSession("img", 64, 64, [existing]);
    s = clickAll(s);
    s = commit(setPendingBox(s, BOX));
    expect(s.committed.map((o) => o.id)).toEqual([7, 8]);
  });

  it("refuses to commit without a derived box", () => {
    const s = clickAll(newSession("img", 64, 64));
    expect(() => commit(s)).toThrow(/service-derived/);
  });

  it("adjusting a click invalidates the derived box", () => {
    let s = clickAll(newSession("img", 64, 64));
    s = setPendingBox(s, BOX);
    s = adjustClick(s, 3, [11, 17]);
    expect(s.pendingBox).toBeNull();
    expect(s.buffer[3]).toEqual([11, 17]);
  });

  it("markSaved clears the dirty flag only", () => {
    let s = clickAll(newSession("img", 64, 64));
    s = commit(setPendingBox(s, BOX));
    const saved = markSaved(s);
    expect(saved.dirty).toBe(false);
    expect(saved.committed).toEqual(s.committed);
  });
});
