/** Annotator app: image list, canvas with zoom/pan, the six-click
 * protocol, undo, confirm, save.  All geometry derivation happens on the
 * service; network/validation failures keep the session dirty and show a
 * banner. */

import { ApiClient, ApiError } from "./api.js";
import { render } from "./render.js";
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
  toAnnotationFile,
  undo,
  type Session,
} from "./state.js";
import {
  fitTransform,
  pan,
  toImage,
  toScreen,
  zoomAt,
  type ViewTransform,
} from "./transform.js";
import type { ImageInfo, Pt } from "./types.js";

const api = new ApiClient("");

const canvas = document.getElementById("canvas") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const imageList = document.getElementById("image-list") as HTMLUListElement;
const promptEl = document.getElementById("prompt") as HTMLDivElement;
const bannerEl = document.getElementById("banner") as HTMLDivElement;
const confirmBtn = document.getElementById("confirm") as HTMLButtonElement;
const undoBtn = document.getElementById("undo") as HTMLButtonElement;
const saveBtn = document.getElementById("save") as HTMLButtonElement;

let session: Session | null = null;
let bitmap: ImageBitmap | null = null;
let view: ViewTransform = { scale: 1, offsetX: 0, offsetY: 0 };
let draggingView = false;
let draggingClick: number | null = null;
let lastPointer: Pt = [0, 0];

function banner(message: string, kind: "error" | "info" | "" = "error"): void {
  bannerEl.textContent = message;
  bannerEl.className = kind;
}

function refresh(): void {
  render(ctx, view, bitmap, session);
  if (!session) {
    promptEl.textContent = "select an image";
    confirmBtn.disabled = true;
    saveBtn.disabled = true;
    return;
  }
  promptEl.textContent = promptText(session);
  confirmBtn.disabled = !(session.buffer.length === 6 && session.pendingBox !== null);
  saveBtn.disabled = !session.dirty;
  saveBtn.textContent = session.dirty ? "save*" : "saved";
  document.title = `${session.imageId}${session.dirty ? " *" : ""} - boxseg annotator`;
}

function resizeCanvas(): void {
  const rect = canvas.parentElement!.getBoundingClientRect();
  canvas.width = rect.width;
  canvas.height = rect.height;
  refresh();
}

async function openImage(info: ImageInfo): Promise<void> {
  if (session?.dirty && !window.confirm("discard unsaved changes?")) return;
  const resp = await fetch(api.imageUrl(info.id));
  bitmap = await createImageBitmap(await resp.blob());
  const existing = await api.getAnnotation(info.id);
  session = newSession(info.id, info.width, info.height, existing?.objects ?? []);
  view = fitTransform(info.width, info.height, canvas.width, canvas.height);
  banner(existing ? `loaded ${existing.objects.length} objects` : "new annotation", "info");
  refresh();
}

async function loadImages(): Promise<void> {
  const images = await api.listImages();
  imageList.replaceChildren(
    ...images.map((info) => {
      const li = document.createElement("li");
      li.textContent = `${info.id} (${info.width}x${info.height})`;
      li.addEventListener("click", () => void openImage(info));
      return li;
    }),
  );
  if (images.length === 0) banner("no images served", "info");
}

async function requestBox(): Promise<void> {
  if (!session || session.buffer.length !== 6) return;
  try {
    const derived = await api.deriveBox(deriveRequest(session));
    session = setPendingBox(session, derived.box);
    banner("box derived; confirm to commit", "info");
  } catch (err) {
    if (err instanceof ApiError) {
      banner(`invalid clicks: ${err.message} (undo to fix)`);
    } else {
      banner(`service unreachable: ${String(err)}`);
    }
  }
  refresh();
}

function hitBufferClick(screenPos: Pt): number | null {
  if (!session) return null;
  for (let i = session.buffer.length - 1; i >= 0; i--) {
    const [sx, sy] = toScreen(view, session.buffer[i]!);
    if (Math.hypot(sx - screenPos[0], sy - screenPos[1]) <= 7) return i;
  }
  return null;
}

canvas.addEventListener("pointerdown", (ev) => {
  const rect = canvas.getBoundingClientRect();
  lastPointer = [ev.clientX - rect.left, ev.clientY - rect.top];
  if (ev.button === 1 || ev.shiftKey) {
    draggingView = true;
    canvas.setPointerCapture(ev.pointerId);
    return;
  }
  if (ev.button === 0) {
    const hit = hitBufferClick(lastPointer);
    if (hit !== null) {
      draggingClick = hit;
      canvas.setPointerCapture(ev.pointerId);
    }
  }
});

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const pos: Pt = [ev.clientX - rect.left, ev.clientY - rect.top];
  if (draggingView) {
    view = pan(view, pos[0] - lastPointer[0], pos[1] - lastPointer[1]);
    lastPointer = pos;
    refresh();
    return;
  }
  if (draggingClick !== null && session) {
    session = adjustClick(session, draggingClick, toImage(view, pos));
    lastPointer = pos;
    refresh();
  }
});

canvas.addEventListener("pointerup", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const pos: Pt = [ev.clientX - rect.left, ev.clientY - rect.top];
  if (draggingView) {
    draggingView = false;
    return;
  }
  if (draggingClick !== null) {
    const moved = Math.hypot(pos[0] - lastPointer[0], pos[1] - lastPointer[1]);
    const index = draggingClick;
    draggingClick = null;
    // a stationary press on an existing click is not an adjustment
    if (moved > 0.5 || index < (session?.buffer.length ?? 0)) {
      void requestBoxIfComplete();
    }
    return;
  }
  if (ev.button !== 0 || !session) return;
  const imagePos = toImage(view, pos);
  const result = captureClick(session, imagePos);
  if (result.error) {
    banner(result.error);
  } else {
    session = result.session;
    banner("", "");
    if (session.buffer.length === 6) void requestBox();
  }
  refresh();
});

async function requestBoxIfComplete(): Promise<void> {
  if (session && session.buffer.length === 6) await requestBox();
}

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  const rect = canvas.getBoundingClientRect();
  const pos: Pt = [ev.clientX - rect.left, ev.clientY - rect.top];
  view = zoomAt(view, pos, Math.exp(-ev.deltaY / 400));
  refresh();
});

confirmBtn.addEventListener("click", () => {
  if (!session || session.pendingBox === null) return;
  session = commit(session);
  banner("object committed; save when done", "info");
  refresh();
});

undoBtn.addEventListener("click", () => {
  if (!session) return;
  session = undo(session);
  banner("", "");
  refresh();
});

saveBtn.addEventListener("click", () => void save());

async function save(): Promise<void> {
  if (!session || !session.dirty) return;
  if (prompt(session).kind === "review" || session.buffer.length > 0) {
    banner("finish or undo the in-progress object before saving");
    return;
  }
  try {
    await api.saveAnnotation(session.imageId, toAnnotationFile(session));
    session = markSaved(session);
    banner("saved", "info");
  } catch (err) {
    // dirty flag stays set; the message explains why
    if (err instanceof ApiError) banner(`save rejected: ${err.message}`);
    else banner(`save failed: ${String(err)}`);
  }
  refresh();
}

window.addEventListener("keydown", (ev) => {
  if (ev.key === "z" && (ev.ctrlKey || ev.metaKey)) {
    ev.preventDefault();
    undoBtn.click();
  } else if (ev.key === "s" && (ev.ctrlKey || ev.metaKey)) {
    ev.preventDefault();
    void save();
  } else if (ev.key === "Enter") {
    confirmBtn.click();
  }
});

window.addEventListener("beforeunload", (ev) => {
  if (session?.dirty) ev.preventDefault();
});

window.addEventListener("resize", resizeCanvas);
resizeCanvas();
void loadImages().catch((err) => banner(`cannot list images: ${String(err)}`));
