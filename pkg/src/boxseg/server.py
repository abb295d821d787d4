"""HTTP service backing the browser annotator.

JSON over HTTP: image listing/bytes, annotation load/save (atomic), and a
box-derivation endpoint so the UI and the pipeline share one geometry
implementation.  Images are read-only; only annotation files are written.
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from PIL import Image

from .annotations import (
    EXTREME_KEYS,
    annotation_from_dict,
    annotation_to_dict,
    load_annotation,
    save_annotation,
)
from .errors import AnnotationError, BoxSegError
from .geometry import ClickSequence, Point2, box_from_clicks


def _bad_request(message: str) -> JSONResponse:
    return JSONResponse({"detail": message}, status_code=400)


def _point(value, where: str) -> Point2:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) for v in value)):
        raise AnnotationError(f"{where}: expected [x, y]")
    return Point2(float(value[0]), float(value[1]))


def create_app(images_dir: str | Path, annotations_dir: str | Path,
               ui_dir: str | Path | None = None) -> FastAPI:
    images = Path(images_dir)
    annotations = Path(annotations_dir)
    annotations.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="boxseg annotation service")
    write_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
    locks_guard = threading.Lock()

    def image_path(image_id: str) -> Path | None:
        # ids are bare stems; reject anything path-like
        if not image_id or "/" in image_id or "\\" in image_id or ".." in image_id:
            return None
        path = images / f"{image_id}.png"
        return path if path.is_file() else None

    @app.get("/api/images")
    def list_images():
        out = []
        for path in sorted(images.glob("*.png")):
            with Image.open(path) as im:
                w, h = im.size
            out.append({"id": path.stem, "width": w, "height": h})
        return out

    @app.get("/api/images/{image_id}")
    def get_image(image_id: str):
        path = image_path(image_id)
        if path is None:
            return JSONResponse({"detail": f"unknown image {image_id!r}"}, status_code=404)
        return FileResponse(path, media_type="image/png")

    @app.get("/api/annotations/{image_id}")
    def get_annotation(image_id: str):
        path = image_path(image_id)
        if path is None:
            return JSONResponse({"detail": f"unknown image {image_id!r}"}, status_code=404)
        ann_path = annotations / f"{image_id}.json"
        if not ann_path.is_file():
            return JSONResponse({"detail": "no annotation"}, status_code=404)
        return annotation_to_dict(load_annotation(ann_path))

    @app.post("/api/annotations/{image_id}")
    async def post_annotation(image_id: str, request: Request):
        path = image_path(image_id)
        if path is None:
            return JSONResponse({"detail": f"unknown image {image_id!r}"}, status_code=404)
        try:
            data = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return _bad_request(f"invalid JSON: {exc}")
        try:
            ann = annotation_from_dict(data, source=f"POST {image_id}")
        except AnnotationError as exc:
            return _bad_request(str(exc))
        if ann.image != image_id:
            return _bad_request(f"annotation is for {ann.image!r}, not {image_id!r}")
        with Image.open(path) as im:
            w, h = im.size
        if (ann.width, ann.height) != (w, h):
            return _bad_request(
                f"annotation dimensions {ann.width}x{ann.height} do not match "
                f"image {w}x{h}"
            )
        with locks_guard:
            lock = write_locks[image_id]
        with lock:
            save_annotation(ann, annotations / f"{image_id}.json")
        return Response(status_code=204)

    @app.post("/api/derive-box")
    async def derive_box(request: Request):
        try:
            data = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return _bad_request(f"invalid JSON: {exc}")
        if not isinstance(data, dict):
            return _bad_request("body must be a JSON object")
        try:
            oc = data["orientation_clicks"]
            ep = data["extreme_points"]
            if not isinstance(oc, (list, tuple)) or len(oc) != 2:
                raise AnnotationError("orientation_clicks must hold 2 points")
            if not isinstance(ep, dict) or set(ep) != set(EXTREME_KEYS):
                raise AnnotationError(f"extreme_points must have keys {EXTREME_KEYS}")
            clicks = ClickSequence(
                orientation_clicks=(
                    _point(oc[0], "orientation_clicks[0]"),
                    _point(oc[1], "orientation_clicks[1]"),
                ),
                extreme_clicks=tuple(
                    _point(ep[k], f"extreme_points.{k}") for k in EXTREME_KEYS
                ),
            )
            box = box_from_clicks(clicks)
        except KeyError as exc:
            return _bad_request(f"missing field {exc}")
        except BoxSegError as exc:
            return _bad_request(str(exc))
        return {
            "box": {
                "center": [box.center.x, box.center.y],
                "angle": box.angle,
                "half_u": box.half_u,
                "half_v": box.half_v,
            },
            "object_center": [box.object_center.x, box.object_center.y],
            "corners": box.corners().tolist(),
        }

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
