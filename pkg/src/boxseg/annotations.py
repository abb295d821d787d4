"""Annotation file schema: one UTF-8 JSON file per image.

The stored box is derived from the six clicks and regenerated on load; a
mismatch beyond 1e-6 marks the file as corrupt.  Saves are atomic (temp
file + rename) so a crashed writer never destroys prior work.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import AnnotationError, BoxSegError
from .geometry import ClickSequence, Point2, TiltedBox, box_from_clicks

BOX_TOL = 1e-6

EXTREME_KEYS = ("top", "bottom", "left", "right")


@dataclass(frozen=True)
class AnnotatedObject:
    id: int
    clicks: ClickSequence
    box: TiltedBox


@dataclass(frozen=True)
class ImageAnnotation:
    image: str
    width: int
    height: int
    objects: tuple[AnnotatedObject, ...]

    @property
    def boxes(self) -> list[TiltedBox]:
        return [obj.box for obj in self.objects]


def _point(value, where: str) -> Point2:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) for v in value)):
        raise AnnotationError(f"{where}: expected [x, y], got {value!r}")
    return Point2(float(value[0]), float(value[1]))


def object_from_dict(data: dict, where: str = "object") -> AnnotatedObject:
    try:
        oid = int(data["id"])
        oc = data["orientation_clicks"]
        ep = data["extreme_points"]
        stored = data["box"]
    except (KeyError, TypeError, ValueError) as exc:
        raise AnnotationError(f"{where}: missing or malformed field ({exc})") from exc
    if not isinstance(oc, (list, tuple)) or len(oc) != 2:
        raise AnnotationError(f"{where}: orientation_clicks must hold 2 points")
    if not isinstance(ep, dict) or set(ep) != set(EXTREME_KEYS):
        raise AnnotationError(f"{where}: extreme_points must have keys {EXTREME_KEYS}")

    clicks = ClickSequence(
        orientation_clicks=(
            _point(oc[0], f"{where}.orientation_clicks[0]"),
            _point(oc[1], f"{where}.orientation_clicks[1]"),
        ),
        extreme_clicks=tuple(
            _point(ep[k], f"{where}.extreme_points.{k}") for k in EXTREME_KEYS
        ),
    )
    try:
        box = box_from_clicks(clicks)
    except BoxSegError as exc:
        raise AnnotationError(f"{where}: invalid clicks: {exc}") from exc

    try:
        center = _point(stored["center"], f"{where}.box.center")
        stored_vals = (
            center.x, center.y,
            float(stored["angle"]), float(stored["half_u"]), float(stored["half_v"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise AnnotationError(f"{where}: malformed box ({exc})") from exc
    derived_vals = (box.center.x, box.center.y, box.angle, box.half_u, box.half_v)
    for name, sv, dv in zip(
        ("center.x", "center.y", "angle", "half_u", "half_v"), stored_vals, derived_vals
    ):
        if abs(sv - dv) > BOX_TOL:
            raise AnnotationError(
                f"{where}: stored box.{name}={sv!r} disagrees with the value "
                f"derived from the clicks ({dv!r})"
            )
    return AnnotatedObject(id=oid, clicks=clicks, box=box)


def object_to_dict(obj: AnnotatedObject) -> dict:
    c1, c2 = obj.clicks.orientation_clicks
    return {
        "id": obj.id,
        "orientation_clicks": [[c1.x, c1.y], [c2.x, c2.y]],
        "extreme_points": {
            k: [p.x, p.y] for k, p in zip(EXTREME_KEYS, obj.clicks.extreme_clicks)
        },
        "box": {
            "center": [obj.box.center.x, obj.box.center.y],
            "angle": obj.box.angle,
            "half_u": obj.box.half_u,
            "half_v": obj.box.half_v,
        },
    }


def annotation_from_dict(data: dict, source: str = "<memory>") -> ImageAnnotation:
    if not isinstance(data, dict):
        raise AnnotationError(f"{source}: annotation must be a JSON object")
    try:
        image = str(data["image"])
        width = int(data["width"])
        height = int(data["height"])
        raw_objects = data["objects"]
    except (KeyError, TypeError, ValueError) as exc:
        raise AnnotationError(f"{source}: missing or malformed field ({exc})") from exc
    if width <= 0 or height <= 0:
        raise AnnotationError(f"{source}: non-positive image dimensions")
    if not isinstance(raw_objects, list):
        raise AnnotationError(f"{source}: objects must be a list")
    objects = tuple(
        object_from_dict(o, where=f"{source}: objects[{i}]")
        for i, o in enumerate(raw_objects)
    )
    ids = [o.id for o in objects]
    if len(set(ids)) != len(ids):
        raise AnnotationError(f"{source}: duplicate object ids")
    return ImageAnnotation(image=image, width=width, height=height, objects=objects)


def annotation_to_dict(ann: ImageAnnotation) -> dict:
    return {
        "image": ann.image,
        "width": ann.width,
        "height": ann.height,
        "objects": [object_to_dict(o) for o in ann.objects],
    }


def load_annotation(path: str | os.PathLike) -> ImageAnnotation:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise AnnotationError(f"{path}: cannot read ({exc})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AnnotationError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno} "
            f"(char {exc.pos}): {exc.msg}"
        ) from exc
    return annotation_from_dict(data, source=str(path))


def save_annotation(ann: ImageAnnotation, path: str | os.PathLike) -> None:
    """Atomic write: serialize to a temp file in the target directory, then
    rename over the destination."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(annotation_to_dict(ann), indent=2) + "\n"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
