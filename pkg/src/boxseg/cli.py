"""Command-line entry point: synth / run / eval / serve.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
Every subcommand writes a run manifest before touching other outputs; the
manifest records only reproducibility-relevant values, so repeated runs
stay byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from . import imgio, metrics
from .annotations import load_annotation
from .boxgt import BoxGtConfig
from .errors import BoxSegError
from .graphsearch import GsConfig
from .pipeline import MatchConfig, PipelineConfig, persist_result, run_image
from .segmenter import baseline_provider, import_provider
from .synth import SynthConfig, generate_dataset

log = logging.getLogger(__name__)

try:
    __version__ = version("boxseg")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"


def write_manifest(out_path: Path, subcommand: str, config: dict) -> None:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "tool": "boxseg",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
    }
    out_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")


def _validation_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def cmd_synth(args: argparse.Namespace) -> int:
    if args.n < 1:
        return _validation_error("--n must be >= 1")
    if args.size < 32:
        return _validation_error("--size must be >= 32")
    if args.objects < 1:
        return _validation_error("--objects must be >= 1")
    radius_min = args.radius_min if args.radius_min else args.size / 14
    radius_max = args.radius_max if args.radius_max else args.size / 7
    if not 0 < radius_min <= radius_max:
        return _validation_error("need 0 < --radius-min <= --radius-max")
    out = Path(args.out)
    write_manifest(out / "manifest.json", "synth", {
        "out": args.out, "n": args.n, "size": args.size, "seed": args.seed,
        "objects": args.objects, "jitter": args.jitter,
        "radius_min": radius_min, "radius_max": radius_max,
    })
    config = SynthConfig(
        image_size=args.size, n_objects=args.objects, seed=args.seed,
        jitter=args.jitter, radius_range=(radius_min, radius_max),
    )
    try:
        ids = generate_dataset(config, args.n, out)
    except BoxSegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(ids)} images to {out}")
    return 0


def _build_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(
        box_gt=BoxGtConfig(k=args.k),
        match=MatchConfig(iou_threshold=args.iou_threshold),
        gs=GsConfig(
            n_columns=args.gs_columns,
            nodes_per_column=args.gs_nodes,
            smoothness_delta=args.gs_delta,
        ),
        min_component_area=args.min_area,
    )


def cmd_run(args: argparse.Namespace) -> int:
    if not 0.0 < args.iou_threshold <= 1.0:
        return _validation_error("--iou-threshold must be in (0, 1]")
    if not 0.0 < args.k < 1.0:
        return _validation_error("--k must be in (0, 1)")
    try:
        config = _build_pipeline_config(args)
    except ValueError as exc:
        return _validation_error(str(exc))

    images_dir = Path(args.images)
    ann_dir = Path(args.annotations)
    out = Path(args.out)
    image_files = sorted(images_dir.glob("*.png"))
    if not image_files:
        print(f"error: no .png images in {images_dir}", file=sys.stderr)
        return 1

    write_manifest(out / "manifest.json", "run", {
        "images": args.images, "annotations": args.annotations, "out": args.out,
        "rough": args.rough, "baseline": args.baseline, "k": args.k,
        "iou_threshold": args.iou_threshold, "gs_columns": args.gs_columns,
        "gs_nodes": args.gs_nodes, "gs_delta": args.gs_delta,
        "min_area": args.min_area, "jobs": args.jobs,
    })
    provider = (
        import_provider(args.rough) if args.rough
        else baseline_provider(smoothing_sigma=1.0, min_area=args.min_area)
    )

    def process(path: Path) -> tuple[str, dict | None, str | None]:
        image_id = path.stem
        try:
            annotation = load_annotation(ann_dir / f"{image_id}.json")
            image = imgio.read_intensity(path)
            result = run_image(image, annotation, provider, config)
            persist_result(result, out)
            return image_id, result.report, None
        except BoxSegError as exc:
            return image_id, None, f"{type(exc).__name__}: {exc}"

    jobs = args.jobs if args.jobs and args.jobs > 0 else None
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        outcomes = list(pool.map(process, image_files))

    failures = 0
    for image_id, report, error in outcomes:
        if error is not None:
            failures += 1
            print(f"{image_id}: FAILED ({error})", file=sys.stderr)
            continue
        statuses = [b["status"] for b in report["boxes"]]
        print(
            f"{image_id}: {report['n_boxes']} boxes, "
            f"{statuses.count('refined')} refined, "
            f"{statuses.count('fallback')} fallback, "
            f"{statuses.count('filtered')} filtered"
        )
    if failures == len(outcomes):
        print("error: all images failed", file=sys.stderr)
        return 1
    return 0


def _load_eval_mask(path: Path):
    """Read an evaluation mask: 8-bit files use the 0/1/255 class codes,
    16-bit files are instance label maps (any nonzero id is foreground)."""
    import numpy as np

    raw = imgio.read_gray(path)
    if raw.dtype == np.uint16:
        return raw > 0
    return raw


def cmd_eval(args: argparse.Namespace) -> int:
    pred_dir = Path(args.pred)
    gt_dir = Path(args.gt)
    report_path = Path(args.report)
    write_manifest(
        report_path.with_name(report_path.stem + ".manifest.json"), "eval",
        {"pred": args.pred, "gt": args.gt, "report": args.report},
    )
    pred_files = {p.stem: p for p in sorted(pred_dir.glob("*.png"))}
    gt_files = {p.stem: p for p in sorted(gt_dir.glob("*.png"))}
    if not pred_files or set(pred_files) != set(gt_files):
        missing = sorted(set(gt_files) ^ set(pred_files))
        print(
            f"error: pred and gt file sets differ (symmetric difference: {missing})",
            file=sys.stderr,
        )
        return 1

    hasher = hashlib.sha256()
    per_image = {}
    scores = []
    try:
        for stem in sorted(pred_files):
            pred = _load_eval_mask(pred_files[stem])
            gt = _load_eval_mask(gt_files[stem])
            hasher.update(pred_files[stem].read_bytes())
            hasher.update(gt_files[stem].read_bytes())
            score = metrics.pixel_f1(pred, gt)
            per_image[stem] = score.as_dict()
            scores.append(score)
    except BoxSegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    micro = metrics.aggregate(scores)
    report = {
        "tool": "boxseg",
        "version": __version__,
        "pred": args.pred,
        "gt": args.gt,
        "inputs_sha256": hasher.hexdigest(),
        "images": per_image,
        "aggregate_micro": micro.as_dict(),
        "aggregate_macro_f1": metrics.macro_f1(scores),
    }
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")

    print(f"{'image':<20} {'precision':>10} {'recall':>10} {'f1':>10}")
    for stem in sorted(per_image):
        s = per_image[stem]
        print(f"{stem:<20} {s['precision']:>10.4f} {s['recall']:>10.4f} {s['f1']:>10.4f}")
    print(
        f"{'micro-average':<20} {micro.precision:>10.4f} "
        f"{micro.recall:>10.4f} {micro.f1:>10.4f}"
    )
    print(f"macro-average f1: {report['aggregate_macro_f1']:.4f}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    images_dir = Path(args.images)
    if not images_dir.is_dir():
        return _validation_error(f"--images {args.images} is not a directory")
    ann_dir = Path(args.annotations)
    write_manifest(ann_dir / ".manifest.json", "serve", {
        "images": args.images, "annotations": args.annotations,
        "host": args.host, "port": args.port,
    })
    ui_dir = args.ui_dir if args.ui_dir and Path(args.ui_dir).is_dir() else None
    app = create_app(images_dir, ann_dir, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    except (OSError, SystemExit) as exc:
        print(f"error: cannot serve on {args.host}:{args.port} ({exc})", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxseg",
        description="Tilted-box weak supervision: clicks to fine masks",
    )
    parser.add_argument("--version", action="version", version=f"boxseg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n", type=int, default=4, help="number of images")
    p.add_argument("--size", type=int, default=256, help="image side in pixels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--objects", type=int, default=3, help="objects per image")
    p.add_argument("--radius-min", type=float, default=None,
                   help="smallest object radius (default: size/14)")
    p.add_argument("--radius-max", type=float, default=None,
                   help="largest object radius (default: size/7)")
    p.add_argument("--jitter", action="store_true", help="jitter annotation clicks")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="generate fine ground truth from annotations")
    p.add_argument("--images", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--rough", help="directory of imported rough probability maps")
    src.add_argument("--baseline", action="store_true",
                     help="use the built-in intensity baseline")
    p.add_argument("--k", type=float, default=0.4, help="core rectangle scale")
    p.add_argument("--iou-threshold", type=float, default=0.5)
    p.add_argument("--gs-columns", type=int, default=120)
    p.add_argument("--gs-nodes", type=int, default=61)
    p.add_argument("--gs-delta", type=int, default=2)
    p.add_argument("--min-area", type=int, default=9,
                   help="drop rough components smaller than this")
    p.add_argument("--jobs", type=int, default=0, help="0 = logical CPU count")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="score prediction masks against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--report", required=True, help="output report JSON path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--images", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", default=None, help="static frontend directory to mount")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
