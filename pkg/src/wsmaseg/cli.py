"""Command-line surface: annotate, detect, eval, synth, bench.

Every command is deterministic given (inputs, config, seed). Exit codes:
0 success, 2 input error, 3 internal invariant violation. Set WSMA_LOG to
DEBUG/INFO/WARNING/ERROR to control verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import dataio, kernels
from .annotate import MultimodalHeatmap, ideal_heatmaps, make_multimodal
from .boxes import boxes_from_contours
from .config import RunConfig
from .contour import RunFollower, border_follow_baseline, rdb_follow
from .errors import EmptyAfterClamp, InputDataError, PlacementFailure, WsmaError
from .merge import merge_instance_map
from .metrics import compute_metrics
from .synth import SceneSpec, generate_scene

log = logging.getLogger("wsmaseg")


def detect_heatmaps(hm: MultimodalHeatmap, cfg: RunConfig):
    """Full testing path for one image: merge, trace, box."""
    merged = merge_instance_map(hm, cfg.threshold, cfg.merge_mode)
    sets = rdb_follow(merged, cfg.contour_mode)
    return boxes_from_contours(sets, hm.interior, cfg.min_pixels)


def _map_jobs(fn, items, jobs):
    if jobs == 0:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _annotate_one(item):
    image_id, boxes, width, height, ring_width, out_path, split = item
    clamped = []
    for box, ann_id in boxes:
        try:
            clamped.append(box.clamp(width, height))
        except EmptyAfterClamp:
            raise InputDataError(
                f"annotation id={ann_id}: box clamps to zero area on image {image_id}"
            ) from None
    mask = make_multimodal(clamped, width, height, ring_width)
    hm = ideal_heatmaps(mask)
    if split:
        dataio.save_heatmaps_split(out_path, hm)
    else:
        dataio.save_heatmaps(out_path, hm)
    return {"image_id": image_id, "file": Path(out_path).name,
            "width": width, "height": height, "split": split}


def _resolve(flag_value, cfg_value, name: str) -> str:
    value = flag_value if flag_value is not None else cfg_value
    if value is None:
        raise InputDataError(f"{name} required (flag or config file)")
    return value


def cmd_annotate(cfg: RunConfig, args) -> int:
    dataset = dataio.load_coco_subset(
        Path(_resolve(args.annotations, cfg.input, "--annotations")))
    out_dir = Path(_resolve(args.output, cfg.output, "--output"))
    out_dir.mkdir(parents=True, exist_ok=True)
    items = []
    for image_id in sorted(dataset, key=str):
        rec = dataset[image_id]
        stem = Path(rec["file_name"]).stem
        items.append((image_id, rec["boxes"], rec["width"], rec["height"],
                      cfg.ring_width, str(out_dir / f"{stem}.png"),
                      args.split_channels))
    entries = _map_jobs(_annotate_one, items, cfg.jobs)
    extra = {"model": cfg.model} if cfg.model else None
    dataio.write_manifest(out_dir / "manifest.json", entries, cfg.ring_width, extra)
    log.info("annotated %d images into %s", len(entries), out_dir)
    return 0


def _detect_one(item):
    base_dir, entry, cfg = item
    hm = dataio.load_manifest_entry(base_dir, entry)
    dets = detect_heatmaps(hm, cfg)
    return [
        {"image_id": entry["image_id"],
         "bbox": [d.box.x, d.box.y, d.box.w, d.box.h],
         "score": d.score,
         "category_id": d.class_id}
        for d in dets
    ]


def cmd_detect(cfg: RunConfig, args) -> int:
    manifest_path = Path(_resolve(args.heatmaps, cfg.input, "--heatmaps"))
    manifest = dataio.read_manifest(manifest_path)
    items = [(str(manifest_path.parent), e, cfg) for e in manifest["entries"]]
    per_image = _map_jobs(_detect_one, items, cfg.jobs)
    dets = [d for image_dets in per_image for d in image_dets]
    dataio.write_detections(Path(_resolve(args.output, cfg.output, "--output")),
                            dets)
    log.info("wrote %d detections for %d images", len(dets), len(items))
    return 0


def cmd_eval(cfg: RunConfig, args) -> int:
    gt = dataio.load_coco_subset(Path(args.ground_truth))
    dets = dataio.read_detections(Path(args.detections))
    unknown = {d["image_id"] for d in dets} - set(gt)
    if unknown:
        raise InputDataError(
            f"detections reference image ids missing from ground truth: "
            f"{sorted(unknown, key=str)[:5]}"
        )
    gts_by_image = {
        image_id: [(b.x, b.y, b.w, b.h) for b, _aid in rec["boxes"]]
        for image_id, rec in gt.items()
    }
    dets_by_image = {image_id: [] for image_id in gt}
    for d in dets:
        dets_by_image[d["image_id"]].append((tuple(d["bbox"]), float(d["score"])))
    report = compute_metrics(dets_by_image, gts_by_image)
    doc = report.to_dict()
    if cfg.model:
        doc["model"] = cfg.model
    out = Path(_resolve(args.output, cfg.output, "--output"))
    dataio.write_json(out.with_suffix(".json"), doc)
    out.with_suffix(".txt").write_text(report.format_table())
    sys.stdout.write(report.format_table())
    return 0


def _synth_one(item):
    spec, out_path = item
    boxes, hm = generate_scene(spec)
    dataio.save_heatmaps(out_path, hm)
    return boxes


def cmd_synth(cfg: RunConfig, args) -> int:
    out_dir = Path(_resolve(args.output, cfg.output, "--output"))
    out_dir.mkdir(parents=True, exist_ok=True)
    width, height = _parse_pair(args.image_size, int, "image-size")
    lo, hi = _parse_pair(args.size_range, int, "size-range")
    try:
        specs = [
            SceneSpec(image_w=width, image_h=height, n_objects=args.objects,
                      size_range=(lo, hi), max_pair_iou=args.max_pair_iou,
                      noise_sigma=args.noise_sigma, flip_prob=args.flip_prob,
                      seed=cfg.seed + i, ring_width=cfg.ring_width)
            for i in range(args.scenes)
        ]
    except ValueError as exc:
        raise InputDataError(str(exc)) from exc
    items = [(spec, str(out_dir / f"scene_{i:04d}.png"))
             for i, spec in enumerate(specs)]
    boxes_per_scene = _map_jobs(_synth_one, items, cfg.jobs)
    gt_entries = []
    manifest_entries = []
    for i, boxes in enumerate(boxes_per_scene):
        gt_entries.append({"image_id": i, "file_name": f"scene_{i:04d}.png",
                           "width": width, "height": height, "boxes": boxes})
        manifest_entries.append({"image_id": i, "file": f"scene_{i:04d}.png",
                                 "width": width, "height": height})
    dataio.write_coco_subset(out_dir / "ground_truth.json", gt_entries)
    extra = {"model": cfg.model} if cfg.model else None
    dataio.write_manifest(out_dir / "manifest.json", manifest_entries,
                          cfg.ring_width, extra)
    log.info("generated %d scenes into %s", len(specs), out_dir)
    return 0


def rebar_scale_mask(seed: int = 0, width: int = 2666, height: int = 2000,
                     blobs: int = 150) -> np.ndarray:
    """Benchmark mask shaped like the dense-small-object regime: many blobs
    on a large canvas."""
    spec = SceneSpec(image_w=width, image_h=height, n_objects=blobs,
                     size_range=(40, 120), seed=seed)
    _, hm = generate_scene(spec)
    return (hm.interior >= 0.5).astype(np.uint8)


def _bench_backend(mask: np.ndarray, backend: str) -> dict:
    kern = kernels.get_backend(backend)
    # Route module-level kernel calls through the chosen backend for the
    # duration of the measurement.
    saved = (kernels.row_runs, kernels.outer_borders)
    kernels.row_runs, kernels.outer_borders = kern.row_runs, kern.outer_borders
    try:
        follower = RunFollower("robust")
        t0 = time.perf_counter()
        for y in range(mask.shape[0]):
            follower.push_row(y, mask[y])
        rdb_sets = follower.finish()
        rdb_time = time.perf_counter() - t0

        t0 = time.perf_counter()
        baseline_sets = border_follow_baseline(mask)
        baseline_time = time.perf_counter() - t0
    finally:
        kernels.row_runs, kernels.outer_borders = saved
    max_runs_per_row = max(
        (len(kern.row_runs(mask[y])) for y in range(mask.shape[0])), default=0)
    return {
        "rdb_seconds": rdb_time,
        "rdb_components": len(rdb_sets),
        "rdb_peak_row_records": follower.peak_row_records,
        "max_runs_per_row": int(max_runs_per_row),
        "baseline_seconds": baseline_time,
        "baseline_components": len(baseline_sets),
        "baseline_over_rdb_time_ratio": (
            baseline_time / rdb_time if rdb_time > 0 else None),
    }


def cmd_bench(cfg: RunConfig, args) -> int:
    mask_path = args.mask if args.mask is not None else cfg.input
    if mask_path:
        mask = dataio.load_binary_mask(Path(mask_path))
    else:
        mask = rebar_scale_mask(seed=cfg.seed)
    backends = (kernels.available_backends() if args.backend == "both"
                else (args.backend,))
    report = {
        "mask_shape": list(mask.shape),
        "foreground_pixels": int(mask.sum()),
        "backends": {},
    }
    for backend in backends:
        try:
            report["backends"][backend] = _bench_backend(mask, backend)
        except ValueError as exc:
            raise InputDataError(str(exc)) from exc
    if cfg.model:
        report["model"] = cfg.model
    if args.output:
        dataio.write_json(Path(args.output), report)
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def _parse_pair(raw: str, cast, name: str):
    try:
        a, b = raw.split("x") if "x" in raw else raw.split(",")
        return cast(a), cast(b)
    except ValueError as exc:
        raise InputDataError(f"--{name} expects two values, got {raw!r}") from exc


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--ring-width", type=int, dest="ring_width")
    p.add_argument("--threshold", type=float)
    p.add_argument("--merge-mode", choices=("literal", "robust"), dest="merge_mode")
    p.add_argument("--contour-mode", choices=("literal", "robust"), dest="contour_mode")
    p.add_argument("--min-pixels", type=int, dest="min_pixels")
    p.add_argument("--iou", type=float, dest="iou_thresh")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsmaseg",
        description="Box-to-mask annotation, heatmap merging, contour tracing, "
                    "detection and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="convert box annotations to multimodal masks")
    p.add_argument("--annotations", help="COCO-style JSON (config: input)")
    p.add_argument("--output", help="output directory (config: output)")
    p.add_argument("--split-channels", action="store_true", dest="split_channels",
                   help="write .int/.bnd/.boi single-channel images instead of "
                        "one 3-channel image")
    _add_common_flags(p)

    p = sub.add_parser("detect", help="heatmaps to detections")
    p.add_argument("--heatmaps", help="heatmap manifest JSON (config: input)")
    p.add_argument("--output", help="detections JSON path (config: output)")
    _add_common_flags(p)

    p = sub.add_parser("eval", help="score detections against ground truth")
    p.add_argument("--detections", required=True)
    p.add_argument("--ground-truth", required=True, dest="ground_truth")
    p.add_argument("--output", help="report path prefix (config: output)")
    _add_common_flags(p)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--output", help="output directory (config: output)")
    p.add_argument("--scenes", type=int, default=10)
    p.add_argument("--objects", type=int, default=10)
    p.add_argument("--image-size", default="512x512")
    p.add_argument("--size-range", default="16,64")
    p.add_argument("--max-pair-iou", type=float, default=0.0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--flip-prob", type=float, default=0.0)
    _add_common_flags(p)

    p = sub.add_parser("bench", help="time rdb tracing against the classical baseline")
    p.add_argument("--mask", help="binary mask image; omitted: synthetic large scene")
    p.add_argument("--backend", choices=("auto", "py", "c", "both"), default="both")
    p.add_argument("--output", help="write the JSON report here as well")
    _add_common_flags(p)

    return parser


_COMMANDS = {
    "annotate": cmd_annotate,
    "detect": cmd_detect,
    "eval": cmd_eval,
    "synth": cmd_synth,
    "bench": cmd_bench,
}


def config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {
        name: getattr(args, name)
        for name in ("ring_width", "threshold", "merge_mode", "contour_mode",
                     "min_pixels", "iou_thresh", "seed", "jobs")
        if getattr(args, name, None) is not None
    }
    return replace(cfg, **overrides).validate()


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("WSMA_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return _COMMANDS[args.command](cfg, args)
    except (InputDataError, PlacementFailure, EmptyAfterClamp) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WsmaError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
