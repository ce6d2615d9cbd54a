"""File formats: COCO-style annotation JSON, heatmap images, detections, manifests.

All JSON writers emit keys in a fixed order with indent 2, so repeated runs
over identical inputs are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from .annotate import MultimodalHeatmap
from .errors import InputDataError
from .geometry import BBox

MANIFEST_KIND = "wsma-heatmaps"


def write_json(path: Path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n")


def read_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputDataError(f"cannot read JSON from {path}: {exc}") from exc


def bbox_from_json(raw, record_name: str) -> BBox:
    """Convert a real-valued COCO [x, y, w, h] to an integer pixel box."""
    try:
        x, y, w, h = (float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise InputDataError(f"{record_name}: bbox must be [x, y, w, h], got {raw!r}") from exc
    if w <= 0 or h <= 0:
        raise InputDataError(f"{record_name}: bbox has non-positive size {raw!r}")
    x0 = int(np.floor(x))
    y0 = int(np.floor(y))
    return BBox(x0, y0, int(np.ceil(x + w)) - x0, int(np.ceil(y + h)) - y0)


def load_coco_subset(path: Path) -> dict:
    """Parse the annotation subset: images (id/file_name/width/height) and
    annotations (image_id/bbox/category_id). Returns
    {image_id: {"file_name", "width", "height", "boxes": [(BBox, ann_id)]}}.
    """
    doc = read_json(path)
    if not isinstance(doc, dict) or "images" not in doc or "annotations" not in doc:
        raise InputDataError(f"{path}: expected an object with 'images' and 'annotations'")
    images = {}
    for img in doc["images"]:
        try:
            image_id = img["id"]
            images[image_id] = {
                "file_name": img["file_name"],
                "width": int(img["width"]),
                "height": int(img["height"]),
                "boxes": [],
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise InputDataError(f"image record {img!r}: {exc}") from exc
        if images[image_id]["width"] <= 0 or images[image_id]["height"] <= 0:
            raise InputDataError(f"image id={image_id}: non-positive dimensions")
    for n, ann in enumerate(doc["annotations"]):
        ann_id = ann.get("id", n)
        name = f"annotation id={ann_id}"
        try:
            image_id = ann["image_id"]
            raw_bbox = ann["bbox"]
        except (KeyError, TypeError) as exc:
            raise InputDataError(f"{name}: missing field {exc}") from exc
        if image_id not in images:
            raise InputDataError(f"{name}: unknown image_id {image_id!r}")
        box = bbox_from_json(raw_bbox, name)
        images[image_id]["boxes"].append((box, ann_id))
    return images


def write_coco_subset(path: Path, entries: list[dict]) -> None:
    """Write ground truth. entries: [{image_id, file_name, width, height, boxes}]."""
    images = []
    annotations = []
    ann_id = 1
    for e in entries:
        images.append({
            "id": e["image_id"],
            "file_name": e["file_name"],
            "width": e["width"],
            "height": e["height"],
        })
        for box in e["boxes"]:
            annotations.append({
                "id": ann_id,
                "image_id": e["image_id"],
                "bbox": [box.x, box.y, box.w, box.h],
                "category_id": 0,
            })
            ann_id += 1
    write_json(path, {"images": images, "annotations": annotations})


def heatmaps_to_image(hm: MultimodalHeatmap) -> Image.Image:
    """Encode the channel triple as an 8-bit RGB image (0 maps to 0, 1 to 255)."""
    stack = np.stack([np.rint(np.clip(ch, 0.0, 1.0) * 255.0) for ch in hm.channels()],
                     axis=2).astype(np.uint8)
    return Image.fromarray(stack, mode="RGB")


CHANNEL_SUFFIXES = ("int", "bnd", "boi")


def save_heatmaps(path: Path, hm: MultimodalHeatmap) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    heatmaps_to_image(hm).save(path)


def load_heatmaps(path: Path) -> MultimodalHeatmap:
    """Read a 3-channel heatmap image back to float grids in [0, 1]."""
    try:
        with Image.open(path) as img:
            arr = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    except OSError as exc:
        raise InputDataError(f"cannot read heatmap image {path}: {exc}") from exc
    return MultimodalHeatmap(arr[:, :, 0], arr[:, :, 1], arr[:, :, 2])


def split_channel_paths(base: Path) -> list[Path]:
    """a/b/scene.png -> a/b/scene.int.png, scene.bnd.png, scene.boi.png."""
    base = Path(base)
    return [base.parent / f"{base.stem}.{sfx}{base.suffix}"
            for sfx in CHANNEL_SUFFIXES]


def save_heatmaps_split(base: Path, hm: MultimodalHeatmap) -> list[Path]:
    """Write the triple as three single-channel 8-bit images."""
    paths = split_channel_paths(base)
    for path, ch in zip(paths, hm.channels()):
        path.parent.mkdir(parents=True, exist_ok=True)
        gray = np.rint(np.clip(ch, 0.0, 1.0) * 255.0).astype(np.uint8)
        Image.fromarray(gray, mode="L").save(path)
    return paths


def load_heatmaps_split(base: Path) -> MultimodalHeatmap:
    grids = []
    for path in split_channel_paths(base):
        try:
            with Image.open(path) as img:
                grids.append(np.asarray(img.convert("L"), dtype=np.float64) / 255.0)
        except OSError as exc:
            raise InputDataError(f"cannot read heatmap channel {path}: {exc}") from exc
    return MultimodalHeatmap(*grids)


def load_manifest_entry(base_dir: Path, entry: dict) -> MultimodalHeatmap:
    path = Path(base_dir) / entry["file"]
    if entry.get("split"):
        return load_heatmaps_split(path)
    return load_heatmaps(path)


def save_binary_mask(path: Path, mask: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray((mask.astype(np.uint8) * 255), mode="L").save(path)


def load_binary_mask(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            arr = np.asarray(img.convert("L"))
    except OSError as exc:
        raise InputDataError(f"cannot read mask image {path}: {exc}") from exc
    return (arr >= 128).astype(np.uint8)


def write_manifest(path: Path, entries: list[dict], ring_width: int,
                   extra: dict | None = None) -> None:
    """Record the heatmap files produced for a dataset."""
    doc = {"kind": MANIFEST_KIND, "ring_width": ring_width}
    if extra:
        doc.update(extra)
    out_entries = []
    for e in entries:
        rec = {
            "image_id": e["image_id"],
            "file": e["file"],
            "width": e["width"],
            "height": e["height"],
        }
        if e.get("split"):
            rec["split"] = True
        out_entries.append(rec)
    doc["entries"] = out_entries
    write_json(path, doc)


def read_manifest(path: Path) -> dict:
    doc = read_json(path)
    if not isinstance(doc, dict) or doc.get("kind") != MANIFEST_KIND:
        raise InputDataError(f"{path}: not a {MANIFEST_KIND} manifest")
    return doc


def write_detections(path: Path, dets: list[dict]) -> None:
    """dets: [{image_id, bbox: [x, y, w, h], score, category_id}], sorted by score."""
    ordered = sorted(
        dets, key=lambda d: (-d["score"], str(d["image_id"]), d["bbox"]))
    write_json(path, [
        {
            "image_id": d["image_id"],
            "bbox": d["bbox"],
            "score": d["score"],
            "category_id": d.get("category_id", 0),
        }
        for d in ordered
    ])


def read_detections(path: Path) -> list[dict]:
    doc = read_json(path)
    if not isinstance(doc, list):
        raise InputDataError(f"{path}: detections file must hold a JSON list")
    for i, d in enumerate(doc):
        if not {"image_id", "bbox", "score"} <= set(d):
            raise InputDataError(f"{path}: detection #{i} missing required fields")
    return doc
