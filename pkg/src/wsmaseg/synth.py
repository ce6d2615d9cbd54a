"""Synthetic scenes: ground-truth boxes plus ideal or corrupted heatmaps.

Stands in for a trained segmentation model so the whole testing path
(merge, contour, boxes, eval) can be exercised end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annotate import MultimodalHeatmap, ideal_heatmaps, make_multimodal
from .errors import PlacementFailure
from .geometry import BBox
from .metrics import box_iou

PLACEMENT_ATTEMPTS = 1000


@dataclass
class SceneSpec:
    """Parameters of one generated scene."""

    image_w: int = 512
    image_h: int = 512
    n_objects: int = 10
    size_range: tuple[int, int] = (16, 64)
    max_pair_iou: float = 0.0
    noise_sigma: float = 0.0
    flip_prob: float = 0.0
    seed: int = 0
    ring_width: int = 2
    # Disjoint scenes (max_pair_iou == 0) additionally keep boxes at least
    # this many pixels apart, so inscribed ellipses cannot touch diagonally.
    min_gap: int = 1

    def __post_init__(self):
        lo, hi = self.size_range
        if not 1 <= lo <= hi <= min(self.image_w, self.image_h):
            raise ValueError(f"size_range {self.size_range} incompatible with "
                             f"{self.image_w}x{self.image_h} image")
        if not 0.0 <= self.max_pair_iou < 1.0:
            raise ValueError(f"max_pair_iou must be in [0, 1), got {self.max_pair_iou}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0.0 <= self.flip_prob < 1.0:
            raise ValueError(f"flip_prob must be in [0, 1), got {self.flip_prob}")
        if self.n_objects < 0:
            raise ValueError(f"n_objects must be >= 0, got {self.n_objects}")
        if self.ring_width < 1:
            raise ValueError(f"ring_width must be >= 1, got {self.ring_width}")


def _boxes_compatible(a: BBox, b: BBox, max_iou: float, min_gap: int) -> bool:
    if box_iou((a.x, a.y, a.w, a.h), (b.x, b.y, b.w, b.h)) > max_iou:
        return False
    if max_iou == 0.0 and min_gap > 0:
        gap_x = max(a.x - (b.x + b.w), b.x - (a.x + a.w))
        gap_y = max(a.y - (b.y + b.h), b.y - (a.y + a.h))
        if max(gap_x, gap_y) < min_gap:
            return False
    return True


def place_boxes(spec: SceneSpec, rng: np.random.Generator) -> list[BBox]:
    """Rejection-sample n_objects boxes respecting the pairwise IoU budget."""
    lo, hi = spec.size_range
    boxes: list[BBox] = []
    for _ in range(spec.n_objects):
        for attempt in range(PLACEMENT_ATTEMPTS):
            w = int(rng.integers(lo, hi + 1))
            h = int(rng.integers(lo, hi + 1))
            x = int(rng.integers(0, spec.image_w - w + 1))
            y = int(rng.integers(0, spec.image_h - h + 1))
            cand = BBox(x, y, w, h)
            if all(_boxes_compatible(cand, b, spec.max_pair_iou, spec.min_gap)
                   for b in boxes):
                boxes.append(cand)
                break
        else:
            raise PlacementFailure(
                f"could not place object {len(boxes)} after "
                f"{PLACEMENT_ATTEMPTS} attempts (spec {spec})"
            )
    return boxes


def _corrupt(grid: np.ndarray, ideal_binary: np.ndarray, sigma: float,
             flip_prob: float, rng: np.random.Generator) -> np.ndarray:
    out = grid
    if sigma > 0:
        out = np.clip(out + rng.normal(0.0, sigma, size=out.shape), 0.0, 1.0)
    if flip_prob > 0:
        # A flipped pixel gets the hard opposite of its ideal value, so its
        # binarized fate flips for any threshold in (0, 1).
        flips = rng.random(size=out.shape) < flip_prob
        out = np.where(flips, 1.0 - ideal_binary, out)
    return out


def generate_scene(spec: SceneSpec) -> tuple[list[BBox], MultimodalHeatmap]:
    """Generate one scene: boxes plus (possibly corrupted) heatmaps.

    Deterministic for a fixed spec (a single seeded generator drives
    placement first, then per-channel noise, then per-channel flips).
    """
    rng = np.random.default_rng(spec.seed)
    boxes = place_boxes(spec, rng)
    if boxes:
        mask = make_multimodal(boxes, spec.image_w, spec.image_h, spec.ring_width)
        hm = ideal_heatmaps(mask)
    else:
        zero = np.zeros((spec.image_h, spec.image_w))
        hm = MultimodalHeatmap(zero, zero.copy(), zero.copy())
    if spec.noise_sigma > 0 or spec.flip_prob > 0:
        hm = MultimodalHeatmap(*[
            _corrupt(ch, ch, spec.noise_sigma, spec.flip_prob, rng)
            for ch in hm.channels()
        ])
    return boxes, hm


def generate_pair_scene(image_w: int, image_h: int, size_range: tuple[int, int],
                        iou_range: tuple[float, float], ring_width: int,
                        seed: int) -> tuple[list[BBox], MultimodalHeatmap]:
    """Scene with exactly two boxes whose pair IoU falls in iou_range.

    Used to exercise the occlusion band: the first box is placed freely, the
    second is rejection-sampled until the pair IoU lands inside the band.
    """
    rng = np.random.default_rng(seed)
    lo, hi = size_range
    io_lo, io_hi = iou_range
    for _ in range(PLACEMENT_ATTEMPTS):
        w0 = int(rng.integers(lo, hi + 1))
        h0 = int(rng.integers(lo, hi + 1))
        x0 = int(rng.integers(0, image_w - w0 + 1))
        y0 = int(rng.integers(0, image_h - h0 + 1))
        first = BBox(x0, y0, w0, h0)
        for _ in range(PLACEMENT_ATTEMPTS):
            w1 = int(rng.integers(lo, hi + 1))
            h1 = int(rng.integers(lo, hi + 1))
            x1 = int(rng.integers(max(0, x0 - w1), min(image_w - w1, x0 + w0) + 1))
            y1 = int(rng.integers(max(0, y0 - h1), min(image_h - h1, y0 + h0) + 1))
            second = BBox(x1, y1, w1, h1)
            iou = box_iou((x0, y0, w0, h0), (x1, y1, w1, h1))
            if io_lo <= iou <= io_hi:
                boxes = [first, second]
                mask = make_multimodal(boxes, image_w, image_h, ring_width)
                return boxes, ideal_heatmaps(mask)
    raise PlacementFailure(
        f"no box pair with IoU in {iou_range} after {PLACEMENT_ATTEMPTS} outer attempts"
    )
