"""Contour sets to scored detections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import ContourSet
from .errors import DimensionMismatch
from .geometry import BBox


@dataclass(frozen=True)
class Detection:
    """Axis-aligned box with a pseudo-confidence score and a class id."""

    box: BBox
    score: float
    class_id: int = 0


def boxes_from_contours(sets: list[ContourSet], interior: np.ndarray,
                        min_pixels: int = 4) -> list[Detection]:
    """Circumscribe each contour set with a box and score it.

    Sets with fewer than `min_pixels` pixels are dropped. The score is the
    mean of the interior heatmap over the set's pixels, clamped to [0, 1];
    output is sorted by descending score (ties broken by set id).
    """
    scored = []
    for cs in sets:
        count = cs.pixel_count()
        if count < min_pixels:
            continue
        x, y, w, h = cs.bounds()
        if y + h > interior.shape[0] or x + w > interior.shape[1]:
            raise DimensionMismatch(
                f"contour set {cs.id} exceeds the {interior.shape} interior grid"
            )
        total = 0.0
        for r in cs.runs:
            total += float(interior[r.row, r.x_left:r.x_right + 1].sum())
        score = min(max(total / count, 0.0), 1.0)
        scored.append((score, cs.id, BBox(x, y, w, h)))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [Detection(box, score) for score, _, box in scored]
