"""Bounding boxes to three-channel multimodal masks.

Channel 0 (interior): union of the filled inscribed ellipses.
Channel 1 (boundary): union of the per-ellipse inner rings.
Channel 2 (boundary on interior): inner boundary of the region covered by
two or more filled ellipses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .geometry import BBox, ellipse_coverage, ellipse_ring, inner_boundary, inscribed_ellipse, new_mask


@dataclass
class MultimodalMask:
    """Binary channel triple plus the ring width used to draw it."""

    interior: np.ndarray
    boundary: np.ndarray
    boundary_on_interior: np.ndarray
    ring_width: int

    @property
    def shape(self):
        return self.interior.shape


@dataclass
class MultimodalHeatmap:
    """Real-valued channel triple (values in [0, 1]), same layout as the mask."""

    interior: np.ndarray
    boundary: np.ndarray
    boundary_on_interior: np.ndarray

    @property
    def shape(self):
        return self.interior.shape

    def channels(self):
        return self.interior, self.boundary, self.boundary_on_interior


def make_multimodal(boxes: list[BBox], image_w: int, image_h: int,
                    ring_width: int = 2) -> MultimodalMask:
    """Rasterize one image's boxes into the three multimodal channels.

    Boxes partially outside the image are clamped first (raising
    EmptyAfterClamp when nothing remains), then the ellipse is inscribed in
    the clamped box.
    """
    if image_w <= 0 or image_h <= 0:
        raise DimensionMismatch(f"image size must be positive, got {image_w}x{image_h}")
    if ring_width < 1:
        raise ValueError(f"ring_width must be >= 1, got {ring_width}")

    interior = new_mask(image_w, image_h)
    boundary = new_mask(image_w, image_h)
    coverage = np.zeros((image_h, image_w), dtype=np.uint16)

    for box in boxes:
        e = inscribed_ellipse(box.clamp(image_w, image_h))
        cov = ellipse_coverage(e, image_w, image_h)
        np.logical_or(interior, cov, out=interior, casting="unsafe")
        coverage += cov
        ellipse_ring(e, ring_width, boundary)

    overlap = (coverage >= 2).astype(np.uint8)
    if overlap.any():
        boundary_on_interior = inner_boundary(overlap, ring_width)
    else:
        boundary_on_interior = new_mask(image_w, image_h)
    return MultimodalMask(interior, boundary, boundary_on_interior, ring_width)


def ideal_heatmaps(mask: MultimodalMask) -> MultimodalHeatmap:
    """Cast the binary channels to float grids with values exactly 0.0/1.0."""
    return MultimodalHeatmap(
        mask.interior.astype(np.float64),
        mask.boundary.astype(np.float64),
        mask.boundary_on_interior.astype(np.float64),
    )
