"""Rasterization primitives: boxes, inscribed ellipses, rings, inner boundaries.

Masks are 2-D numpy uint8 arrays with values in {0, 1}, indexed [y, x]
(row-major). Pixel (x, y) is considered covered by a shape when its center
(x + 0.5, y + 0.5) satisfies the shape's membership test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import binary_erosion

from .errors import EmptyAfterClamp


@dataclass(frozen=True)
class BBox:
    """Axis-aligned pixel box: top-left corner (x, y), size w x h (w, h >= 1)."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box sides must be >= 1, got w={self.w}, h={self.h}")

    @property
    def area(self) -> int:
        return self.w * self.h

    def clamp(self, image_w: int, image_h: int) -> "BBox":
        """Clip the box to the image. Raises EmptyAfterClamp on zero overlap."""
        x0 = max(self.x, 0)
        y0 = max(self.y, 0)
        x1 = min(self.x + self.w, image_w)
        y1 = min(self.y + self.h, image_h)
        if x1 <= x0 or y1 <= y0:
            raise EmptyAfterClamp(
                f"box ({self.x},{self.y},{self.w},{self.h}) lies outside "
                f"a {image_w}x{image_h} image"
            )
        return BBox(x0, y0, x1 - x0, y1 - y0)


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse: center (cx, cy), semi-axes a (along x), b (along y)."""

    cx: float
    cy: float
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"semi-axes must be positive, got a={self.a}, b={self.b}")


def new_mask(width: int, height: int) -> np.ndarray:
    """Allocate an all-zero uint8 mask of the given size."""
    return np.zeros((height, width), dtype=np.uint8)


def inscribed_ellipse(box: BBox) -> Ellipse:
    """Ellipse inscribed in a box: center at the box center, semi-axes w/2, h/2."""
    return Ellipse(box.x + box.w / 2.0, box.y + box.h / 2.0, box.w / 2.0, box.h / 2.0)


def _ellipse_window(e: Ellipse, width: int, height: int):
    """Index window [y0:y1, x0:x1] that can contain covered pixels, or None."""
    x0 = max(int(np.floor(e.cx - e.a - 0.5)), 0)
    x1 = min(int(np.ceil(e.cx + e.a + 0.5)) + 1, width)
    y0 = max(int(np.floor(e.cy - e.b - 0.5)), 0)
    y1 = min(int(np.ceil(e.cy + e.b + 0.5)) + 1, height)
    if x0 >= x1 or y0 >= y1:
        return None
    return x0, x1, y0, y1


def ellipse_coverage(e: Ellipse, width: int, height: int) -> np.ndarray:
    """Boolean coverage of an ellipse on a width x height canvas.

    A pixel is covered iff ((x+0.5-cx)/a)^2 + ((y+0.5-cy)/b)^2 <= 1.
    Off-canvas portions are clipped.
    """
    cov = np.zeros((height, width), dtype=bool)
    win = _ellipse_window(e, width, height)
    if win is None:
        return cov
    x0, x1, y0, y1 = win
    xs = (np.arange(x0, x1) + 0.5 - e.cx) / e.a
    ys = (np.arange(y0, y1) + 0.5 - e.cy) / e.b
    cov[y0:y1, x0:x1] = xs[None, :] ** 2 + ys[:, None] ** 2 <= 1.0
    return cov


def fill_ellipse(e: Ellipse, canvas: np.ndarray) -> np.ndarray:
    """Set every pixel whose center lies on or inside the ellipse (union semantics).

    Mutates and returns `canvas`; previously set pixels stay set.
    """
    height, width = canvas.shape
    win = _ellipse_window(e, width, height)
    if win is None:
        return canvas
    x0, x1, y0, y1 = win
    xs = (np.arange(x0, x1) + 0.5 - e.cx) / e.a
    ys = (np.arange(y0, y1) + 0.5 - e.cy) / e.b
    inside = xs[None, :] ** 2 + ys[:, None] ** 2 <= 1.0
    np.logical_or(canvas[y0:y1, x0:x1], inside, out=canvas[y0:y1, x0:x1],
                  casting="unsafe")
    return canvas


def ellipse_ring(e: Ellipse, ring_width: int, canvas: np.ndarray) -> np.ndarray:
    """Set the pixels of the ellipse's inner ring of the given width.

    The ring is the filled ellipse minus the filled ellipse shrunk by
    `ring_width` on each semi-axis. If either shrunk axis collapses to zero
    the ring is the whole filled ellipse. Union semantics, like fill_ellipse.
    """
    if ring_width < 1:
        raise ValueError(f"ring_width must be >= 1, got {ring_width}")
    height, width = canvas.shape
    outer = ellipse_coverage(e, width, height)
    a_in = e.a - ring_width
    b_in = e.b - ring_width
    if a_in > 0 and b_in > 0:
        inner = ellipse_coverage(Ellipse(e.cx, e.cy, a_in, b_in), width, height)
        ring = outer & ~inner
    else:
        ring = outer
    np.logical_or(canvas, ring, out=canvas, casting="unsafe")
    return canvas


def inner_boundary(region: np.ndarray, ring_width: int) -> np.ndarray:
    """Pixels of `region` within chessboard distance `ring_width` of its complement.

    Out-of-image pixels count as complement. Realized as region minus
    `ring_width` erosions with the 3x3 structuring element.
    """
    if ring_width < 1:
        raise ValueError(f"ring_width must be >= 1, got {ring_width}")
    reg = region.astype(bool)
    eroded = binary_erosion(
        reg, structure=np.ones((3, 3), dtype=bool), iterations=ring_width,
        border_value=0,
    )
    return (reg & ~eroded).astype(np.uint8)
