"""Pure Python/numpy kernels: the fallback backend.

Semantics must match wsmaseg.kernels._fast exactly; the compiled module is
only a faster drop-in. Shared conventions:

* masks are 2-D uint8 arrays, values {0, 1}, indexed [y, x];
* out-of-image pixels are background.
"""

from __future__ import annotations

import numpy as np

# 8-neighborhood in clockwise screen order starting West, as (dy, dx).
_CW8 = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))


def row_runs(row: np.ndarray) -> np.ndarray:
    """Maximal foreground runs of one row as an (K, 2) array of (x_left, x_right)."""
    padded = np.zeros(len(row) + 2, dtype=np.int8)
    padded[1:-1] = np.asarray(row) != 0
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1) - 1
    return np.stack([starts, ends], axis=1).astype(np.int64)


def outer_borders(mask: np.ndarray) -> list[np.ndarray]:
    """Trace the outer border of every 8-connected component (raster-scan order).

    Classical border following: scan for border starts, walk each border with
    the Moore neighborhood, relabel as you go so each border is traced once.
    Hole borders are traced (to keep the bookkeeping sound) but not returned.
    Returns one (N, 2) array of (y, x) border points per component.
    """
    h, w = mask.shape
    f = mask.astype(np.int32)
    nbd = 1
    out: list[np.ndarray] = []

    for y in range(h):
        fy = f[y]
        for x in range(w):
            v = fy[x]
            if v == 0:
                continue
            if v == 1 and (x == 0 or fy[x - 1] == 0):
                is_outer = True
                start_dir = 0  # background seed to the West
            elif v >= 1 and (x == w - 1 or fy[x + 1] == 0):
                is_outer = False
                start_dir = 4  # background seed to the East
            else:
                continue
            nbd += 1
            coords = _trace_border(f, h, w, y, x, start_dir, nbd)
            if is_outer:
                out.append(np.array(coords, dtype=np.int64))
    return out


def _trace_border(f, h, w, y0, x0, start_dir, nbd):
    coords = [(y0, x0)]
    dir1 = -1
    for k in range(8):
        d = (start_dir + k) % 8
        ny, nx = y0 + _CW8[d][0], x0 + _CW8[d][1]
        if 0 <= ny < h and 0 <= nx < w and f[ny, nx] != 0:
            dir1 = d
            break
    if dir1 < 0:
        f[y0, x0] = -nbd  # isolated pixel
        return coords

    y1, x1 = y0 + _CW8[dir1][0], x0 + _CW8[dir1][1]
    y2, x2 = y1, x1  # previously visited border pixel
    y3, x3 = y0, x0  # current border pixel

    while True:
        # Direction index of (y2, x2) as seen from (y3, x3).
        d2 = _CW8.index((y2 - y3, x2 - x3))
        east_zero = False
        y4 = x4 = -1
        for k in range(1, 9):
            d = (d2 - k) % 8
            ny, nx = y3 + _CW8[d][0], x3 + _CW8[d][1]
            if not (0 <= ny < h and 0 <= nx < w) or f[ny, nx] == 0:
                if d == 4:
                    east_zero = True
                continue
            y4, x4 = ny, nx
            break
        if east_zero:
            f[y3, x3] = -nbd
        elif f[y3, x3] == 1:
            f[y3, x3] = nbd
        if y4 == y0 and x4 == x0 and y3 == y1 and x3 == x1:
            return coords
        y2, x2 = y3, x3
        y3, x3 = y4, x4
        coords.append((y3, x3))
