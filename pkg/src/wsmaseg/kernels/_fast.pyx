# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled contour-tracing kernels. Semantics mirror pykernels exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

# 8-neighborhood in clockwise screen order starting West, as (dy, dx).
cdef int[8] _DY = [0, -1, -1, -1, 0, 1, 1, 1]
cdef int[8] _DX = [-1, -1, 0, 1, 1, 1, 0, -1]


def row_runs(row):
    """Maximal foreground runs of one row as an (K, 2) array of (x_left, x_right)."""
    cdef cnp.uint8_t[::1] r = np.ascontiguousarray(row, dtype=np.uint8)
    cdef Py_ssize_t w = r.shape[0]
    out_arr = np.empty((w // 2 + 1, 2), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t x = 0, k = 0, start
    while x < w:
        if r[x]:
            start = x
            while x + 1 < w and r[x + 1]:
                x += 1
            out[k, 0] = start
            out[k, 1] = x
            k += 1
        x += 1
    return out_arr[:k]


def outer_borders(mask):
    """Trace the outer border of every 8-connected component (raster-scan order)."""
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    f_arr = np.asarray(m, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] f = f_arr
    cdef int nbd = 1
    cdef Py_ssize_t x, y
    cdef int v, start_dir
    cdef bint is_outer
    out = []
    for y in range(h):
        for x in range(w):
            v = f[y, x]
            if v == 0:
                continue
            if v == 1 and (x == 0 or f[y, x - 1] == 0):
                is_outer = True
                start_dir = 0
            elif v >= 1 and (x == w - 1 or f[y, x + 1] == 0):
                is_outer = False
                start_dir = 4
            else:
                continue
            nbd += 1
            coords = _trace_border(f, h, w, y, x, start_dir, nbd)
            if is_outer:
                out.append(coords)
    return out


cdef _trace_border(cnp.int32_t[:, ::1] f, Py_ssize_t h, Py_ssize_t w,
                   Py_ssize_t y0, Py_ssize_t x0, int start_dir, int nbd):
    cdef Py_ssize_t cap = 64
    coords_arr = np.empty((cap, 2), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] coords = coords_arr
    cdef Py_ssize_t n = 0
    coords[0, 0] = y0
    coords[0, 1] = x0
    n = 1

    cdef int k, d, dir1 = -1
    cdef Py_ssize_t ny, nx
    for k in range(8):
        d = (start_dir + k) % 8
        ny = y0 + _DY[d]
        nx = x0 + _DX[d]
        if 0 <= ny < h and 0 <= nx < w and f[ny, nx] != 0:
            dir1 = d
            break
    if dir1 < 0:
        f[y0, x0] = -nbd
        return coords_arr[:1].copy()

    cdef Py_ssize_t y1 = y0 + _DY[dir1], x1 = x0 + _DX[dir1]
    cdef Py_ssize_t y2 = y1, x2 = x1
    cdef Py_ssize_t y3 = y0, x3 = x0
    cdef Py_ssize_t y4 = -1, x4 = -1
    cdef int d2
    cdef bint east_zero

    while True:
        d2 = -1
        for k in range(8):
            if y2 - y3 == _DY[k] and x2 - x3 == _DX[k]:
                d2 = k
                break
        east_zero = False
        y4 = -1
        for k in range(1, 9):
            d = (d2 - k + 8) % 8
            ny = y3 + _DY[d]
            nx = x3 + _DX[d]
            if not (0 <= ny < h and 0 <= nx < w) or f[ny, nx] == 0:
                if d == 4:
                    east_zero = True
                continue
            y4 = ny
            x4 = nx
            break
        if east_zero:
            f[y3, x3] = -nbd
        elif f[y3, x3] == 1:
            f[y3, x3] = nbd
        if y4 == y0 and x4 == x0 and y3 == y1 and x3 == x1:
            return coords_arr[:n].copy()
        y2 = y3
        x2 = x3
        y3 = y4
        x3 = x4
        if n == cap:
            cap *= 2
            new_arr = np.empty((cap, 2), dtype=np.int64)
            new_arr[:n] = coords_arr[:n]
            coords_arr = new_arr
            coords = coords_arr
        coords[n, 0] = y3
        coords[n, 1] = x3
        n += 1
