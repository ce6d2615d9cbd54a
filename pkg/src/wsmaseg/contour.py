"""Run-data-based contour following and the classical baseline.

``rdb_follow`` groups horizontal foreground runs into contour sets in one
top-to-bottom pass, keeping only the previous row's run records (two-row
working state). Two matching modes:

* ``literal``: a run joins the set of the first previous-row run whose left
  and right x-coordinates each differ by at most 1; otherwise it opens a new
  set. No sets are ever merged.
* ``robust``: a run connects to every previous-row run whose column interval
  overlaps or touches it diagonally; connecting runs from different sets
  merges those sets (union-find). This is 8-connected run-length component
  labeling.

``border_follow_baseline`` is the classical raster-scan border-following
peer used for benchmarking and cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .errors import RowOutOfRange

CONTOUR_MODES = ("literal", "robust")


@dataclass(frozen=True)
class Run:
    """Maximal horizontal foreground segment: row y, columns x_left..x_right."""

    row: int
    x_left: int
    x_right: int

    @property
    def length(self) -> int:
        return self.x_right - self.x_left + 1


@dataclass
class ContourSet:
    """Runs attributed to one traced object, ordered by row then x_left."""

    id: int
    runs: list[Run]

    def pixel_count(self) -> int:
        return sum(r.length for r in self.runs)

    def bounds(self) -> tuple[int, int, int, int]:
        """Extents as (x, y, w, h)."""
        x0 = min(r.x_left for r in self.runs)
        x1 = max(r.x_right for r in self.runs)
        y0 = self.runs[0].row
        y1 = self.runs[-1].row
        return x0, y0, x1 - x0 + 1, y1 - y0 + 1

    def pixels(self) -> set[tuple[int, int]]:
        """All (y, x) pixels covered by the set's runs."""
        return {(r.row, x) for r in self.runs for x in range(r.x_left, r.x_right + 1)}


def scan_runs(mask: np.ndarray, row: int) -> list[Run]:
    """Maximal foreground runs of one mask row, left to right."""
    if not 0 <= row < mask.shape[0]:
        raise RowOutOfRange(f"row {row} outside mask of height {mask.shape[0]}")
    return [Run(row, int(a), int(b)) for a, b in kernels.row_runs(mask[row])]


class RunFollower:
    """Streaming contour follower: feed rows once, top to bottom.

    Working state is the previous row's run records plus the row being
    matched; ``peak_row_records`` reports the largest such working set seen,
    which is bounded by twice the maximum number of runs in any row.
    """

    def __init__(self, mode: str = "robust"):
        if mode not in CONTOUR_MODES:
            raise ValueError(f"mode must be one of {CONTOUR_MODES}, got {mode!r}")
        self.mode = mode
        self.peak_row_records = 0
        self._prev: list[tuple[int, int, int]] = []  # (x_left, x_right, set_id)
        self._next_id = 0
        self._parent: list[int] = []  # union-find over provisional set ids
        self._members: list[list[Run]] = []  # runs per provisional id

    def _find(self, i: int) -> int:
        parent = self._parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def _union(self, a: int, b: int) -> int:
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return ra
        # Keep the smaller provisional id as root so first appearance wins.
        if rb < ra:
            ra, rb = rb, ra
        self._parent[rb] = ra
        return ra

    def _new_set(self, run: Run) -> int:
        sid = self._next_id
        self._next_id += 1
        self._parent.append(sid)
        self._members.append([run])
        return sid

    def push_row(self, row_index: int, row: np.ndarray) -> None:
        """Consume the next mask row (1-D uint8 array)."""
        runs = kernels.row_runs(row)
        prev = self._prev
        cur: list[tuple[int, int, int]] = []
        pi = 0  # robust mode: prev runs left of the current run are done
        for xl, xr in runs:
            xl, xr = int(xl), int(xr)
            run = Run(row_index, xl, xr)
            sid = -1
            if self.mode == "literal":
                for pl, pr, psid in prev:
                    if abs(pl - xl) <= 1 and abs(pr - xr) <= 1:
                        sid = psid
                        break
                if sid >= 0:
                    self._members[sid].append(run)
                else:
                    sid = self._new_set(run)
            else:
                while pi < len(prev) and prev[pi][1] < xl - 1:
                    pi += 1
                j = pi
                while j < len(prev) and prev[j][0] <= xr + 1:
                    sid = prev[j][2] if sid < 0 else self._union(sid, prev[j][2])
                    j += 1
                if sid >= 0:
                    sid = self._find(sid)
                    self._members[sid].append(run)
                else:
                    sid = self._new_set(run)
            cur.append((xl, xr, sid))
        self.peak_row_records = max(self.peak_row_records, len(prev) + len(cur))
        self._prev = cur

    def finish(self) -> list[ContourSet]:
        """Close the stream and return the contour sets, ids in first-run order."""
        grouped: dict[int, list[Run]] = {}
        for sid in range(self._next_id):
            root = self._find(sid)
            grouped.setdefault(root, []).extend(self._members[sid])
        sets = []
        for root in sorted(grouped):
            runs = sorted(grouped[root], key=lambda r: (r.row, r.x_left))
            sets.append(ContourSet(len(sets), runs))
        return sets


def rdb_follow_rows(rows: Iterable[np.ndarray], mode: str = "robust") -> list[ContourSet]:
    """Run the follower over a row iterator (rows consumed once, in order)."""
    follower = RunFollower(mode)
    for y, row in enumerate(rows):
        follower.push_row(y, row)
    return follower.finish()


def rdb_follow(mask: np.ndarray, mode: str = "robust") -> list[ContourSet]:
    """Group a mask's foreground runs into contour sets (see module docstring)."""
    return rdb_follow_rows(iter(mask), mode=mode)


def border_follow_baseline(mask: np.ndarray) -> list[ContourSet]:
    """Classical border following, one outer contour per 8-connected component.

    Returned in the shared ContourSet representation: per row touched by the
    traced border, one run spanning that row's min..max border columns. Used
    as a benchmark and cross-check peer for rdb_follow, not in the pipeline.
    """
    sets = []
    for coords in kernels.outer_borders(np.ascontiguousarray(mask, dtype=np.uint8)):
        runs = []
        for y in np.unique(coords[:, 0]):
            xs = coords[coords[:, 0] == y, 1]
            runs.append(Run(int(y), int(xs.min()), int(xs.max())))
        sets.append(ContourSet(len(sets), runs))
    return sets
