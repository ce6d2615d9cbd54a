"""Heatmap binarization and the instance-aware merge.

The merge combines the binarized interior (I), boundary (B) and
boundary-on-interior (O) channels into one instance-aware map. Two modes:

* ``literal``: I XOR (B AND O). When a (B AND O) pixel falls outside I
  (possible on noisy heatmaps) XOR turns it into foreground.
* ``robust``: I AND NOT (B AND O), which only ever removes pixels from I.

The two agree wherever (B AND O) is a subset of I, which always holds for
ideal heatmaps.
"""

from __future__ import annotations

import numpy as np

from .annotate import MultimodalHeatmap
from .errors import BadThreshold, DimensionMismatch

MERGE_MODES = ("literal", "robust")


def binarize(grid: np.ndarray, threshold: float) -> np.ndarray:
    """Pixel = 1 iff grid value >= threshold. Threshold must lie in (0, 1)."""
    if not 0.0 < threshold < 1.0:
        raise BadThreshold(f"threshold must be in (0, 1), got {threshold}")
    return (np.asarray(grid) >= threshold).astype(np.uint8)


def _binarized_channels(hm: MultimodalHeatmap, threshold: float):
    i, b, o = hm.channels()
    if not (i.shape == b.shape == o.shape):
        raise DimensionMismatch(
            f"heatmap channels disagree in shape: {i.shape}, {b.shape}, {o.shape}"
        )
    return binarize(i, threshold), binarize(b, threshold), binarize(o, threshold)


def merge_instance_map(hm: MultimodalHeatmap, threshold: float = 0.5,
                       mode: str = "literal") -> np.ndarray:
    """Merge the three heatmaps into a binary instance-aware segmentation map."""
    if mode not in MERGE_MODES:
        raise ValueError(f"mode must be one of {MERGE_MODES}, got {mode!r}")
    ib, bb, ob = _binarized_channels(hm, threshold)
    cut = bb & ob
    if mode == "literal":
        return ib ^ cut
    return ib & (1 - cut)


def mode_discrepancy(hm: MultimodalHeatmap, threshold: float = 0.5) -> np.ndarray:
    """Pixels where literal and robust mode disagree: (B AND O) outside I."""
    ib, bb, ob = _binarized_channels(hm, threshold)
    return (bb & ob) & (1 - ib)
