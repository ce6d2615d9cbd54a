"""Detection metrics: IoU, greedy matching, AP/AR across IoU thresholds and scales.

Boxes are (x, y, w, h) tuples with real-valued extents. AP uses the
101-point interpolated convention over IoU thresholds .50:.05:.95; scale
buckets assign ground truths by box area (small < 32^2, medium 32^2..96^2,
large > 96^2). Buckets without ground truth report the sentinel -1.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Mapping, Sequence

import numpy as np

from .errors import UnsortedInput

IOU_THRESHOLDS = tuple(np.linspace(0.5, 0.95, 10))
RECALL_POINTS = np.linspace(0.0, 1.0, 101)

_SMALL_MAX = 32.0 ** 2
_MEDIUM_MAX = 96.0 ** 2

Box = tuple[float, float, float, float]


def box_iou(a: Sequence[float], b: Sequence[float]) -> float:
    """Intersection over union of two (x, y, w, h) boxes; 0 when disjoint."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    ix = min(ax + aw, bx + bw) - max(ax, bx)
    iy = min(ay + ah, by + bh) - max(ay, by)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (aw * ah + bw * bh - inter)


def _in_bucket(area: float, bucket: str) -> bool:
    if bucket == "all":
        return True
    if bucket == "small":
        return area < _SMALL_MAX
    if bucket == "medium":
        return _SMALL_MAX <= area <= _MEDIUM_MAX
    if bucket == "large":
        return area > _MEDIUM_MAX
    raise ValueError(f"unknown area bucket {bucket!r}")


@dataclass
class GreedyMatch:
    """One image's matching: (det index, gt index) pairs plus the leftovers."""

    pairs: list[tuple[int, int]]
    unmatched_dets: list[int]
    unmatched_gts: list[int]

    @property
    def tp(self) -> int:
        return len(self.pairs)


def match_greedy(dets: Sequence[tuple[Box, float]], gts: Sequence[Box],
                 iou_thresh: float) -> GreedyMatch:
    """Match detections (descending score order) one-to-one against ground truths.

    Each detection takes the not-yet-matched ground truth of highest IoU
    among those with IoU >= iou_thresh (first such gt on ties).
    """
    scores = [s for _, s in dets]
    if any(scores[i] < scores[i + 1] for i in range(len(scores) - 1)):
        raise UnsortedInput("detections must be sorted by non-increasing score")
    taken = [False] * len(gts)
    pairs = []
    unmatched_dets = []
    for di, (box, _) in enumerate(dets):
        best_iou = 0.0
        best_gt = -1
        for gi, gt in enumerate(gts):
            if taken[gi]:
                continue
            iou = box_iou(box, gt)
            if iou >= iou_thresh and iou > best_iou:
                best_iou = iou
                best_gt = gi
        if best_gt >= 0:
            taken[best_gt] = True
            pairs.append((di, best_gt))
        else:
            unmatched_dets.append(di)
    unmatched_gts = [gi for gi, t in enumerate(taken) if not t]
    return GreedyMatch(pairs, unmatched_dets, unmatched_gts)


@dataclass
class MetricReport:
    ap: float
    ap50: float
    ap75: float
    ap_s: float
    ap_m: float
    ap_l: float
    ar1: float
    ar10: float
    ar100: float
    ar_s: float
    ar_m: float
    ar_l: float
    f1_at_50: float

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def format_table(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            shown = f"{value:8.4f}" if value >= 0 else "       -"
            lines.append(f"{f.name:<10s}{shown}")
        return "\n".join(lines) + "\n"


class _Evaluator:
    """Shared state for the per-(threshold, bucket, cap) evaluations."""

    def __init__(self, dets_by_image, gts_by_image):
        self.image_ids = sorted(set(dets_by_image) | set(gts_by_image))
        self.dets = {}
        self.gts = {}
        self.ious = {}
        for img in self.image_ids:
            dets = list(dets_by_image.get(img, []))
            # Stable descending-score order fixed once per image.
            order = sorted(range(len(dets)), key=lambda i: -dets[i][1])
            dets = [dets[i] for i in order]
            gts = list(gts_by_image.get(img, []))
            self.dets[img] = dets
            self.gts[img] = gts
            self.ious[img] = [
                [box_iou(d[0], g) for g in gts] for d in dets
            ]

    def run(self, thresh: float, bucket: str, maxdet: int):
        """Return (scores, tp flags, ignore flags, n non-ignored gts)."""
        all_scores = []
        all_tp = []
        all_ignore = []
        npig = 0
        for img in self.image_ids:
            gts = self.gts[img]
            gt_ignore = [not _in_bucket(g[2] * g[3], bucket) for g in gts]
            npig += gt_ignore.count(False)
            # Ignored gts considered last so real matches win.
            gt_order = sorted(range(len(gts)), key=lambda j: gt_ignore[j])
            dets = self.dets[img][:maxdet]
            ious = self.ious[img]
            taken = [False] * len(gts)
            for di, (box, score) in enumerate(dets):
                best_iou = 0.0
                best_gt = -1
                for gj in gt_order:
                    if taken[gj]:
                        continue
                    if best_gt >= 0 and not gt_ignore[best_gt] and gt_ignore[gj]:
                        break  # a real match exists; ignored gts cannot improve it
                    iou = ious[di][gj]
                    if iou >= thresh and iou > best_iou:
                        best_iou = iou
                        best_gt = gj
                if best_gt >= 0:
                    taken[best_gt] = True
                    tp = not gt_ignore[best_gt]
                    ignore = gt_ignore[best_gt]
                else:
                    tp = False
                    # An unmatched detection outside the bucket is not a
                    # fair false positive for that bucket.
                    ignore = not _in_bucket(box[2] * box[3], bucket)
                all_scores.append(score)
                all_tp.append(tp)
                all_ignore.append(ignore)
        return all_scores, all_tp, all_ignore, npig

    def ap(self, thresh: float, bucket: str, maxdet: int = 100) -> float:
        scores, tps, ignores, npig = self.run(thresh, bucket, maxdet)
        if npig == 0:
            return -1.0
        order = sorted(range(len(scores)), key=lambda i: -scores[i])
        tp_cum = 0
        fp_cum = 0
        recalls = []
        precisions = []
        for i in order:
            if ignores[i]:
                continue
            tp_cum += tps[i]
            fp_cum += not tps[i]
            recalls.append(tp_cum / npig)
            precisions.append(tp_cum / (tp_cum + fp_cum))
        if not recalls:
            return 0.0
        # Precision envelope: max precision at any recall >= r.
        for i in range(len(precisions) - 2, -1, -1):
            precisions[i] = max(precisions[i], precisions[i + 1])
        idx = np.searchsorted(recalls, RECALL_POINTS, side="left")
        sampled = [precisions[i] if i < len(precisions) else 0.0 for i in idx]
        return float(np.mean(sampled))

    def recall(self, thresh: float, bucket: str, maxdet: int) -> float:
        scores, tps, ignores, npig = self.run(thresh, bucket, maxdet)
        if npig == 0:
            return -1.0
        tp = sum(t for t, ig in zip(tps, ignores) if not ig)
        return tp / npig

    def f1(self, thresh: float) -> float:
        scores, tps, ignores, npig = self.run(thresh, "all", 10 ** 9)
        if npig == 0:
            return -1.0
        tp = sum(tps)
        fp = len(tps) - tp
        fn = npig - tp
        return 2.0 * tp / (2.0 * tp + fp + fn) if tp else 0.0


def _mean_or_sentinel(values: list[float]) -> float:
    kept = [v for v in values if v >= 0]
    return float(np.mean(kept)) if kept else -1.0


def compute_metrics(dets_by_image: Mapping[object, Sequence[tuple[Box, float]]],
                    gts_by_image: Mapping[object, Sequence[Box]]) -> MetricReport:
    """Evaluate detections against ground truths over all images.

    dets_by_image maps image id to ((x, y, w, h), score) pairs; gts_by_image
    maps image id to (x, y, w, h) boxes.
    """
    ev = _Evaluator(dets_by_image, gts_by_image)
    ap_all = [ev.ap(t, "all") for t in IOU_THRESHOLDS]
    return MetricReport(
        ap=_mean_or_sentinel(ap_all),
        ap50=ev.ap(0.5, "all"),
        ap75=ev.ap(IOU_THRESHOLDS[5], "all"),
        ap_s=_mean_or_sentinel([ev.ap(t, "small") for t in IOU_THRESHOLDS]),
        ap_m=_mean_or_sentinel([ev.ap(t, "medium") for t in IOU_THRESHOLDS]),
        ap_l=_mean_or_sentinel([ev.ap(t, "large") for t in IOU_THRESHOLDS]),
        ar1=_mean_or_sentinel([ev.recall(t, "all", 1) for t in IOU_THRESHOLDS]),
        ar10=_mean_or_sentinel([ev.recall(t, "all", 10) for t in IOU_THRESHOLDS]),
        ar100=_mean_or_sentinel([ev.recall(t, "all", 100) for t in IOU_THRESHOLDS]),
        ar_s=_mean_or_sentinel([ev.recall(t, "small", 100) for t in IOU_THRESHOLDS]),
        ar_m=_mean_or_sentinel([ev.recall(t, "medium", 100) for t in IOU_THRESHOLDS]),
        ar_l=_mean_or_sentinel([ev.recall(t, "large", 100) for t in IOU_THRESHOLDS]),
        f1_at_50=ev.f1(0.5),
    )
