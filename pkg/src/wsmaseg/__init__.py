"""Box-supervised multimodal masks, heatmap merging, run-based contour
tracing, detection extraction and COCO-style evaluation."""

from .annotate import MultimodalHeatmap, MultimodalMask, ideal_heatmaps, make_multimodal
from .boxes import Detection, boxes_from_contours
from .contour import ContourSet, Run, RunFollower, border_follow_baseline, rdb_follow, scan_runs
from .geometry import BBox, Ellipse, ellipse_ring, fill_ellipse, inner_boundary, inscribed_ellipse
from .merge import binarize, merge_instance_map
from .metrics import MetricReport, box_iou, compute_metrics, match_greedy
from .mspool import MspBlockParams, avg_pool_same, msp_block_forward, msp_block_grad_check
from .synth import SceneSpec, generate_scene

__version__ = "0.1.0"

__all__ = [
    "BBox", "Ellipse", "inscribed_ellipse", "fill_ellipse", "ellipse_ring",
    "inner_boundary", "MultimodalMask", "MultimodalHeatmap", "make_multimodal",
    "ideal_heatmaps", "binarize", "merge_instance_map", "Run", "ContourSet",
    "RunFollower", "scan_runs", "rdb_follow", "border_follow_baseline",
    "Detection", "boxes_from_contours", "MspBlockParams", "avg_pool_same",
    "msp_block_forward", "msp_block_grad_check", "SceneSpec", "generate_scene",
    "box_iou", "match_greedy", "compute_metrics", "MetricReport",
]
