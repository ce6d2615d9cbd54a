"""Run configuration: one serializable record of every pipeline knob."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .contour import CONTOUR_MODES
from .errors import InputDataError
from .merge import MERGE_MODES


@dataclass
class RunConfig:
    ring_width: int = 2
    threshold: float = 0.5
    merge_mode: str = "literal"
    contour_mode: str = "robust"
    min_pixels: int = 4
    iou_thresh: float = 0.5
    seed: int = 0
    jobs: int = 0  # 0 means "use all available cores"
    input: str | None = None
    output: str | None = None
    # Free-form network metadata (stack/base/depth and friends); echoed into
    # manifests and reports, never interpreted.
    model: dict | None = None

    def validate(self) -> "RunConfig":
        if self.ring_width < 1:
            raise InputDataError(f"ring_width must be >= 1, got {self.ring_width}")
        if not 0.0 < self.threshold < 1.0:
            raise InputDataError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.merge_mode not in MERGE_MODES:
            raise InputDataError(f"merge_mode must be one of {MERGE_MODES}")
        if self.contour_mode not in CONTOUR_MODES:
            raise InputDataError(f"contour_mode must be one of {CONTOUR_MODES}")
        if self.min_pixels < 0:
            raise InputDataError(f"min_pixels must be >= 0, got {self.min_pixels}")
        if not 0.0 < self.iou_thresh <= 1.0:
            raise InputDataError(f"iou_thresh must be in (0, 1], got {self.iou_thresh}")
        if self.jobs < 0:
            raise InputDataError(f"jobs must be >= 0, got {self.jobs}")
        return self

    def to_json_str(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json_str(cls, text: str) -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputDataError(f"config is not valid JSON: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise InputDataError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw).validate()

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InputDataError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json_str(text)

    def save(self, path: Path) -> None:
        Path(path).write_text(self.to_json_str())
