"""Exception types shared across the pipeline."""


class WsmaError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(WsmaError):
    """Grids or masks that must share a shape do not."""


class EmptyAfterClamp(WsmaError):
    """A bounding box clamped against the image has zero area."""


class BadThreshold(WsmaError):
    """Binarization threshold outside the open interval (0, 1)."""


class RowOutOfRange(WsmaError):
    """Row index outside the mask."""


class BadKernel(WsmaError):
    """Pooling kernel size not one of 1, 3, 5, 7."""


class ShapeMismatch(WsmaError):
    """Feature map and parameter shapes are inconsistent."""


class PlacementFailure(WsmaError):
    """Scene generation could not place an object within the attempt budget."""


class UnsortedInput(WsmaError):
    """Detections passed to the matcher are not sorted by descending score."""


class InputDataError(WsmaError):
    """Malformed or inconsistent input files (CLI exit code 2)."""
