"""Kernel backend selection.

The hot loops of contour tracing (run extraction, border following) exist
twice: a compiled Cython module (``wsmaseg.kernels._fast``) and a
numpy/pure-Python fallback (``wsmaseg.kernels.pykernels``). The compiled one
is preferred when importable; set WSMA_KERNELS=py or WSMA_KERNELS=c to force
a backend.
"""

from __future__ import annotations

import os

from . import pykernels

try:
    from . import _fast
except ImportError:
    _fast = None

_BACKENDS = {"py": pykernels}
if _fast is not None:
    _BACKENDS["c"] = _fast


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str | None = None):
    """Resolve a kernel backend module by name (default: env var, then best)."""
    if name is None or name == "auto":
        name = os.environ.get("WSMA_KERNELS", "auto")
    if name == "auto":
        name = "c" if "c" in _BACKENDS else "py"
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        ) from None


_active = get_backend()

row_runs = _active.row_runs
outer_borders = _active.outer_borders
active_backend = "c" if _active is _fast else "py"
