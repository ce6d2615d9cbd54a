"""Multi-scale pooling block: numeric forward pass and gradient checking.

The block averages the input at kernel sizes 1/3/5/7 (stride 1,
zero-padding, fixed divisor k*k), concatenates the four results along the
channel axis, mixes them back to C channels with a per-pixel affine map (the
1x1 convolution), and adds the input residually.

Feature maps are float64 arrays of shape (H, W, C).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import BadKernel, ShapeMismatch

POOL_KERNELS = (1, 3, 5, 7)

_BLOB_MAGIC = b"MSPB"
_BLOB_VERSION = 1


@dataclass
class MspBlockParams:
    """1x1-convolution weights (4C, C) and bias (C,) of the mixing step."""

    mix_weights: np.ndarray
    mix_bias: np.ndarray

    def __post_init__(self):
        self.mix_weights = np.asarray(self.mix_weights, dtype=np.float64)
        self.mix_bias = np.asarray(self.mix_bias, dtype=np.float64)
        c = self.mix_bias.shape[0] if self.mix_bias.ndim == 1 else -1
        if c <= 0 or self.mix_weights.shape != (4 * c, c):
            raise ShapeMismatch(
                f"expected weights (4C, C) and bias (C,); got "
                f"{self.mix_weights.shape} and {self.mix_bias.shape}"
            )

    @property
    def channels(self) -> int:
        return self.mix_bias.shape[0]

    @classmethod
    def zeros(cls, channels: int) -> "MspBlockParams":
        return cls(np.zeros((4 * channels, channels)), np.zeros(channels))


def avg_pool_same(x: np.ndarray, k: int) -> np.ndarray:
    """Same-shape k x k average pooling, zero padding, divisor fixed at k*k."""
    if k not in POOL_KERNELS:
        raise BadKernel(f"kernel must be one of {POOL_KERNELS}, got {k}")
    if k == 1:
        return x.copy()
    h, w = x.shape[:2]
    pad = k // 2
    padded = np.zeros((h + 2 * pad, w + 2 * pad) + x.shape[2:], dtype=np.float64)
    padded[pad:pad + h, pad:pad + w] = x
    out = np.zeros_like(x, dtype=np.float64)
    for dy in range(k):
        for dx in range(k):
            out += padded[dy:dy + h, dx:dx + w]
    out /= k * k
    return out


def _pooled_concat(x: np.ndarray) -> np.ndarray:
    return np.concatenate([avg_pool_same(x, k) for k in POOL_KERNELS], axis=2)


def msp_block_forward(x: np.ndarray, p: MspBlockParams) -> np.ndarray:
    """y = x + mix(concat(avg_pool_1, avg_pool_3, avg_pool_5, avg_pool_7))."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != p.channels:
        raise ShapeMismatch(
            f"feature map {x.shape} does not match C={p.channels} parameters"
        )
    pooled = _pooled_concat(x)
    return x + pooled @ p.mix_weights + p.mix_bias


def msp_block_gradients(x: np.ndarray, p: MspBlockParams):
    """Analytic gradients of loss = sum(y**2) w.r.t. weights, bias and x."""
    x = np.asarray(x, dtype=np.float64)
    pooled = _pooled_concat(x)
    y = x + pooled @ p.mix_weights + p.mix_bias
    g = 2.0 * y  # dL/dy, and dL/d(mix output) since y is a plain sum
    c = p.channels
    grad_w = np.tensordot(pooled, g, axes=([0, 1], [0, 1]))
    grad_b = g.sum(axis=(0, 1))
    # Residual path plus the pooling branches; zero-padded mean pooling with
    # divisor k*k is self-adjoint, so the adjoint is the same pooling.
    g_pooled = g @ p.mix_weights.T
    grad_x = g.copy()
    for i, k in enumerate(POOL_KERNELS):
        grad_x += avg_pool_same(g_pooled[:, :, i * c:(i + 1) * c], k)
    return grad_w, grad_b, grad_x


def msp_block_grad_check(x: np.ndarray, p: MspBlockParams,
                         eps: float = 1e-4) -> float:
    """Max relative error between analytic and central-difference gradients.

    Checks every entry of mix_weights, mix_bias and x for the scalar loss
    sum(forward(x, p)**2). eps should lie in [1e-6, 1e-3].
    """
    if not 1e-6 <= eps <= 1e-3:
        raise ValueError(f"eps must be in [1e-6, 1e-3], got {eps}")
    x = np.asarray(x, dtype=np.float64)

    def loss(xv, wv, bv):
        y = msp_block_forward(xv, MspBlockParams(wv, bv))
        return float((y * y).sum())

    grad_w, grad_b, grad_x = msp_block_gradients(x, p)
    worst = 0.0
    for analytic, arr in ((grad_w, p.mix_weights), (grad_b, p.mix_bias), (grad_x, x)):
        for idx in np.ndindex(arr.shape):
            orig = arr[idx]
            arr[idx] = orig + eps
            hi = loss(x, p.mix_weights, p.mix_bias)
            arr[idx] = orig - eps
            lo = loss(x, p.mix_weights, p.mix_bias)
            arr[idx] = orig
            fd = (hi - lo) / (2.0 * eps)
            a = float(analytic[idx])
            rel = abs(a - fd) / max(abs(a), abs(fd), 1e-8)
            worst = max(worst, rel)
    return worst


def save_params(p: MspBlockParams) -> bytes:
    """Serialize parameters: 16-byte header, then little-endian float64 data."""
    header = struct.pack("<4sIII", _BLOB_MAGIC, _BLOB_VERSION, p.channels, 0)
    body = p.mix_weights.astype("<f8").tobytes(order="C")
    body += p.mix_bias.astype("<f8").tobytes(order="C")
    return header + body


def load_params(blob: bytes) -> MspBlockParams:
    """Inverse of save_params."""
    if len(blob) < 16:
        raise ValueError("parameter blob shorter than its 16-byte header")
    magic, version, channels, _ = struct.unpack("<4sIII", blob[:16])
    if magic != _BLOB_MAGIC:
        raise ValueError(f"bad magic {magic!r} in parameter blob")
    if version != _BLOB_VERSION:
        raise ValueError(f"unsupported parameter blob version {version}")
    n_w = 4 * channels * channels
    expected = 16 + 8 * (n_w + channels)
    if len(blob) != expected:
        raise ValueError(f"parameter blob has {len(blob)} bytes, expected {expected}")
    data = np.frombuffer(blob, dtype="<f8", offset=16)
    return MspBlockParams(
        data[:n_w].reshape(4 * channels, channels).copy(),
        data[n_w:].copy(),
    )
