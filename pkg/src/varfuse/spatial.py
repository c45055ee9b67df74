"""Shared spatial operators: Sobel gradients (with exact adjoint), Laplacian
and global histogram equalization.

All stencils use replicate (edge-clamp) padding and preserve the input shape.
The Sobel forward/adjoint pair is implemented from the same padded stencil so
the adjoint identity <sobel(x), u> == <x, sobel_adjoint(u)> holds to machine
precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import require_plane

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T.copy()
LAPLACIAN_KERNEL = np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])

HIST_LEVELS = 256


@dataclass
class GradientField:
    """Horizontal/vertical derivative planes of one image (units: intensity/pixel)."""

    gx: np.ndarray
    gy: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return self.gx.shape


def _stencil(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Correlate a 3x3 kernel over the replicate-padded image."""
    h, w = img.shape
    padded = np.pad(img, 1, mode="edge")
    out = np.zeros((h, w))
    for i in range(3):
        for j in range(3):
            k = kernel[i, j]
            if k != 0.0:
                out += k * padded[i : i + h, j : j + w]
    return out


def _stencil_adjoint(u: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Transpose of _stencil: scatter into the padded plane, then fold the
    replicate-padding ring back onto the edge pixels it was copied from."""
    h, w = u.shape
    padded = np.zeros((h + 2, w + 2))
    for i in range(3):
        for j in range(3):
            k = kernel[i, j]
            if k != 0.0:
                padded[i : i + h, j : j + w] += k * u
    out = padded[1:-1, 1:-1].copy()
    out[0, :] += padded[0, 1:-1]
    out[-1, :] += padded[-1, 1:-1]
    out[:, 0] += padded[1:-1, 0]
    out[:, -1] += padded[1:-1, -1]
    out[0, 0] += padded[0, 0]
    out[0, -1] += padded[0, -1]
    out[-1, 0] += padded[-1, 0]
    out[-1, -1] += padded[-1, -1]
    return out


def sobel(img: np.ndarray) -> GradientField:
    """Sobel gradient field of a plane (replicate padding, same shape)."""
    arr = require_plane(img)
    return GradientField(gx=_stencil(arr, SOBEL_X), gy=_stencil(arr, SOBEL_Y))


def sobel_adjoint(field: GradientField) -> np.ndarray:
    """Adjoint of sobel(): pulls a gradient-space field back to image space."""
    gx = require_plane(field.gx, "gx")
    gy = require_plane(field.gy, "gy")
    if gx.shape != gy.shape:
        raise ValueError(f"gx/gy shapes differ: {gx.shape} vs {gy.shape}")
    return _stencil_adjoint(gx, SOBEL_X) + _stencil_adjoint(gy, SOBEL_Y)


def magnitude(field: GradientField) -> np.ndarray:
    """Per-pixel gradient magnitude sqrt(gx^2 + gy^2)."""
    return np.sqrt(field.gx * field.gx + field.gy * field.gy)


def laplacian(img: np.ndarray) -> np.ndarray:
    """4-neighbor Laplacian (replicate padding); output is signed."""
    return _stencil(require_plane(img), LAPLACIAN_KERNEL)


def hist_equalize(img: np.ndarray) -> np.ndarray:
    """Global histogram equalization over 256 levels, mapped into [0, 1].

    Levels are round(v*255); level v maps to (C(v) - C_min) / (N - C_min)
    where C is the cumulative histogram and C_min its value at the lowest
    occupied level.  A single-level (constant) image maps to 1.0 by the
    0/0 -> 1 convention.
    """
    arr = require_plane(img)
    levels = np.rint(np.clip(arr, 0.0, 1.0) * (HIST_LEVELS - 1)).astype(np.int64)
    counts = np.bincount(levels.ravel(), minlength=HIST_LEVELS)
    cdf = np.cumsum(counts)
    n = levels.size
    c_min = int(cdf[counts > 0][0])
    if n == c_min:
        return np.ones_like(arr)
    mapping = (cdf - c_min) / float(n - c_min)
    return mapping[levels]
