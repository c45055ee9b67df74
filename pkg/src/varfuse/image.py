"""Image containers, file I/O and color handling.

Images are plain numpy arrays indexed (row, col): a luminance plane is a
2-D float64 array with samples in [0, 1]; a color image is an (H, W, 3)
float64 array.  Files are 8-bit (PNG gray/RGB, binary PGM/PPM with
maxval 255); loading divides by 255, saving rounds back.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage

# extension -> PIL format name
_FORMATS = {".png": "PNG", ".pgm": "PPM", ".ppm": "PPM"}

# Full-range BT.601 luma weights and the matching chroma scale factors.
_WR, _WG, _WB = 0.299, 0.587, 0.114
_CB_SCALE = 2.0 * (1.0 - _WB)  # 1.772
_CR_SCALE = 2.0 * (1.0 - _WR)  # 1.402


@dataclass(frozen=True)
class Rect:
    """Square pixel region with top-left corner (x0, y0) and side length size."""

    x0: int
    y0: int
    size: int


@dataclass
class Chroma:
    """Cb/Cr planes retained when a color image is reduced to luminance."""

    cb: np.ndarray
    cr: np.ndarray


def require_plane(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate a 2-D luminance plane and return it as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D plane, got shape {arr.shape}")
    return arr


def require_same_shape(a: np.ndarray, b: np.ndarray, what: str = "images") -> None:
    if a.shape != b.shape:
        raise ValueError(f"{what} have mismatched shapes: {a.shape} vs {b.shape}")


def clamp01(img: np.ndarray) -> np.ndarray:
    """Clamp every sample into [0, 1]."""
    return np.clip(img, 0.0, 1.0)


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Load an 8-bit raster file as an (H, W, 3) float64 array in [0, 1].

    Grayscale files are replicated across the three channels.  Supported
    formats: PNG (8-bit gray or RGB) and binary PGM/PPM (maxval 255).
    """
    with PILImage.open(path) as im:
        if im.mode == "L":
            plane = np.asarray(im, dtype=np.float64) / 255.0
            arr = np.dstack([plane, plane, plane])
        elif im.mode == "RGB":
            arr = np.asarray(im, dtype=np.float64) / 255.0
        else:
            raise ValueError(
                f"unsupported image mode {im.mode!r} in {path} "
                "(only 8-bit grayscale and RGB are supported)"
            )
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"zero-dimension image: {path}")
    return arr


def save_image(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write a plane or color image as an 8-bit file, quantizing by round(v*255).

    The write is atomic: the file appears only once fully written.
    """
    path = os.fspath(path)
    ext = os.path.splitext(path)[1].lower()
    if ext not in _FORMATS:
        raise ValueError(f"unsupported output format {ext!r} (use .png, .pgm or .ppm)")

    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        if ext == ".ppm":
            raise ValueError("cannot write a single plane as PPM; use .pgm or .png")
        mode = "L"
    elif arr.ndim == 3 and arr.shape[2] == 3:
        if ext == ".pgm":
            raise ValueError("cannot write a color image as PGM; use .ppm or .png")
        mode = "RGB"
    else:
        raise ValueError(f"expected a 2-D plane or (H, W, 3) array, got shape {arr.shape}")

    codes = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        PILImage.fromarray(codes, mode=mode).save(tmp, format=_FORMATS[ext])
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def to_luminance(color: np.ndarray) -> tuple[np.ndarray, Chroma]:
    """Split an (H, W, 3) image into its BT.601 luminance plane and chroma sidecar."""
    arr = np.asarray(color, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) color image, got shape {arr.shape}")
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    y = _WR * r + _WG * g + _WB * b
    cb = (b - y) / _CB_SCALE + 0.5
    cr = (r - y) / _CR_SCALE + 0.5
    return y, Chroma(cb=cb, cr=cr)


def recompose(lum: np.ndarray, chroma: Chroma) -> np.ndarray:
    """Inverse of to_luminance up to [0, 1] clamping."""
    y = require_plane(lum, "luminance")
    require_same_shape(y, chroma.cb, "luminance/chroma")
    require_same_shape(y, chroma.cr, "luminance/chroma")
    b = y + (chroma.cb - 0.5) * _CB_SCALE
    r = y + (chroma.cr - 0.5) * _CR_SCALE
    g = (y - _WR * r - _WB * b) / _WG
    return clamp01(np.dstack([r, g, b]))


def is_grayscale(color: np.ndarray) -> bool:
    """True when all three channels are identical (e.g. loaded from a gray file)."""
    return bool(
        np.array_equal(color[..., 0], color[..., 1])
        and np.array_equal(color[..., 1], color[..., 2])
    )
