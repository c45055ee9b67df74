"""Deterministic synthetic test imagery: ramps, steps, Gaussian blobs and
stripe textures, plus paired infrared/visible scenes built from them.

No real dataset ships with the library; these generators give the demos,
benches and tests reproducible content with known structure.
"""

from __future__ import annotations

import numpy as np

from .image import clamp01


def ramp(height: int, width: int, direction: str = "h", lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Linear intensity ramp; direction "h" varies along columns, "v" along rows."""
    if direction == "h":
        line = np.linspace(lo, hi, width)
        return np.tile(line, (height, 1))
    if direction == "v":
        line = np.linspace(lo, hi, height)
        return np.tile(line[:, None], (1, width))
    raise ValueError(f"direction must be 'h' or 'v', got {direction!r}")


def step(height: int, width: int, direction: str = "h", lo: float = 0.1, hi: float = 0.9) -> np.ndarray:
    """Hard step edge at the image midline."""
    img = np.full((height, width), lo)
    if direction == "h":
        img[:, width // 2 :] = hi
    elif direction == "v":
        img[height // 2 :, :] = hi
    else:
        raise ValueError(f"direction must be 'h' or 'v', got {direction!r}")
    return img


def blob(height: int, width: int, cy: float, cx: float, sigma: float, amplitude: float = 1.0) -> np.ndarray:
    """Gaussian blob centered at fractional position (cy, cx) in [0, 1]^2."""
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    d2 = (rows - cy * (height - 1)) ** 2 + (cols - cx * (width - 1)) ** 2
    return amplitude * np.exp(-d2 / (2.0 * sigma * sigma))


def stripes(height: int, width: int, period: int = 8, direction: str = "h", lo: float = 0.2, hi: float = 0.8) -> np.ndarray:
    """Square-wave stripe texture."""
    if direction == "h":
        idx = np.arange(width)[None, :]
        pattern = ((idx // max(1, period // 2)) % 2).astype(float)
        img = np.tile(pattern, (height, 1))
    else:
        idx = np.arange(height)[:, None]
        pattern = ((idx // max(1, period // 2)) % 2).astype(float)
        img = np.tile(pattern, (1, width))
    return lo + (hi - lo) * img


def smooth_noise(height: int, width: int, seed: int, smoothness: int = 4) -> np.ndarray:
    """Band-limited noise: low-res uniform noise upsampled by pixel repetition
    then lightly box-blurred; values rescaled to [0, 1]."""
    rng = np.random.default_rng(seed)
    coarse = rng.random((max(1, height // smoothness), max(1, width // smoothness)))
    img = np.kron(coarse, np.ones((smoothness, smoothness)))[:height, :width]
    if img.shape != (height, width):  # pad if the division did not tile exactly
        img = np.pad(img, ((0, height - img.shape[0]), (0, width - img.shape[1])), mode="edge")
    padded = np.pad(img, 1, mode="edge")
    img = sum(
        padded[i : i + height, j : j + width] for i in range(3) for j in range(3)
    ) / 9.0
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo) if hi > lo else img


def synthetic_pair(index: int, height: int = 64, width: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """One of ten standard (ir, vi) scenes mixing ramps, steps and blobs.

    The infrared channel carries bright smooth targets; the visible channel
    carries texture and edges, so the pair has genuinely complementary
    content.  Deterministic in index.
    """
    i = index % 10
    hot = blob(height, width, 0.3 + 0.05 * i, 0.35 + 0.04 * i, sigma=height / (6 + i % 3), amplitude=0.85)
    warm = blob(height, width, 0.7, 0.72, sigma=height / 10, amplitude=0.5)
    base_ir = ramp(height, width, "v", 0.05, 0.35) if i % 2 == 0 else ramp(height, width, "h", 0.1, 0.3)
    ir = clamp01(base_ir + hot + 0.6 * warm)

    tex = stripes(height, width, period=6 + 2 * (i % 3), direction="h" if i % 2 else "v", lo=0.0, hi=0.25)
    edges = step(height, width, "h" if i % 3 else "v", lo=0.15, hi=0.65)
    detail = smooth_noise(height, width, seed=1000 + i) * 0.3
    vi = clamp01(0.5 * edges + tex + detail + 0.1 * ramp(height, width, "h", 0.0, 1.0))
    return ir, vi
