"""Complementary mask generation: a random square patch in which each pixel is
kept by exactly one of the two modalities, everything outside left intact."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import Rect, require_plane, require_same_shape


@dataclass
class MaskPair:
    """Complementary binary masks (values 0.0/1.0) for the infrared and visible
    inputs, plus the patch rectangle and the seed that produced them."""

    m_ir: np.ndarray
    m_vi: np.ndarray
    patch: Rect
    seed: int


def default_patch_size(width: int, height: int) -> int:
    """Default patch side: half the shorter image dimension (at least 1)."""
    return max(1, min(width, height) // 2)


def gen_mask_pair(width: int, height: int, k: int, seed: int) -> MaskPair:
    """Draw a k-by-k patch uniformly and fill it with complementary masks.

    Inside the patch exactly ceil(k^2 / 2) cells keep the infrared pixel and
    the rest keep the visible pixel; outside both masks are 1.  Deterministic
    for a fixed (width, height, k, seed); the generator is numpy's PCG64.
    """
    if not 1 <= k <= min(width, height):
        raise ValueError(f"patch size k={k} out of range for a {width}x{height} image")
    rng = np.random.default_rng(seed)
    x0 = int(rng.integers(0, width - k + 1))
    y0 = int(rng.integers(0, height - k + 1))
    n_ir = (k * k + 1) // 2
    cells = rng.permutation(k * k)
    patch_ir = np.zeros(k * k)
    patch_ir[cells[:n_ir]] = 1.0
    patch_ir = patch_ir.reshape(k, k)

    m_ir = np.ones((height, width))
    m_vi = np.ones((height, width))
    m_ir[y0 : y0 + k, x0 : x0 + k] = patch_ir
    m_vi[y0 : y0 + k, x0 : x0 + k] = 1.0 - patch_ir
    return MaskPair(m_ir=m_ir, m_vi=m_vi, patch=Rect(x0=x0, y0=y0, size=k), seed=seed)


def apply_masks(
    ir: np.ndarray, vi: np.ndarray, masks: MaskPair
) -> tuple[np.ndarray, np.ndarray]:
    """Element-wise products (ir * m_ir, vi * m_vi)."""
    ir = require_plane(ir, "ir")
    vi = require_plane(vi, "vi")
    require_same_shape(ir, vi, "ir/vi")
    require_same_shape(ir, masks.m_ir, "image/mask")
    return ir * masks.m_ir, vi * masks.m_vi
