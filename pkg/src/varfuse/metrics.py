"""The eight fusion-quality metrics: EN, SD, SF, AG, SCD, VIF, Qabf, SSIM.

All metrics are computed on the 0-255 intensity scale (inputs in [0, 1] are
multiplied by 255 internally) so reported magnitudes are comparable with the
fusion literature.  Degenerate inputs (zero variance, zero edges) follow the
documented conventions and never produce NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .image import require_plane, require_same_shape
from .spatial import magnitude, sobel

# Xydeas-Petrovic edge-preservation constants.
QABF_GAMMA_G = 0.9994
QABF_KAPPA_G = -15.0
QABF_SIGMA_G = 0.5
QABF_GAMMA_A = 0.9879
QABF_KAPPA_A = -22.0
QABF_SIGMA_A = 0.8
QABF_L = 1

# SSIM constants (Wang et al.) on the 0-255 scale.
SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5

# Pixel-domain VIF: four scales, sensor noise variance on the 0-255 scale.
VIF_SCALES = 4
VIF_SIGMA_N_SQ = 2.0
VIF_VAR_FLOOR = 1e-10

CSV_HEADER = "path,en,sd,sf,ag,scd,vif,qabf,ssim"


@dataclass
class MetricsReport:
    """The eight named fusion-quality scores for one (ir, vi, fused) triple."""

    en: float
    sd: float
    sf: float
    ag: float
    scd: float
    vif: float
    qabf: float
    ssim: float

    def values(self) -> tuple[float, ...]:
        return (self.en, self.sd, self.sf, self.ag, self.scd, self.vif, self.qabf, self.ssim)

    def csv_row(self, path: str) -> str:
        return ",".join([path] + [repr(float(v)) for v in self.values()])


def _scaled(img: np.ndarray, name: str = "image") -> np.ndarray:
    return require_plane(img, name) * 255.0


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords**2) / (2.0 * sigma * sigma))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def metric_en(img: np.ndarray) -> float:
    """Shannon entropy (bits) of the 256-bin intensity histogram."""
    levels = np.rint(np.clip(require_plane(img), 0.0, 1.0) * 255.0).astype(np.int64)
    counts = np.bincount(levels.ravel(), minlength=256)
    p = counts[counts > 0] / levels.size
    return float(-np.sum(p * np.log2(p)) + 0.0)  # +0.0 normalizes -0.0


def metric_sd(img: np.ndarray) -> float:
    """Population standard deviation on the 0-255 scale."""
    return float(np.std(_scaled(img)))


def metric_sf(img: np.ndarray) -> float:
    """Spatial frequency: root of summed squared row/column first differences."""
    x = _scaled(img)
    rf_sq = np.mean((x[:, 1:] - x[:, :-1]) ** 2) if x.shape[1] > 1 else 0.0
    cf_sq = np.mean((x[1:, :] - x[:-1, :]) ** 2) if x.shape[0] > 1 else 0.0
    return float(np.sqrt(rf_sq + cf_sq))


def metric_ag(img: np.ndarray) -> float:
    """Average gradient: mean of sqrt((dx^2 + dy^2) / 2) over forward differences."""
    x = _scaled(img)
    if x.shape[0] < 2 or x.shape[1] < 2:
        return 0.0
    dx = x[:-1, 1:] - x[:-1, :-1]
    dy = x[1:, :-1] - x[:-1, :-1]
    return float(np.mean(np.sqrt((dx * dx + dy * dy) / 2.0)))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    den = np.sqrt(np.sum(xc * xc) * np.sum(yc * yc))
    if den == 0.0:
        return 0.0  # zero-variance convention
    return float(np.sum(xc * yc) / den)


def metric_scd(fused: np.ndarray, ir: np.ndarray, vi: np.ndarray) -> float:
    """Sum of correlations of differences: corr(F - vi, ir) + corr(F - ir, vi)."""
    f, a, b = _scaled(fused, "fused"), _scaled(ir, "ir"), _scaled(vi, "vi")
    require_same_shape(f, a, "fused/ir")
    require_same_shape(f, b, "fused/vi")
    return _pearson(f - b, a) + _pearson(f - a, b)


def _filter_symmetric(x: np.ndarray, win: np.ndarray) -> np.ndarray:
    """Same-size windowed filtering with symmetric boundary extension.

    np.pad handles pad widths larger than the image by repeated reflection,
    which keeps the coarsest scales well defined on small images."""
    half = win.shape[0] // 2
    padded = np.pad(x, half, mode="symmetric")
    return convolve2d(padded, win, mode="valid")  # win is symmetric


def _vif_single(ref: np.ndarray, dist: np.ndarray) -> float:
    """Pixel-domain visual information fidelity of dist against ref."""
    num = 0.0
    den = 0.0
    for scale in range(VIF_SCALES):
        sigma = 2.0**scale / 2.0
        size = 2 * math.ceil(3.0 * sigma) + 1
        win = _gaussian_kernel(size, sigma)
        if scale > 0:
            ref = _filter_symmetric(ref, win)[::2, ::2]
            dist = _filter_symmetric(dist, win)[::2, ::2]

        mu1 = _filter_symmetric(ref, win)
        mu2 = _filter_symmetric(dist, win)
        sigma1_sq = _filter_symmetric(ref * ref, win) - mu1 * mu1
        sigma2_sq = _filter_symmetric(dist * dist, win) - mu2 * mu2
        sigma12 = _filter_symmetric(ref * dist, win) - mu1 * mu2
        sigma1_sq = np.maximum(sigma1_sq, 0.0)
        sigma2_sq = np.maximum(sigma2_sq, 0.0)

        g = sigma12 / (sigma1_sq + VIF_VAR_FLOOR)
        sv_sq = sigma2_sq - g * sigma12

        low1 = sigma1_sq < VIF_VAR_FLOOR
        g[low1] = 0.0
        sv_sq[low1] = sigma2_sq[low1]
        sigma1_sq[low1] = 0.0
        low2 = sigma2_sq < VIF_VAR_FLOOR
        g[low2] = 0.0
        sv_sq[low2] = 0.0
        neg = g < 0.0
        sv_sq[neg] = sigma2_sq[neg]
        g[neg] = 0.0
        sv_sq = np.maximum(sv_sq, VIF_VAR_FLOOR)

        num += float(np.sum(np.log10(1.0 + g * g * sigma1_sq / (sv_sq + VIF_SIGMA_N_SQ))))
        den += float(np.sum(np.log10(1.0 + sigma1_sq / VIF_SIGMA_N_SQ)))
    if den == 0.0:
        return 1.0  # both images carry no information; a copy is perfectly faithful
    return num / den


def metric_vif(fused: np.ndarray, ir: np.ndarray, vi: np.ndarray) -> float:
    """Four-scale pixel-domain VIF of the fused image, averaged over the sources."""
    f, a, b = _scaled(fused, "fused"), _scaled(ir, "ir"), _scaled(vi, "vi")
    require_same_shape(f, a, "fused/ir")
    require_same_shape(f, b, "fused/vi")
    if min(f.shape) < 2 ** (VIF_SCALES - 1):
        raise ValueError(
            f"image {f.shape} too small for {VIF_SCALES}-scale analysis "
            f"(needs min dimension >= {2 ** (VIF_SCALES - 1)})"
        )
    return 0.5 * (_vif_single(a, f) + _vif_single(b, f))


def _qabf_edges(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    g = sobel(x)
    strength = magnitude(g)
    angle = np.full_like(x, np.pi / 2.0)
    nz = g.gx != 0.0
    angle[nz] = np.arctan(g.gy[nz] / g.gx[nz])
    return strength, angle


def _qabf_preservation(g_src, a_src, g_f, a_f) -> np.ndarray:
    denom = np.maximum(g_src, g_f)
    ratio = np.where(denom > 0.0, np.minimum(g_src, g_f) / np.where(denom > 0.0, denom, 1.0), 0.0)
    aligned = 1.0 - np.abs(a_src - a_f) / (np.pi / 2.0)
    q_g = QABF_GAMMA_G / (1.0 + np.exp(QABF_KAPPA_G * (ratio - QABF_SIGMA_G)))
    q_a = QABF_GAMMA_A / (1.0 + np.exp(QABF_KAPPA_A * (aligned - QABF_SIGMA_A)))
    return q_g * q_a


def qabf_self_fidelity_ceiling() -> float:
    """Closed-form value of Qabf when the fused image equals both sources."""
    q_g = QABF_GAMMA_G / (1.0 + math.exp(QABF_KAPPA_G * (1.0 - QABF_SIGMA_G)))
    q_a = QABF_GAMMA_A / (1.0 + math.exp(QABF_KAPPA_A * (1.0 - QABF_SIGMA_A)))
    return q_g * q_a


def metric_qabf(fused: np.ndarray, ir: np.ndarray, vi: np.ndarray) -> float:
    """Xydeas-Petrovic gradient-preservation quality in [0, 1]."""
    f, a, b = _scaled(fused, "fused"), _scaled(ir, "ir"), _scaled(vi, "vi")
    require_same_shape(f, a, "fused/ir")
    require_same_shape(f, b, "fused/vi")
    g_a, ang_a = _qabf_edges(a)
    g_b, ang_b = _qabf_edges(b)
    g_f, ang_f = _qabf_edges(f)
    q_af = _qabf_preservation(g_a, ang_a, g_f, ang_f)
    q_bf = _qabf_preservation(g_b, ang_b, g_f, ang_f)
    w_a = g_a**QABF_L
    w_b = g_b**QABF_L
    total_w = float(np.sum(w_a + w_b))
    if total_w == 0.0:
        return 0.0  # zero-edge convention
    return float(np.sum(q_af * w_a + q_bf * w_b) / total_w)


def _ssim_single(x: np.ndarray, y: np.ndarray) -> float:
    win = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    mu1 = convolve2d(x, win, mode="valid")
    mu2 = convolve2d(y, win, mode="valid")
    mu1_sq, mu2_sq, mu12 = mu1 * mu1, mu2 * mu2, mu1 * mu2
    sigma1_sq = convolve2d(x * x, win, mode="valid") - mu1_sq
    sigma2_sq = convolve2d(y * y, win, mode="valid") - mu2_sq
    sigma12 = convolve2d(x * y, win, mode="valid") - mu12
    ssim_map = ((2.0 * mu12 + SSIM_C1) * (2.0 * sigma12 + SSIM_C2)) / (
        (mu1_sq + mu2_sq + SSIM_C1) * (sigma1_sq + sigma2_sq + SSIM_C2)
    )
    return float(np.mean(ssim_map))


def metric_ssim(fused: np.ndarray, ir: np.ndarray, vi: np.ndarray) -> float:
    """Mean structural similarity (Gaussian 11x11, sigma 1.5), averaged over sources."""
    f, a, b = _scaled(fused, "fused"), _scaled(ir, "ir"), _scaled(vi, "vi")
    require_same_shape(f, a, "fused/ir")
    require_same_shape(f, b, "fused/vi")
    if min(f.shape) < SSIM_WINDOW:
        raise ValueError(f"image {f.shape} too small for an {SSIM_WINDOW}x{SSIM_WINDOW} window")
    return 0.5 * (_ssim_single(f, a) + _ssim_single(f, b))


def metrics_all(fused: np.ndarray, ir: np.ndarray, vi: np.ndarray) -> MetricsReport:
    """Populate all eight metrics for one (fused, ir, vi) triple."""
    return MetricsReport(
        en=metric_en(fused),
        sd=metric_sd(fused),
        sf=metric_sf(fused),
        ag=metric_ag(fused),
        scd=metric_scd(fused, ir, vi),
        vif=metric_vif(fused, ir, vi),
        qabf=metric_qabf(fused, ir, vi),
        ssim=metric_ssim(fused, ir, vi),
    )
