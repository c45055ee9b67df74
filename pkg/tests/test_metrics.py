import numpy as np
import pytest
from conftest import brute_pearson, brute_ssim

from varfuse import (
    metric_ag,
    metric_en,
    metric_qabf,
    metric_scd,
    metric_sd,
    metric_sf,
    metric_ssim,
    metric_vif,
    metrics_all,
    qabf_self_fidelity_ceiling,
)
from varfuse.synthetic import smooth_noise


def textured(size=33, seed=0):
    """Smooth textured plane with strictly positive Sobel magnitude."""
    diag = (2 * np.arange(size)[:, None] + 3 * np.arange(size)[None, :]) / (8.0 * size)
    return 0.15 + diag + 0.2 * smooth_noise(size, size, seed=seed)


# --- EN ------------------------------------------------------------------


def test_en_constant_zero():
    assert metric_en(np.full((8, 8), 0.3)) == 0.0


def test_en_two_levels_one_bit():
    img = np.zeros((4, 4))
    img[:2] = 1.0
    assert metric_en(img) == pytest.approx(1.0, abs=1e-12)


def test_en_uniform_256_levels():
    img = (np.arange(256) / 255.0).reshape(16, 16)
    assert metric_en(img) == pytest.approx(8.0, abs=1e-9)


# --- SD ------------------------------------------------------------------


def test_sd_cases():
    assert metric_sd(np.full((5, 5), 0.7)) == 0.0
    img = np.zeros((4, 4))
    img[:2] = 1.0
    assert metric_sd(img) == pytest.approx(127.5, abs=1e-9)
    rng = np.random.default_rng(1)
    x = rng.random((4, 4))
    scaled = 255.0 * x
    mu = scaled.sum() / 16
    oracle = np.sqrt(sum((v - mu) ** 2 for v in scaled.ravel()) / 16)
    assert metric_sd(x) == pytest.approx(oracle, abs=1e-9)


# --- SF ------------------------------------------------------------------


def test_sf_cases():
    assert metric_sf(np.full((6, 6), 0.2)) == 0.0
    stripes = np.zeros((6, 6))
    stripes[:, 1::2] = 1.0
    assert metric_sf(stripes) == pytest.approx(255.0, abs=1e-9)
    rng = np.random.default_rng(2)
    x = rng.random((4, 4))
    s = 255.0 * x
    rf = np.mean([(s[r, c] - s[r, c - 1]) ** 2 for r in range(4) for c in range(1, 4)])
    cf = np.mean([(s[r, c] - s[r - 1, c]) ** 2 for r in range(1, 4) for c in range(4)])
    assert metric_sf(x) == pytest.approx(np.sqrt(rf + cf), abs=1e-9)


# --- AG ------------------------------------------------------------------


def test_ag_cases():
    assert metric_ag(np.full((5, 5), 0.9)) == 0.0
    ramp = np.tile(np.arange(6) / 255.0, (5, 1))  # one code step per column
    assert metric_ag(ramp) == pytest.approx(np.sqrt(0.5), abs=1e-9)
    rng = np.random.default_rng(3)
    x = rng.random((4, 4))
    s = 255.0 * x
    vals = []
    for r in range(3):
        for c in range(3):
            dx = s[r, c + 1] - s[r, c]
            dy = s[r + 1, c] - s[r, c]
            vals.append(np.sqrt((dx * dx + dy * dy) / 2))
    assert metric_ag(x) == pytest.approx(np.mean(vals), abs=1e-9)


# --- SCD -----------------------------------------------------------------


def test_scd_perfect_complement():
    rng = np.random.default_rng(4)
    ir = rng.random((8, 8)) * 0.5
    vi = rng.random((8, 8)) * 0.5
    assert metric_scd(ir + vi, ir, vi) == pytest.approx(2.0, abs=1e-6)


def test_scd_zero_variance_convention():
    rng = np.random.default_rng(5)
    fused = rng.random((6, 6))
    const = np.full((6, 6), 0.4)
    assert metric_scd(fused, const, const) == 0.0


def test_scd_matches_pearson_oracle():
    rng = np.random.default_rng(6)
    f, a, b = rng.random((8, 8)), rng.random((8, 8)), rng.random((8, 8))
    sf, sa, sb = 255 * f, 255 * a, 255 * b
    oracle = brute_pearson(sf - sb, sa) + brute_pearson(sf - sa, sb)
    assert metric_scd(f, a, b) == pytest.approx(oracle, abs=1e-9)


# --- VIF -----------------------------------------------------------------


def test_vif_copy_is_one():
    img = textured(64, seed=7)
    assert metric_vif(img, img, img) == pytest.approx(1.0, abs=1e-6)


def test_vif_average_of_identical_sources():
    img = textured(64, seed=8)
    fused = 0.5 * img + 0.5 * img
    assert metric_vif(fused, img, img) == pytest.approx(1.0, abs=1e-6)


def test_vif_constant_fused_near_zero():
    src = textured(64, seed=9)
    flat = np.full_like(src, 0.5)
    assert metric_vif(flat, src, src) < 0.01


def test_vif_too_small():
    with pytest.raises(ValueError):
        metric_vif(np.zeros((4, 4)), np.zeros((4, 4)), np.zeros((4, 4)))


# --- Qabf ----------------------------------------------------------------


def test_qabf_self_fidelity_ceiling():
    img = textured(32, seed=10)
    ceiling = qabf_self_fidelity_ceiling()
    assert metric_qabf(img, img, img) == pytest.approx(ceiling, abs=1e-6)
    # scalar recheck of the sigmoid product
    byhand = (0.9994 / (1 + np.exp(-15 * (1 - 0.5)))) * (0.9879 / (1 + np.exp(-22 * (1 - 0.8))))
    assert ceiling == pytest.approx(byhand, abs=1e-12)


def test_qabf_constant_fused_near_zero():
    src = textured(32, seed=11)
    assert metric_qabf(np.full_like(src, 0.5), src, src) < 0.01


def test_qabf_all_constant_zero_edge_convention():
    const = np.full((16, 16), 0.5)
    assert metric_qabf(const, const, const) == 0.0


def test_qabf_in_unit_interval():
    rng = np.random.default_rng(12)
    for _ in range(3):
        f, a, b = rng.random((12, 12)), rng.random((12, 12)), rng.random((12, 12))
        q = metric_qabf(f, a, b)
        assert 0.0 <= q <= 1.0


# --- SSIM ----------------------------------------------------------------


def test_ssim_identity_is_one():
    img = textured(24, seed=13)
    assert metric_ssim(img, img, img) == pytest.approx(1.0, abs=1e-9)


def test_ssim_matches_windowed_oracle():
    img = 0.25 + 0.5 * textured(24, seed=14)
    inverted = 1.0 - img
    value = metric_ssim(inverted, img, img)
    oracle = brute_ssim(255 * inverted, 255 * img)
    assert value < 1.0
    assert value == pytest.approx(oracle, abs=1e-6)


def test_ssim_too_small():
    with pytest.raises(ValueError):
        metric_ssim(np.zeros((10, 10)), np.zeros((10, 10)), np.zeros((10, 10)))


# --- composition and shared properties ------------------------------------


def test_metrics_all_composition_bit_for_bit():
    rng = np.random.default_rng(15)
    f, a, b = rng.random((33, 33)), rng.random((33, 33)), rng.random((33, 33))
    report = metrics_all(f, a, b)
    assert report.en == metric_en(f)
    assert report.sd == metric_sd(f)
    assert report.sf == metric_sf(f)
    assert report.ag == metric_ag(f)
    assert report.scd == metric_scd(f, a, b)
    assert report.vif == metric_vif(f, a, b)
    assert report.qabf == metric_qabf(f, a, b)
    assert report.ssim == metric_ssim(f, a, b)


def test_metrics_all_degenerate_constant_triple():
    const = np.full((16, 16), 0.5)
    report = metrics_all(const, const, const)
    assert report.en == 0.0
    assert report.sd == 0.0
    assert report.sf == 0.0
    assert report.ag == 0.0
    assert report.scd == 0.0
    assert report.vif == 1.0  # copy convention for information-free inputs
    assert report.qabf == 0.0
    assert report.ssim == pytest.approx(1.0, abs=1e-9)


def test_metrics_all_textured_identical_triple():
    img = textured(33, seed=16)
    report = metrics_all(img, img, img)
    assert report.vif == pytest.approx(1.0, abs=1e-6)
    assert report.ssim == pytest.approx(1.0, abs=1e-9)
    assert report.qabf == pytest.approx(qabf_self_fidelity_ceiling(), abs=1e-6)


def test_flip_invariance():
    # 33 = 2^5 + 1 keeps every VIF decimation stage odd so [::2] commutes
    # with horizontal flips.  AG is excluded: its forward differences anchor
    # at the top-left corner, so the per-pixel (dx, dy) pairing shifts by one
    # column under a flip (the magnitudes survive, the pairing does not).
    rng = np.random.default_rng(17)
    f, a, b = rng.random((33, 33)), rng.random((33, 33)), rng.random((33, 33))
    base = metrics_all(f, a, b)
    flipped = metrics_all(np.fliplr(f), np.fliplr(a), np.fliplr(b))
    for name in ("en", "sd", "sf", "scd", "vif", "qabf", "ssim"):
        assert getattr(base, name) == pytest.approx(getattr(flipped, name), abs=1e-9), name
    assert base.ag == pytest.approx(flipped.ag, rel=0.05)  # near, not exact


def test_affine_scaling_of_sd_sf_ag():
    rng = np.random.default_rng(18)
    x = rng.random((12, 12)) * 0.4
    for a in (0.5, 2.0):
        assert metric_sd(a * x) == pytest.approx(a * metric_sd(x), abs=1e-9)
        assert metric_sf(a * x) == pytest.approx(a * metric_sf(x), abs=1e-9)
        assert metric_ag(a * x) == pytest.approx(a * metric_ag(x), abs=1e-9)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        metric_scd(np.zeros((8, 8)), np.zeros((8, 8)), np.zeros((8, 9)))
    with pytest.raises(ValueError):
        metrics_all(np.zeros((12, 12)), np.zeros((12, 12)), np.zeros((12, 13)))
