import numpy as np
import pytest

from varfuse import apply_masks, default_patch_size, gen_mask_pair


def patch_slices(masks):
    r = masks.patch
    return slice(r.y0, r.y0 + r.size), slice(r.x0, r.x0 + r.size)


def test_k1_single_cell():
    masks = gen_mask_pair(5, 5, 1, seed=0)
    ys, xs = patch_slices(masks)
    assert masks.m_ir[ys, xs].sum() == 1.0  # ceil(1/2) = 1
    assert masks.m_vi[ys, xs].sum() == 0.0


def test_k2_exact_counts():
    for seed in range(5):
        masks = gen_mask_pair(8, 6, 2, seed=seed)
        ys, xs = patch_slices(masks)
        assert masks.m_ir[ys, xs].sum() == 2.0
        assert masks.m_vi[ys, xs].sum() == 2.0


def test_determinism_bit_for_bit():
    a = gen_mask_pair(11, 9, 4, seed=123)
    b = gen_mask_pair(11, 9, 4, seed=123)
    assert np.array_equal(a.m_ir, b.m_ir)
    assert np.array_equal(a.m_vi, b.m_vi)
    assert a.patch == b.patch
    c = gen_mask_pair(11, 9, 4, seed=124)
    assert not np.array_equal(a.m_ir, c.m_ir) or a.patch != c.patch


@pytest.mark.parametrize("k", [0, 10, -3])
def test_k_out_of_range(k):
    with pytest.raises(ValueError):
        gen_mask_pair(9, 7, k, seed=0)


def test_complementarity_planewide():
    masks = gen_mask_pair(12, 10, 5, seed=7)
    total = masks.m_ir + masks.m_vi
    ys, xs = patch_slices(masks)
    assert np.all(total[ys, xs] == 1.0)
    outside = np.ones((10, 12), bool)
    outside[ys, xs] = False
    assert np.all(total[outside] == 2.0)
    assert np.all(masks.m_ir[ys, xs] * masks.m_vi[ys, xs] == 0.0)


def test_ones_fraction_near_half():
    masks = gen_mask_pair(20, 20, 7, seed=3)
    ys, xs = patch_slices(masks)
    frac = masks.m_ir[ys, xs].mean()
    assert abs(frac - 0.5) <= 1.0 / 49.0


def test_apply_masks_identity_and_zeroing():
    rng = np.random.default_rng(2)
    ir = np.full((6, 8), 0.5)
    vi = rng.random((6, 8))
    masks = gen_mask_pair(8, 6, 4, seed=9)
    ir_m, vi_m = apply_masks(ir, vi, masks)
    ys, xs = patch_slices(masks)
    inside_ir = ir_m[ys, xs]
    assert set(np.unique(inside_ir)) <= {0.0, 0.5}
    outside = np.ones((6, 8), bool)
    outside[ys, xs] = False
    assert np.array_equal(ir_m[outside], ir[outside])
    assert np.array_equal(vi_m[outside], vi[outside])
    # per-pixel: exactly one modality survives inside the patch
    kept = (masks.m_ir[ys, xs] == 1.0) | (masks.m_vi[ys, xs] == 1.0)
    both = (masks.m_ir[ys, xs] == 1.0) & (masks.m_vi[ys, xs] == 1.0)
    assert np.all(kept) and not np.any(both)


def test_union_recovery_inside_patch():
    # the masks partition the patch, so the two masked copies sum back to the
    # source there (outside both masks are 1 and the sum doubles)
    rng = np.random.default_rng(4)
    ir = rng.random((7, 7))
    masks = gen_mask_pair(7, 7, 3, seed=11)
    union = ir * masks.m_ir + ir * masks.m_vi
    ys, xs = patch_slices(masks)
    assert np.array_equal(union[ys, xs], ir[ys, xs])
    outside = np.ones((7, 7), bool)
    outside[ys, xs] = False
    assert np.array_equal(union[outside], 2.0 * ir[outside])


def test_apply_masks_dimension_mismatch():
    masks = gen_mask_pair(6, 6, 2, seed=0)
    with pytest.raises(ValueError):
        apply_masks(np.zeros((6, 6)), np.zeros((5, 6)), masks)
    with pytest.raises(ValueError):
        apply_masks(np.zeros((4, 4)), np.zeros((4, 4)), masks)


def test_default_patch_size():
    assert default_patch_size(64, 48) == 24
    assert default_patch_size(1, 1) == 1


def test_patch_placement_uniform():
    # 8x8 image, k=4 -> 25 possible corners; 10,000 seeds, 5 sigma band
    trials = 10_000
    counts = np.zeros((5, 5))
    for seed in range(trials):
        masks = gen_mask_pair(8, 8, 4, seed=seed)
        counts[masks.patch.y0, masks.patch.x0] += 1
    p = 1.0 / 25.0
    sigma = np.sqrt(trials * p * (1 - p))
    assert np.all(np.abs(counts - trials * p) <= 5 * sigma)
