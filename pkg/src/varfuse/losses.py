"""Loss terms over the fused pixel plane.

The main objective combines a mean-absolute intensity loss against the
synthesized reference with a gradient-domain term that constrains both the
Sobel magnitude (RMS gap to a per-pixel max-selected reference gradient) and
the gradient direction (one minus mean per-pixel cosine similarity).  Norms
are size-normalized (MAE / RMS) so weights and step sizes are
resolution-independent.

Also provided: the exact analytic gradient of the total loss with respect to
the fused pixels (pulled back through the Sobel adjoint), and four classical
baseline objectives for comparison runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .image import require_plane, require_same_shape
from .reference import DEFAULT_ALPHA, ReferenceBundle, synthesize_reference
from .spatial import GradientField, magnitude, sobel, sobel_adjoint

DEFAULT_LAMBDA1 = 5.0
DEFAULT_LAMBDA2 = 1.0
DEFAULT_EPS = 1e-8

BASELINE_KINDS = ("linear", "modal_prior", "multi_modal", "max_preserve")

#: Neutral default coefficients for the baseline objectives.
BASELINE_DEFAULT_WEIGHTS = {
    "linear": {"w1": 0.5, "w2": 0.5},
    "modal_prior": {"xi": 1.0},
    "multi_modal": {"beta1": 1.0, "beta2": 1.0, "beta3": 1.0, "beta4": 1.0},
    "max_preserve": {"gamma": 1.0},
}


@dataclass
class LossWeights:
    """Weights in force: lambda1 scales the magnitude loss, lambda2 the
    direction loss, alpha blends the reference, eps guards divisions."""

    lambda1: float = DEFAULT_LAMBDA1
    lambda2: float = DEFAULT_LAMBDA2
    alpha: float = DEFAULT_ALPHA
    eps: float = DEFAULT_EPS

    def __post_init__(self) -> None:
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("loss weights lambda1/lambda2 must be nonnegative")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


@dataclass
class LossBreakdown:
    """The five loss scalars plus the weights that produced them."""

    l_int: float
    l_mag: float
    l_angle: float
    l_grad: float
    l_total: float
    weights: LossWeights = field(default_factory=LossWeights)

    def as_dict(self) -> dict[str, float]:
        return {
            "l_int": self.l_int,
            "l_mag": self.l_mag,
            "l_angle": self.l_angle,
            "l_grad": self.l_grad,
            "l_total": self.l_total,
            "lambda1": self.weights.lambda1,
            "lambda2": self.weights.lambda2,
            "alpha": self.weights.alpha,
            "eps": self.weights.eps,
        }


@dataclass
class ReferenceGradient:
    """Per-pixel winner-take-all gradient target: at each pixel the Sobel
    gradient of whichever source has the larger magnitude (ties pick vi)."""

    field: GradientField
    mag: np.ndarray
    ir_wins: np.ndarray  # boolean plane, True where the infrared gradient won


def reference_gradient(ir: np.ndarray, vi: np.ndarray) -> ReferenceGradient:
    """Max-selection of the two source gradients, pixel by pixel."""
    ir = require_plane(ir, "ir")
    vi = require_plane(vi, "vi")
    require_same_shape(ir, vi, "ir/vi")
    g_ir = sobel(ir)
    g_vi = sobel(vi)
    ir_wins = magnitude(g_ir) > magnitude(g_vi)
    gx = np.where(ir_wins, g_ir.gx, g_vi.gx)
    gy = np.where(ir_wins, g_ir.gy, g_vi.gy)
    fld = GradientField(gx=gx, gy=gy)
    return ReferenceGradient(field=fld, mag=magnitude(fld), ir_wins=ir_wins)


def loss_int(fused: np.ndarray, bundle: ReferenceBundle) -> float:
    """Mean absolute error between the fused plane and the blended reference."""
    fused = require_plane(fused, "fused")
    require_same_shape(fused, bundle.i_ref, "fused/reference")
    return float(np.mean(np.abs(fused - bundle.i_ref)))


def loss_mag(fused: np.ndarray, ref: ReferenceGradient) -> float:
    """RMS gap between the fused gradient magnitude and the reference magnitude."""
    fused = require_plane(fused, "fused")
    require_same_shape(fused, ref.mag, "fused/reference gradient")
    gap = magnitude(sobel(fused)) - ref.mag
    return float(np.sqrt(np.mean(gap * gap)))


def _cosine_map(g: GradientField, m: np.ndarray, ref: ReferenceGradient, eps: float) -> np.ndarray:
    dot = ref.field.gx * g.gx + ref.field.gy * g.gy
    cs = dot / (ref.mag * m + eps)
    # Flat-on-flat pixels carry no direction; they contribute similarity 1.
    cs[(ref.mag < eps) & (m < eps)] = 1.0
    return cs


def loss_angle(fused: np.ndarray, ref: ReferenceGradient, eps: float = DEFAULT_EPS) -> float:
    """One minus the mean per-pixel cosine similarity of the gradient fields."""
    fused = require_plane(fused, "fused")
    require_same_shape(fused, ref.mag, "fused/reference gradient")
    if eps <= 0:
        raise ValueError("eps must be positive")
    g = sobel(fused)
    return float(1.0 - np.mean(_cosine_map(g, magnitude(g), ref, eps)))


def loss_grad(
    fused: np.ndarray, ref: ReferenceGradient, weights: LossWeights | None = None
) -> tuple[float, float, float]:
    """Return (l_mag, l_angle, lambda1*l_mag + lambda2*l_angle)."""
    w = weights if weights is not None else LossWeights()
    l_mag = loss_mag(fused, ref)
    l_angle = loss_angle(fused, ref, w.eps)
    return l_mag, l_angle, w.lambda1 * l_mag + w.lambda2 * l_angle


def loss_total(
    fused: np.ndarray,
    ir: np.ndarray,
    vi: np.ndarray,
    weights: LossWeights | None = None,
    edge_sign: int = 1,
) -> LossBreakdown:
    """Full breakdown of the composite objective for one (fused, ir, vi) triple."""
    w = weights if weights is not None else LossWeights()
    bundle = synthesize_reference(ir, vi, w.alpha, edge_sign)
    ref = reference_gradient(ir, vi)
    return _breakdown(fused, bundle, ref, w)


def loss_total_grad(
    fused: np.ndarray,
    ir: np.ndarray,
    vi: np.ndarray,
    weights: LossWeights | None = None,
    edge_sign: int = 1,
) -> np.ndarray:
    """Exact gradient plane of loss_total with respect to each fused pixel.

    The reference bundle and reference gradient are constants with respect to
    the fused plane; the gradient-domain terms are chained through the
    per-pixel magnitude/cosine expressions and pulled back through the Sobel
    adjoint.  Guarded divisions reuse the forward pass eps.
    """
    w = weights if weights is not None else LossWeights()
    bundle = synthesize_reference(ir, vi, w.alpha, edge_sign)
    ref = reference_gradient(ir, vi)
    return _gradient(require_plane(fused, "fused"), bundle, ref, w)


def _breakdown(
    fused: np.ndarray,
    bundle: ReferenceBundle,
    ref: ReferenceGradient,
    w: LossWeights,
) -> LossBreakdown:
    fused = require_plane(fused, "fused")
    require_same_shape(fused, bundle.i_ref, "fused/reference")
    g = sobel(fused)
    m = magnitude(g)

    l_int = float(np.mean(np.abs(fused - bundle.i_ref)))
    gap = m - ref.mag
    l_mag = float(np.sqrt(np.mean(gap * gap)))
    l_angle = float(1.0 - np.mean(_cosine_map(g, m, ref, w.eps)))
    l_grad = w.lambda1 * l_mag + w.lambda2 * l_angle
    return LossBreakdown(
        l_int=l_int,
        l_mag=l_mag,
        l_angle=l_angle,
        l_grad=l_grad,
        l_total=l_int + l_grad,
        weights=w,
    )


def _gradient(
    fused: np.ndarray,
    bundle: ReferenceBundle,
    ref: ReferenceGradient,
    w: LossWeights,
) -> np.ndarray:
    require_same_shape(fused, bundle.i_ref, "fused/reference")
    n = fused.size
    g = sobel(fused)
    m = magnitude(g)
    inv_m = 1.0 / (m + w.eps)

    # d l_int / d fused: L1 subgradient, 0 at exact ties.
    grad = np.sign(fused - bundle.i_ref) / n

    dgx = np.zeros_like(fused)
    dgy = np.zeros_like(fused)

    if w.lambda1 != 0.0:
        gap = m - ref.mag
        l_mag = np.sqrt(np.mean(gap * gap))
        scale = w.lambda1 * gap / (n * (l_mag + w.eps))
        dgx += scale * g.gx * inv_m
        dgy += scale * g.gy * inv_m

    if w.lambda2 != 0.0:
        rx, ry = ref.field.gx, ref.field.gy
        dot = rx * g.gx + ry * g.gy
        denom = ref.mag * m + w.eps
        # d cs / d g = r/denom - dot * rmag * g / ((m + eps) * denom^2)
        common = dot * ref.mag * inv_m / (denom * denom)
        dcs_dgx = rx / denom - common * g.gx
        dcs_dgy = ry / denom - common * g.gy
        gated = (ref.mag < w.eps) & (m < w.eps)
        dcs_dgx[gated] = 0.0
        dcs_dgy[gated] = 0.0
        dgx -= w.lambda2 * dcs_dgx / n
        dgy -= w.lambda2 * dcs_dgy / n

    if w.lambda1 != 0.0 or w.lambda2 != 0.0:
        grad = grad + sobel_adjoint(GradientField(gx=dgx, gy=dgy))
    return grad


def angular_objective(
    ir: np.ndarray,
    vi: np.ndarray,
    weights: LossWeights | None = None,
    edge_sign: int = 1,
) -> tuple[
    Callable[[np.ndarray], LossBreakdown],
    Callable[[np.ndarray], np.ndarray],
    ReferenceBundle,
]:
    """Precompute the reference targets and return (value, gradient, bundle).

    The returned callables evaluate the composite loss and its gradient for a
    candidate fused plane without recomputing the constants.
    """
    w = weights if weights is not None else LossWeights()
    bundle = synthesize_reference(ir, vi, w.alpha, edge_sign)
    ref = reference_gradient(ir, vi)

    def value(fused: np.ndarray) -> LossBreakdown:
        return _breakdown(fused, bundle, ref, w)

    def gradient(fused: np.ndarray) -> np.ndarray:
        return _gradient(np.asarray(fused, dtype=np.float64), bundle, ref, w)

    return value, gradient, bundle


# ---------------------------------------------------------------------------
# Baseline objectives (classical intensity/gradient losses), size-normalized:
# L2 terms as RMS, L1 terms as MAE, gradient terms on Sobel magnitudes.
# ---------------------------------------------------------------------------


def _rms(diff: np.ndarray) -> float:
    return float(np.sqrt(np.mean(diff * diff)))


def _rms_grad(diff: np.ndarray, eps: float) -> np.ndarray:
    return diff / (diff.size * (_rms(diff) + eps))


def baseline_objective(
    kind: str,
    ir: np.ndarray,
    vi: np.ndarray,
    weights: dict[str, float] | None = None,
    eps: float = DEFAULT_EPS,
) -> tuple[Callable[[np.ndarray], LossBreakdown], Callable[[np.ndarray], np.ndarray]]:
    """Build (value, gradient) callables for one of the classical objectives.

    kinds: "linear" (RMS to a weighted source average), "modal_prior"
    (intensity to ir, gradient magnitude to vi), "multi_modal" (both terms
    against both sources), "max_preserve" (MAE to per-pixel max intensity and
    max gradient magnitude).  The returned breakdowns report the intensity
    part as l_int, the unweighted gradient part as l_mag and the weighted
    gradient part as l_grad.
    """
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline kind {kind!r}; expected one of {BASELINE_KINDS}")
    ir = require_plane(ir, "ir")
    vi = require_plane(vi, "vi")
    require_same_shape(ir, vi, "ir/vi")
    coef = dict(BASELINE_DEFAULT_WEIGHTS[kind])
    if weights:
        unknown = set(weights) - set(coef)
        if unknown:
            raise ValueError(f"unknown weights {sorted(unknown)} for baseline {kind!r}")
        coef.update(weights)

    n = ir.size
    mag_ir = magnitude(sobel(ir))
    mag_vi = magnitude(sobel(vi))

    def mag_and_field(fused: np.ndarray) -> tuple[GradientField, np.ndarray]:
        g = sobel(fused)
        return g, magnitude(g)

    def pull_back(g: GradientField, m: np.ndarray, dmag: np.ndarray) -> np.ndarray:
        inv_m = 1.0 / (m + eps)
        return sobel_adjoint(GradientField(gx=dmag * g.gx * inv_m, gy=dmag * g.gy * inv_m))

    if kind == "linear":
        target = coef["w1"] * ir + coef["w2"] * vi

        def value(fused: np.ndarray) -> LossBreakdown:
            l_int = _rms(fused - target)
            return LossBreakdown(l_int, 0.0, 0.0, 0.0, l_int)

        def gradient(fused: np.ndarray) -> np.ndarray:
            return _rms_grad(fused - target, eps)

    elif kind == "modal_prior":

        def value(fused: np.ndarray) -> LossBreakdown:
            _, m = mag_and_field(fused)
            l_int = _rms(fused - ir)
            l_mag = _rms(m - mag_vi)
            l_grad = coef["xi"] * l_mag
            return LossBreakdown(l_int, l_mag, 0.0, l_grad, l_int + l_grad)

        def gradient(fused: np.ndarray) -> np.ndarray:
            g, m = mag_and_field(fused)
            dmag = coef["xi"] * _rms_grad(m - mag_vi, eps)
            return _rms_grad(fused - ir, eps) + pull_back(g, m, dmag)

    elif kind == "multi_modal":

        def value(fused: np.ndarray) -> LossBreakdown:
            _, m = mag_and_field(fused)
            l_int = coef["beta1"] * _rms(fused - ir) + coef["beta2"] * _rms(fused - vi)
            l_mag = _rms(m - mag_ir) + _rms(m - mag_vi)
            l_grad = coef["beta3"] * _rms(m - mag_ir) + coef["beta4"] * _rms(m - mag_vi)
            return LossBreakdown(l_int, l_mag, 0.0, l_grad, l_int + l_grad)

        def gradient(fused: np.ndarray) -> np.ndarray:
            g, m = mag_and_field(fused)
            d_int = coef["beta1"] * _rms_grad(fused - ir, eps)
            d_int += coef["beta2"] * _rms_grad(fused - vi, eps)
            dmag = coef["beta3"] * _rms_grad(m - mag_ir, eps)
            dmag += coef["beta4"] * _rms_grad(m - mag_vi, eps)
            return d_int + pull_back(g, m, dmag)

    else:  # max_preserve
        target = np.maximum(ir, vi)
        mag_max = np.maximum(mag_ir, mag_vi)

        def value(fused: np.ndarray) -> LossBreakdown:
            _, m = mag_and_field(fused)
            l_int = float(np.mean(np.abs(fused - target)))
            l_mag = float(np.mean(np.abs(m - mag_max)))
            l_grad = coef["gamma"] * l_mag
            return LossBreakdown(l_int, l_mag, 0.0, l_grad, l_int + l_grad)

        def gradient(fused: np.ndarray) -> np.ndarray:
            g, m = mag_and_field(fused)
            dmag = coef["gamma"] * np.sign(m - mag_max) / n
            return np.sign(fused - target) / n + pull_back(g, m, dmag)

    return value, gradient


def baseline_loss(
    kind: str,
    fused: np.ndarray,
    ir: np.ndarray,
    vi: np.ndarray,
    weights: dict[str, float] | None = None,
) -> float:
    """Scalar value of one baseline objective on a (fused, ir, vi) triple."""
    value, _ = baseline_objective(kind, ir, vi, weights)
    return value(require_plane(fused, "fused")).l_total
