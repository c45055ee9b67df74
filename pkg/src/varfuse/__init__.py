"""Variational visible-infrared image fusion.

Fuses a registered infrared/visible pair by minimizing a composite loss
directly over the fused pixels: a mean-absolute intensity loss against a
synthesized fine-grained reference plus a gradient-domain loss constraining
both Sobel magnitude and direction.  Includes complementary-mask robustness
tooling and the eight standard fusion-quality metrics.
"""

from .image import (
    Chroma,
    Rect,
    clamp01,
    is_grayscale,
    load_image,
    recompose,
    save_image,
    to_luminance,
)
from .spatial import (
    GradientField,
    hist_equalize,
    laplacian,
    magnitude,
    sobel,
    sobel_adjoint,
)
from .masking import MaskPair, apply_masks, default_patch_size, gen_mask_pair
from .reference import ReferenceBundle, max_image, synthesize_reference
from .losses import (
    BASELINE_KINDS,
    LossBreakdown,
    LossWeights,
    ReferenceGradient,
    angular_objective,
    baseline_loss,
    baseline_objective,
    loss_angle,
    loss_grad,
    loss_int,
    loss_mag,
    loss_total,
    loss_total_grad,
    reference_gradient,
)
from .fuser import FuserConfig, FuseTrace, NumericError, fuse, fuse_masked, minimize
from .metrics import (
    MetricsReport,
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

__version__ = "0.1.0"

__all__ = [
    "Chroma",
    "Rect",
    "clamp01",
    "is_grayscale",
    "load_image",
    "recompose",
    "save_image",
    "to_luminance",
    "GradientField",
    "hist_equalize",
    "laplacian",
    "magnitude",
    "sobel",
    "sobel_adjoint",
    "MaskPair",
    "apply_masks",
    "default_patch_size",
    "gen_mask_pair",
    "ReferenceBundle",
    "max_image",
    "synthesize_reference",
    "BASELINE_KINDS",
    "LossBreakdown",
    "LossWeights",
    "ReferenceGradient",
    "angular_objective",
    "baseline_loss",
    "baseline_objective",
    "loss_angle",
    "loss_grad",
    "loss_int",
    "loss_mag",
    "loss_total",
    "loss_total_grad",
    "reference_gradient",
    "FuserConfig",
    "FuseTrace",
    "NumericError",
    "fuse",
    "fuse_masked",
    "minimize",
    "MetricsReport",
    "metric_ag",
    "metric_en",
    "metric_qabf",
    "metric_scd",
    "metric_sd",
    "metric_sf",
    "metric_ssim",
    "metric_vif",
    "metrics_all",
    "qabf_self_fidelity_ceiling",
    "__version__",
]
