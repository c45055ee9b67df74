"""Variational fusion: produce the fused image by first-order minimization of
the composite loss directly over the fused pixel plane.

The optimizer is adaptive moment estimation with bias correction, a fixed
iteration budget and a relative-change stopping rule.  Runs are deterministic
for fixed inputs and configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .image import clamp01, require_plane, require_same_shape
from .losses import LossBreakdown, LossWeights, angular_objective, baseline_objective
from .masking import MaskPair, apply_masks
from .reference import synthesize_reference

INIT_MODES = ("reference", "max", "average")
_ADAM_EPS = 1e-8


class NumericError(RuntimeError):
    """Raised when the loss or its gradient stops being finite."""


@dataclass
class FuserConfig:
    init: str = "reference"
    step_size: float = 1e-2
    max_iters: int = 300
    rel_tol: float = 1e-5
    betas: tuple[float, float] = (0.9, 0.999)
    weights: LossWeights = field(default_factory=LossWeights)
    project_each_step: bool = True
    edge_sign: int = 1

    def __post_init__(self) -> None:
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}, got {self.init!r}")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        b1, b2 = self.betas
        if not (0.0 <= b1 < 1.0 and 0.0 <= b2 < 1.0):
            raise ValueError("betas must lie in [0, 1)")


@dataclass
class FuseTrace:
    """Loss breakdowns recorded while fusing: the value at initialization plus
    one entry per optimizer iteration."""

    initial: LossBreakdown
    breakdowns: list[LossBreakdown]
    iterations_run: int
    terminated_by: str  # "tol" or "max_iters"

    def csv_rows(self) -> list[str]:
        rows = ["iteration,l_int,l_mag,l_angle,l_grad,l_total"]
        for i, b in enumerate([self.initial] + self.breakdowns):
            rows.append(
                f"{i},{b.l_int!r},{b.l_mag!r},{b.l_angle!r},{b.l_grad!r},{b.l_total!r}"
            )
        return rows


def minimize(
    value_fn: Callable[[np.ndarray], LossBreakdown],
    grad_fn: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    cfg: FuserConfig,
) -> tuple[np.ndarray, FuseTrace]:
    """Adaptive-moment descent on a pixel plane with relative-change stopping."""
    x = np.array(x0, dtype=np.float64, copy=True)
    b1, b2 = cfg.betas
    m = np.zeros_like(x)
    v = np.zeros_like(x)

    prev = value_fn(x)
    if not np.isfinite(prev.l_total):
        raise NumericError(f"initial loss is not finite: {prev.l_total}")
    initial = prev
    breakdowns: list[LossBreakdown] = []
    terminated_by = "max_iters"
    iterations = 0

    for t in range(1, cfg.max_iters + 1):
        g = grad_fn(x)
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient at iteration {t}")
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        x = x - cfg.step_size * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)
        if cfg.project_each_step:
            x = clamp01(x)

        cur = value_fn(x)
        if not np.isfinite(cur.l_total):
            raise NumericError(f"non-finite loss at iteration {t}: {cur.l_total}")
        breakdowns.append(cur)
        iterations = t
        if abs(cur.l_total - prev.l_total) / max(prev.l_total, 1e-12) < cfg.rel_tol:
            terminated_by = "tol"
            break
        prev = cur

    x = clamp01(x)
    trace = FuseTrace(
        initial=initial,
        breakdowns=breakdowns,
        iterations_run=iterations,
        terminated_by=terminated_by,
    )
    return x, trace


def _initial_plane(ir: np.ndarray, vi: np.ndarray, cfg: FuserConfig) -> np.ndarray:
    if cfg.init == "reference":
        return synthesize_reference(ir, vi, cfg.weights.alpha, cfg.edge_sign).i_ref
    if cfg.init == "max":
        return np.maximum(ir, vi)
    return 0.5 * (ir + vi)


def fuse(
    ir: np.ndarray,
    vi: np.ndarray,
    cfg: FuserConfig | None = None,
    objective: str = "angular",
    baseline_weights: dict[str, float] | None = None,
) -> tuple[np.ndarray, FuseTrace]:
    """Fuse one registered (ir, vi) pair by direct loss minimization.

    objective selects the loss landscape: "angular" (the composite default)
    or one of the baseline kinds, all driven through the same optimizer.
    """
    cfg = cfg if cfg is not None else FuserConfig()
    ir = require_plane(ir, "ir")
    vi = require_plane(vi, "vi")
    require_same_shape(ir, vi, "ir/vi")

    if objective == "angular":
        value_fn, grad_fn, _ = angular_objective(ir, vi, cfg.weights, cfg.edge_sign)
    else:
        value_fn, grad_fn = baseline_objective(
            objective, ir, vi, baseline_weights, cfg.weights.eps
        )
    return minimize(value_fn, grad_fn, _initial_plane(ir, vi, cfg), cfg)


def fuse_masked(
    ir: np.ndarray,
    vi: np.ndarray,
    masks: MaskPair,
    cfg: FuserConfig | None = None,
    objective: str = "angular",
) -> tuple[np.ndarray, FuseTrace]:
    """Apply complementary masks, then fuse the masked pair (the
    information-missing robustness protocol)."""
    ir_m, vi_m = apply_masks(ir, vi, masks)
    return fuse(ir_m, vi_m, cfg, objective)
