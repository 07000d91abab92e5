"""Training objective at desk scale: penalty-reduced focal loss and masked L1.

No network or optimizer lives here; the functions exist so the target
encoding can be checked against an analytically differentiable objective.
TrainConfig is a frozen record of the training hyperparameters and is not
consumed by any computation.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    CellOutOfBounds,
    NonPositiveObjectCount,
    ShapeMismatch,
)
from .types import IMAGENET_MEAN, IMAGENET_STD, DetectionMaps

#: Clamp applied to predictions before any log, keeping the loss finite.
PROB_CLAMP = 1e-4


@dataclass(frozen=True)
class LossWeights:
    """Term weights and focal exponents (peak exponent alpha, tail down-weight beta)."""

    lambda_size: float = 0.1
    lambda_off: float = 1.0
    alpha: float = 2.0
    beta: float = 4.0

    def __post_init__(self) -> None:
        if min(self.lambda_size, self.lambda_off, self.alpha, self.beta) < 0:
            raise ValueError("loss weights must be non-negative")


@dataclass(frozen=True)
class TrainConfig:
    """Descriptive record of the training schedule; nothing consumes it."""

    initial_lr: float = 2.5e-4
    lr_drop_epochs: tuple[int, ...] = (90, 120)
    lr_drop_factor: int = 10
    optimizer_name: str = "ADAM"
    train_resolution: int = 1024
    normalization_mean: tuple[float, float, float] = IMAGENET_MEAN
    normalization_std: tuple[float, float, float] = IMAGENET_STD


def _check_shapes(pred: np.ndarray, target: np.ndarray) -> None:
    if pred.shape != target.shape:
        raise ShapeMismatch(f"pred {pred.shape} vs target {target.shape}")


def focal_loss(
    pred: np.ndarray,
    target: np.ndarray,
    num_objects: int,
    alpha: float = 2.0,
    beta: float = 4.0,
) -> float:
    """Penalty-reduced focal loss over a heatmap.

    Cells where target == 1 contribute (1-p)^alpha * log(p); all other cells
    contribute (1-t)^beta * p^alpha * log(1-p). The sum is negated and
    divided by num_objects. Predictions are clamped to [1e-4, 1-1e-4].
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check_shapes(pred, target)
    if num_objects < 1:
        raise NonPositiveObjectCount(f"num_objects must be >= 1, got {num_objects}")
    p = np.clip(pred, PROB_CLAMP, 1.0 - PROB_CLAMP)
    pos = target == 1.0
    pos_term = ((1.0 - p) ** alpha * np.log(p))[pos].sum()
    neg_term = ((1.0 - target) ** beta * p**alpha * np.log(1.0 - p))[~pos].sum()
    return float(-(pos_term + neg_term) / num_objects)


def focal_loss_grad(
    pred: np.ndarray,
    target: np.ndarray,
    num_objects: int,
    alpha: float = 2.0,
    beta: float = 4.0,
) -> np.ndarray:
    """Exact partial derivative of focal_loss with respect to each prediction.

    Cells pushed outside the clamp range have zero gradient.
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check_shapes(pred, target)
    if num_objects < 1:
        raise NonPositiveObjectCount(f"num_objects must be >= 1, got {num_objects}")
    p = np.clip(pred, PROB_CLAMP, 1.0 - PROB_CLAMP)
    pos = target == 1.0
    one_minus_p = 1.0 - p
    d_pos = -alpha * one_minus_p ** (alpha - 1.0) * np.log(p) + one_minus_p**alpha / p
    d_neg = (1.0 - target) ** beta * (
        alpha * p ** (alpha - 1.0) * np.log(one_minus_p) - p**alpha / one_minus_p
    )
    grad = np.where(pos, d_pos, d_neg) / -float(num_objects)
    grad[(pred < PROB_CLAMP) | (pred > 1.0 - PROB_CLAMP)] = 0.0
    return grad


def masked_l1_loss(
    pred: np.ndarray,
    target: np.ndarray,
    object_cells: Sequence[tuple[int, int]],
    num_objects: int,
) -> float:
    """Mean absolute regression error over the object cells only.

    object_cells holds (px, py) map coordinates; both channels of every
    listed cell contribute. num_objects == 0 returns 0 by convention.
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check_shapes(pred, target)
    if num_objects < 0:
        raise NonPositiveObjectCount(f"num_objects must be >= 0, got {num_objects}")
    if num_objects == 0:
        return 0.0
    _, height, width = pred.shape
    total = 0.0
    for px, py in object_cells:
        if not (0 <= px < width and 0 <= py < height):
            raise CellOutOfBounds(f"cell ({px}, {py}) outside {width}x{height} map")
        total += float(np.abs(pred[:, py, px] - target[:, py, px]).sum())
    return total / num_objects


def object_cells_of(target_heatmap: np.ndarray) -> list[tuple[int, int]]:
    """Cells holding an exact-1.0 peak on any class plane, row-major order."""
    ys, xs = np.nonzero(np.asarray(target_heatmap).max(axis=0) == 1.0)
    return [(int(x), int(y)) for x, y in zip(xs, ys)]


def total_loss(preds: DetectionMaps, targets: DetectionMaps, weights: LossWeights = LossWeights()) -> float:
    """Focal term plus weighted size and offset L1 terms.

    Object cells and the normalizing count are recovered from the exact-1.0
    peaks of the target heatmap, so targets produced by encode_targets work
    unchanged.
    """
    for name, a, b in (
        ("heatmap", preds.heatmap, targets.heatmap),
        ("size_map", preds.size_map, targets.size_map),
        ("offset_map", preds.offset_map, targets.offset_map),
    ):
        if a.shape != b.shape:
            raise ShapeMismatch(f"{name}: pred {a.shape} vs target {b.shape}")
    cells = object_cells_of(targets.heatmap)
    count = len(cells)
    focal = focal_loss(preds.heatmap, targets.heatmap, max(count, 1), weights.alpha, weights.beta)
    size_l1 = masked_l1_loss(preds.size_map, targets.size_map, cells, count)
    off_l1 = masked_l1_loss(preds.offset_map, targets.offset_map, cells, count)
    return focal + weights.lambda_size * size_l1 + weights.lambda_off * off_l1
