"""Axis-aligned box arithmetic shared by the codec, TTA fusion, and evaluator."""

from __future__ import annotations

import math

from .errors import NonPositiveScale
from .types import BBox


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes; 0.0 when the union has no area."""
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    inter = max(ix, 0.0) * max(iy, 0.0)
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def flip_box(b: BBox, image_width: float) -> BBox:
    """Mirror a box horizontally within an image of the given width."""
    return BBox(image_width - b.x2, b.y1, image_width - b.x1, b.y2)


def rescale_box(b: BBox, sx: float, sy: float) -> BBox:
    """Map a box from a resized image back to base resolution.

    Coordinates are divided by the per-axis resize factors, so a detection
    found on an image stretched by (sx, sy) lands in base-image pixels.
    """
    if not (math.isfinite(sx) and math.isfinite(sy)) or sx <= 0 or sy <= 0:
        raise NonPositiveScale(f"scales must be positive and finite, got ({sx}, {sy})")
    return BBox(b.x1 / sx, b.y1 / sy, b.x2 / sx, b.y2 / sy)
