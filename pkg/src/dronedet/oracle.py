"""Synthetic perfect-inference provider.

Stands in for a trained network: for any requested (scale, flip) branch it
re-derives the ground-truth boxes in that branch's frame, encodes perfect
maps, and optionally perturbs the heatmap with seeded uniform noise. This
makes the whole decode / TTA / evaluation pipeline verifiable end to end
without weights or imagery.
"""

from __future__ import annotations

import numpy as np

from .codec import encode_targets
from .errors import StrideMismatch
from .geometry import flip_box
from .tta import MapProvider, TtaConfig
from .types import BBox, DetectionMaps, GroundTruthObject, ImageAnnotations


def oracle_provider(
    annotations: ImageAnnotations,
    cfg: TtaConfig,
    noise: float = 0.0,
    seed: int = 0,
    stride: int = 4,
    num_classes: int = 10,
) -> MapProvider:
    """Build a (scale, flipped) -> DetectionMaps source from ground truth.

    Boxes are treated as base-resolution coordinates, multiplied into the
    scaled frame (and mirrored for flip branches) before encoding. noise > 0
    adds uniform heatmap noise of that amplitude, clamped back to [0, 1];
    the noise stream is derived from (seed, scale, flip) so results do not
    depend on call order. noise == 0 returns bit-exact encoded maps.
    """
    if noise < 0:
        raise ValueError(f"noise must be >= 0, got {noise}")
    evaluated = [
        o for o in annotations.objects if 1 <= o.category.id <= num_classes
    ]

    def provider(scale: float, flipped: bool) -> DetectionMaps:
        input_res = int(round(cfg.base_resolution * scale))
        if abs(cfg.base_resolution * scale - input_res) > 1e-9:
            raise StrideMismatch(
                f"scale {scale} of base {cfg.base_resolution} is not an integer resolution"
            )
        objects = []
        for obj in evaluated:
            box = _scale_box(obj.bbox, scale)
            if flipped:
                box = flip_box(box, input_res)
            objects.append(
                GroundTruthObject(box, obj.score_flag, obj.category, obj.truncation, obj.occlusion)
            )
        maps = encode_targets(objects, input_res, input_res, stride, num_classes)
        if noise > 0:
            rng = np.random.default_rng([seed, int(round(scale * 10000)), int(flipped)])
            jitter = rng.uniform(-noise, noise, maps.heatmap.shape)
            maps.heatmap = np.clip(maps.heatmap + jitter, 0.0, 1.0)
        return maps

    return provider


def _scale_box(b: BBox, scale: float) -> BBox:
    return BBox(b.x1 * scale, b.y1 * scale, b.x2 * scale, b.y2 * scale)
