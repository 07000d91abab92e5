"""Test-time augmentation: flip fusion at map level, multi-scale fusion at box level.

The flipped-image inference is un-flipped and averaged with the straight
maps before decoding, so single-scale decoding stays NMS-free; detections
from different scales are merged afterwards with plain greedy NMS.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .codec import DEFAULT_TOP_K, decode
from .errors import ProviderFailure, ShapeMismatch, UnknownScale
from .geometry import iou, rescale_box
from .types import BBox, Detection, DetectionMaps

DEFAULT_SCALES = (0.5, 0.75, 1.0, 1.25, 1.5)
SCALE_STEP = 0.25

MapProvider = Callable[[float, bool], DetectionMaps]


@dataclass(frozen=True)
class TtaConfig:
    """Augmentation plan: base resolution, scale grid, flip switch, fusion knobs."""

    base_resolution: int = 2048
    scales: tuple[float, ...] = DEFAULT_SCALES
    use_flip: bool = True
    nms_iou: float = 0.5
    max_dets: int = 500

    def __post_init__(self) -> None:
        if self.base_resolution <= 0:
            raise ValueError("base_resolution must be positive")
        if not self.scales:
            raise ValueError("scales must be non-empty")
        if any(s <= 0 for s in self.scales):
            raise UnknownScale(f"scales must be positive, got {self.scales}")
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError(f"scales must be strictly increasing, got {self.scales}")
        if not 0.0 <= self.nms_iou <= 1.0:
            raise ValueError("nms_iou must lie in [0, 1]")
        if self.max_dets < 1:
            raise ValueError("max_dets must be >= 1")


def scale_range(lo: float, hi: float, step: float = SCALE_STEP) -> tuple[float, ...]:
    """Arithmetic scale grid lo, lo+step, ..., hi (endpoints rounded to 2 decimals)."""
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(round((hi - lo) / step))
    grid = tuple(round(lo + i * step, 2) for i in range(count + 1))
    if not grid or grid[-1] != round(hi, 2):
        raise ValueError(f"range {lo}..{hi} is not a multiple of step {step}")
    return grid


def hflip_maps(maps: DetectionMaps) -> DetectionMaps:
    """Mirror detection maps along the x axis.

    Heat and size planes are mirrored unchanged; the offset x channel turns
    a sub-cell remainder d into 1-d (cells with d == 0 stay 0, the one edge
    case where mirroring a cell-aligned center is not representable).
    """
    heat = maps.heatmap[:, :, ::-1].copy()
    size = maps.size_map[:, :, ::-1].copy()
    off_x = maps.offset_map[0, :, ::-1]
    off_y = maps.offset_map[1, :, ::-1]
    off = np.stack([np.where(off_x > 0, 1.0 - off_x, 0.0), off_y.copy()])
    return DetectionMaps(heat, size, off, maps.stride, maps.input_width, maps.input_height)


def flip_fuse(maps: DetectionMaps, flipped_inference: DetectionMaps) -> DetectionMaps:
    """Average straight maps with the un-flipped maps of the flipped image."""
    if (
        maps.heatmap.shape != flipped_inference.heatmap.shape
        or maps.stride != flipped_inference.stride
        or (maps.input_width, maps.input_height)
        != (flipped_inference.input_width, flipped_inference.input_height)
    ):
        raise ShapeMismatch("straight and flipped maps disagree on geometry")
    restored = hflip_maps(flipped_inference)
    return DetectionMaps(
        (maps.heatmap + restored.heatmap) / 2.0,
        (maps.size_map + restored.size_map) / 2.0,
        (maps.offset_map + restored.offset_map) / 2.0,
        maps.stride,
        maps.input_width,
        maps.input_height,
    )


def nms(dets: Sequence[Detection], iou_thresh: float) -> list[Detection]:
    """Per-class greedy suppression.

    Boxes are processed by score descending (ties keep input order); a box
    survives iff its IoU with every already-kept box of the same class is
    <= iou_thresh. Output keeps the processing order, i.e. score descending.
    """
    order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
    kept: list[Detection] = []
    kept_boxes: dict[int, list[BBox]] = {}
    for i in order:
        det = dets[i]
        boxes = kept_boxes.setdefault(det.class_id, [])
        if all(iou(det.bbox, box) <= iou_thresh for box in boxes):
            kept.append(det)
            boxes.append(det.bbox)
    return kept


def fuse_multiscale(
    per_scale: Sequence[tuple[float, Sequence[Detection]]],
    cfg: TtaConfig,
) -> list[Detection]:
    """Merge per-scale detections into one base-resolution list.

    Each list is mapped back to base coordinates, everything is concatenated,
    per-class greedy NMS runs at cfg.nms_iou, and the top cfg.max_dets by
    score survive.
    """
    merged: list[Detection] = []
    for scale, dets in per_scale:
        if not scale > 0:
            raise UnknownScale(f"scale must be positive, got {scale}")
        merged.extend(
            Detection(d.class_id, rescale_box(d.bbox, scale, scale), d.score) for d in dets
        )
    return nms(merged, cfg.nms_iou)[: cfg.max_dets]


def run_tta(
    provider: MapProvider,
    cfg: TtaConfig,
    k: int = DEFAULT_TOP_K,
    score_floor: float = 0.0,
) -> list[Detection]:
    """Full augmentation pipeline over one image.

    For every scale the provider supplies maps (and, with use_flip, maps of
    the horizontally flipped image, which are fused pre-decode); the decoded
    per-scale detections are then merged by fuse_multiscale.
    """
    per_scale = []
    for scale in cfg.scales:
        maps = _provide(provider, scale, False)
        if cfg.use_flip:
            maps = flip_fuse(maps, _provide(provider, scale, True))
        per_scale.append((scale, decode(maps, k, score_floor)))
    return fuse_multiscale(per_scale, cfg)


def _provide(provider: MapProvider, scale: float, flipped: bool) -> DetectionMaps:
    maps = provider(scale, flipped)
    if maps is None:
        raise ProviderFailure(f"provider returned nothing for scale {scale}, flipped={flipped}")
    return maps
