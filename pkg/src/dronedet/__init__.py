"""Center-point detection post-processing and evaluation toolkit.

Covers the full path from VisDrone-format annotations through heatmap
encoding/decoding, flip and multi-scale test-time augmentation fusion, and
COCO-protocol AP/AR scoring, with a binary map format and a synthetic
oracle so the pipeline can be verified without trained weights.
"""

from . import errors
from .codec import decode, encode_targets, extract_peaks, gaussian_radius, splat_gaussian
from .evaluator import (
    EvalConfig,
    EvalResult,
    MatchResult,
    average_precision,
    evaluate,
    filter_ignore_regions,
    match_detections,
)
from .geometry import flip_box, iou, rescale_box
from .loss import (
    LossWeights,
    TrainConfig,
    focal_loss,
    focal_loss_grad,
    masked_l1_loss,
    total_loss,
)
from .mapfile import MapFileHeader, read_maps, write_maps
from .oracle import oracle_provider
from .report import SweepRow, render_report, sweep_rows_from_json
from .tta import (
    TtaConfig,
    flip_fuse,
    fuse_multiscale,
    hflip_maps,
    nms,
    run_tta,
    scale_range,
)
from .types import (
    CATEGORY_NAMES,
    EVALUATED_CLASS_IDS,
    BBox,
    Category,
    Detection,
    DetectionMaps,
    GroundTruthObject,
    ImageAnnotations,
    Peak,
    PreprocessSpec,
)
from .visdrone_io import (
    load_annotations,
    load_detections,
    parse_annotation_line,
    parse_detection_line,
    write_annotations,
    write_detections,
)

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "CATEGORY_NAMES",
    "Category",
    "Detection",
    "DetectionMaps",
    "EVALUATED_CLASS_IDS",
    "EvalConfig",
    "EvalResult",
    "GroundTruthObject",
    "ImageAnnotations",
    "LossWeights",
    "MapFileHeader",
    "MatchResult",
    "Peak",
    "PreprocessSpec",
    "SweepRow",
    "TrainConfig",
    "TtaConfig",
    "average_precision",
    "decode",
    "encode_targets",
    "errors",
    "evaluate",
    "extract_peaks",
    "filter_ignore_regions",
    "flip_box",
    "flip_fuse",
    "focal_loss",
    "focal_loss_grad",
    "fuse_multiscale",
    "gaussian_radius",
    "hflip_maps",
    "iou",
    "load_annotations",
    "load_detections",
    "masked_l1_loss",
    "match_detections",
    "nms",
    "oracle_provider",
    "parse_annotation_line",
    "parse_detection_line",
    "read_maps",
    "render_report",
    "rescale_box",
    "run_tta",
    "scale_range",
    "splat_gaussian",
    "sweep_rows_from_json",
    "total_loss",
    "write_annotations",
    "write_detections",
    "write_maps",
]
