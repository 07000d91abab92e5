"""Core domain records shared across the toolkit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidCategory,
    InvalidGeometry,
    InvalidScore,
    ShapeMismatch,
)

#: VisDrone category vocabulary, indexed by id. Ids 1..10 are evaluated;
#: 0 marks ignore regions and 11 ("others") is excluded from scoring.
CATEGORY_NAMES = (
    "ignored",
    "pedestrian",
    "people",
    "bicycle",
    "car",
    "van",
    "truck",
    "tricycle",
    "awning-tricycle",
    "bus",
    "motor",
    "others",
)

EVALUATED_CLASS_IDS = tuple(range(1, 11))

#: Community-standard ImageNet channel statistics (RGB).
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class Category:
    """One entry of the VisDrone category vocabulary."""

    id: int
    name: str

    def __post_init__(self) -> None:
        if not 0 <= self.id <= 11:
            raise InvalidCategory(f"category id {self.id} outside 0..11")

    @classmethod
    def from_id(cls, category_id: int) -> "Category":
        return cls(category_id, CATEGORY_NAMES[category_id] if 0 <= category_id <= 11 else "")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in corner form, sub-pixel input-image coordinates."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        coords = (self.x1, self.y1, self.x2, self.y2)
        if not all(math.isfinite(c) for c in coords):
            raise InvalidGeometry(f"non-finite coordinates {coords}")
        if self.x2 < self.x1 or self.y2 < self.y1:
            raise InvalidGeometry(f"inverted box {coords}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0


@dataclass(frozen=True)
class GroundTruthObject:
    """One annotation record: box, ignore flag, category, truncation, occlusion."""

    bbox: BBox
    score_flag: int
    category: Category
    truncation: int
    occlusion: int

    def __post_init__(self) -> None:
        if self.bbox.width <= 0 or self.bbox.height <= 0:
            raise InvalidGeometry(f"degenerate ground-truth box {self.bbox}")


@dataclass(frozen=True)
class ImageAnnotations:
    """All ground-truth objects of one image, in file order."""

    image_id: str
    objects: tuple[GroundTruthObject, ...]

    def __post_init__(self) -> None:
        if not self.image_id:
            raise ValueError("image_id must be non-empty")


@dataclass(frozen=True)
class Peak:
    """A local maximum of one heatmap plane, in map-cell coordinates."""

    class_id: int
    px: int
    py: int
    score: float


@dataclass(frozen=True)
class Detection:
    """A scored, classified box in input-image coordinates."""

    class_id: int
    bbox: BBox
    score: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.score):
            raise InvalidScore(f"non-finite score {self.score}")


@dataclass(eq=False)
class DetectionMaps:
    """Per-image model output: class heatmap plus size and offset regressions.

    heatmap is (C, H, W) with values in [0, 1]; size_map is (2, H, W) holding
    object width/height in input pixels; offset_map is (2, H, W) holding the
    sub-cell center offset (x then y channel). stride is the input-pixels-per-
    cell downsampling factor R with input_width == W * R, input_height == H * R.
    """

    heatmap: np.ndarray
    size_map: np.ndarray
    offset_map: np.ndarray
    stride: int
    input_width: int
    input_height: int

    @property
    def num_classes(self) -> int:
        return int(self.heatmap.shape[0])

    @property
    def height(self) -> int:
        return int(self.heatmap.shape[1])

    @property
    def width(self) -> int:
        return int(self.heatmap.shape[2])

    def validate(self) -> "DetectionMaps":
        if self.heatmap.ndim != 3:
            raise ShapeMismatch(f"heatmap must be (C, H, W), got {self.heatmap.shape}")
        _, h, w = self.heatmap.shape
        for name, arr in (("size_map", self.size_map), ("offset_map", self.offset_map)):
            if arr.shape != (2, h, w):
                raise ShapeMismatch(f"{name} must be (2, {h}, {w}), got {arr.shape}")
        if self.stride < 1:
            raise DimensionMismatch(f"stride must be >= 1, got {self.stride}")
        if self.input_width != w * self.stride or self.input_height != h * self.stride:
            raise DimensionMismatch(
                f"input dims ({self.input_width}, {self.input_height}) != map dims "
                f"({w}, {h}) x stride {self.stride}"
            )
        return self


@dataclass(frozen=True)
class PreprocessSpec:
    """Inference-time preprocessing constants applied by map exporters."""

    test_resolution: int = 2048
    normalization_mean: tuple[float, float, float] = IMAGENET_MEAN
    normalization_std: tuple[float, float, float] = IMAGENET_STD

    def __post_init__(self) -> None:
        if self.test_resolution <= 0:
            raise ValueError("test_resolution must be positive")
