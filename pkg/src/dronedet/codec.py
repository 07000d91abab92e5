"""Center-point heatmap codec.

Encodes ground-truth boxes into per-class center heatmaps plus size and
offset regression maps, and decodes such maps back into detections. An
object is represented by a single peak at the cell containing its box
midpoint; the offset map recovers the sub-cell position lost to striding
and the size map carries width/height in input pixels, which makes the
encode/decode round trip exact.
"""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np
from scipy import ndimage

from .errors import (
    CenterOutOfBounds,
    InvalidCategory,
    InvalidOverlap,
    ObjectOutOfBounds,
    ShapeMismatch,
    StrideMismatch,
)
from .types import BBox, Detection, DetectionMaps, GroundTruthObject, Peak

DEFAULT_STRIDE = 4
DEFAULT_NUM_CLASSES = 10
DEFAULT_MIN_OVERLAP = 0.7
DEFAULT_TOP_K = 500


def gaussian_radius(w_cells: float, h_cells: float, min_overlap: float = DEFAULT_MIN_OVERLAP) -> float:
    """Largest corner-perturbation radius keeping IoU >= min_overlap.

    Considers the three standard perturbation cases of a w x h box (both
    corners moved outward, both inward, both shifted the same way), solves
    each as a quadratic in the radius, and returns the minimum root, i.e.
    the largest radius every case tolerates.
    """
    if not 0.0 < min_overlap <= 1.0:
        raise InvalidOverlap(f"min_overlap {min_overlap} outside (0, 1]")
    if w_cells <= 0 or h_cells <= 0:
        raise ValueError(f"box size must be positive, got {w_cells}x{h_cells}")
    w, h, o = float(w_cells), float(h_cells), float(min_overlap)
    area = w * h
    perim = w + h

    # both corners shifted in the same direction: same-size box, offset r
    c1 = (1.0 - o) / (1.0 + o) * area
    r1 = (perim - math.sqrt(perim * perim - 4.0 * c1)) / 2.0

    # both corners moved inward: (w-2r)(h-2r) >= o*wh
    r2 = (perim - math.sqrt(perim * perim - 4.0 * (1.0 - o) * area)) / 4.0

    # both corners moved outward: wh >= o*(w+2r)(h+2r)
    r3 = (-2.0 * o * perim + math.sqrt(4.0 * o * o * perim * perim + 16.0 * o * (1.0 - o) * area)) / (8.0 * o)

    return max(min(r1, r2, r3), 0.0)


def splat_gaussian(heatmap_plane: np.ndarray, center: tuple[int, int], radius: float) -> np.ndarray:
    """Max-blend a truncated gaussian bump onto a copy of one heatmap plane.

    Cells within Chebyshev distance ceil(radius) of the center receive
    max(old, exp(-d^2 / (2 sigma^2))) with sigma = max(radius, 1)/3 and d the
    Euclidean cell distance; the center cell becomes exactly 1.
    """
    out = np.array(heatmap_plane, dtype=np.float64, copy=True)
    _splat_inplace(out, center, radius)
    return out


def _splat_inplace(plane: np.ndarray, center: tuple[int, int], radius: float) -> None:
    height, width = plane.shape
    px, py = center
    if not (0 <= px < width and 0 <= py < height):
        raise CenterOutOfBounds(f"center {center} outside {width}x{height} map")
    window = int(math.ceil(radius))
    sigma = max(radius, 1.0) / 3.0
    x0, x1 = max(px - window, 0), min(px + window, width - 1)
    y0, y1 = max(py - window, 0), min(py + window, height - 1)
    ys, xs = np.ogrid[y0 : y1 + 1, x0 : x1 + 1]
    d2 = (xs - px) ** 2 + (ys - py) ** 2
    bump = np.exp(-d2 / (2.0 * sigma * sigma))
    region = plane[y0 : y1 + 1, x0 : x1 + 1]
    np.maximum(region, bump, out=region)
    plane[py, px] = 1.0


def encode_targets(
    objects: Iterable[GroundTruthObject],
    input_w: int,
    input_h: int,
    stride: int = DEFAULT_STRIDE,
    num_classes: int = DEFAULT_NUM_CLASSES,
    min_overlap: float = DEFAULT_MIN_OVERLAP,
) -> DetectionMaps:
    """Render ground-truth objects into heatmap / size / offset targets.

    Each object contributes a gaussian peak on its class plane at the cell
    containing its box midpoint; the cell's size entry holds (width, height)
    in input pixels and its offset entry the sub-cell center remainder.
    When two same-class objects land in one cell the later object wins the
    regression entries while the heatmap keeps the element-wise max.
    """
    if stride < 1 or input_w % stride or input_h % stride:
        raise StrideMismatch(f"input {input_w}x{input_h} not divisible by stride {stride}")
    width, height = input_w // stride, input_h // stride
    heatmap = np.zeros((num_classes, height, width), dtype=np.float64)
    size_map = np.zeros((2, height, width), dtype=np.float64)
    offset_map = np.zeros((2, height, width), dtype=np.float64)

    for obj in objects:
        class_id = obj.category.id
        if not 1 <= class_id <= num_classes:
            raise InvalidCategory(f"category {class_id} not encodable with {num_classes} classes")
        cx, cy = obj.bbox.center
        px, py = int(math.floor(cx / stride)), int(math.floor(cy / stride))
        if not (0 <= px < width and 0 <= py < height):
            raise ObjectOutOfBounds(f"center ({cx}, {cy}) outside {input_w}x{input_h} input")
        w, h = obj.bbox.width, obj.bbox.height
        radius = gaussian_radius(math.ceil(w / stride), math.ceil(h / stride), min_overlap)
        _splat_inplace(heatmap[class_id - 1], (px, py), radius)
        size_map[0, py, px] = w
        size_map[1, py, px] = h
        offset_map[0, py, px] = cx / stride - px
        offset_map[1, py, px] = cy / stride - py

    return DetectionMaps(heatmap, size_map, offset_map, stride, input_w, input_h)


def extract_peaks(heatmap: np.ndarray, k: int = DEFAULT_TOP_K, score_floor: float = 0.0) -> list[Peak]:
    """Top-k local maxima of a (C, H, W) heatmap.

    A cell is a peak iff its value is >= all 8 neighbours (out-of-bounds
    neighbours count as -inf) and >= score_floor. Peaks are returned by
    score descending, ties broken by (class_id, py, px) ascending.
    """
    heat = np.asarray(heatmap, dtype=np.float64)
    if heat.ndim != 3:
        raise ShapeMismatch(f"heatmap must be (C, H, W), got {heat.shape}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    window_max = ndimage.maximum_filter(heat, size=(1, 3, 3), mode="constant", cval=-np.inf)
    mask = (heat >= window_max) & (heat >= score_floor)
    classes, ys, xs = np.nonzero(mask)
    scores = heat[classes, ys, xs]
    order = np.lexsort((xs, ys, classes, -scores))[:k]
    return [
        Peak(class_id=int(classes[i]) + 1, px=int(xs[i]), py=int(ys[i]), score=float(scores[i]))
        for i in order
    ]


def decode(maps: DetectionMaps, k: int = DEFAULT_TOP_K, score_floor: float = 0.0) -> list[Detection]:
    """Turn detection maps into boxes: one detection per surviving peak.

    The center is (px + dx, py + dy) * stride, width/height come straight
    from the size map, and the box is clamped to the input bounds. Output
    is sorted by score descending; no NMS is applied.
    """
    maps.validate()
    stride = maps.stride
    detections = []
    for peak in extract_peaks(maps.heatmap, k, score_floor):
        dx = float(maps.offset_map[0, peak.py, peak.px])
        dy = float(maps.offset_map[1, peak.py, peak.px])
        w = max(float(maps.size_map[0, peak.py, peak.px]), 0.0)
        h = max(float(maps.size_map[1, peak.py, peak.px]), 0.0)
        cx = (peak.px + dx) * stride
        cy = (peak.py + dy) * stride
        x1 = min(max(cx - w / 2.0, 0.0), float(maps.input_width))
        y1 = min(max(cy - h / 2.0, 0.0), float(maps.input_height))
        x2 = min(max(cx + w / 2.0, 0.0), float(maps.input_width))
        y2 = min(max(cy + h / 2.0, 0.0), float(maps.input_height))
        detections.append(Detection(peak.class_id, BBox(x1, y1, x2, y2), peak.score))
    return detections
