"""Shared fixtures: seeded random scenes with codec-friendly placement."""

from __future__ import annotations

import math

import numpy as np
import pytest

from dronedet import BBox, Category, GroundTruthObject
from dronedet.geometry import iou


def make_scene(
    rng: np.random.Generator,
    *,
    input_w: int = 2048,
    input_h: int = 2048,
    stride: int = 4,
    num_classes: int = 10,
    max_objects: int = 20,
    min_size: float = 8.0,
    max_size: float = 300.0,
    cell_gap: int = 6,
    max_same_class_iou: float = 0.45,
) -> list[GroundTruthObject]:
    """Random boxes with globally distinct center cells.

    Centers never share a map cell (the size/offset entries of a cell hold
    one object, whatever its class), same-class centers stay cell_gap cells
    apart (keeping cells distinct at every scale down to 2 / cell_gap), and
    same-class overlap stays below max_same_class_iou. On such scenes the
    encode/decode round trip and NMS fusion are lossless.
    """
    count = int(rng.integers(1, max_objects + 1))
    objects: list[GroundTruthObject] = []
    placed: list[tuple[int, float, float, BBox]] = []
    used_cells: set[tuple[int, int]] = set()
    attempts = 0
    while len(objects) < count and attempts < 100 * count:
        attempts += 1
        class_id = int(rng.integers(1, num_classes + 1))
        w = float(rng.uniform(min_size, min(max_size, input_w - 4)))
        h = float(rng.uniform(min_size, min(max_size, input_h - 4)))
        cx = float(rng.uniform(w / 2 + 1, input_w - w / 2 - 1))
        cy = float(rng.uniform(h / 2 + 1, input_h - h / 2 - 1))
        px, py = math.floor(cx / stride), math.floor(cy / stride)
        if (px, py) in used_cells:
            continue
        box = BBox(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)
        clash = False
        for other_class, ox, oy, obox in placed:
            if other_class != class_id:
                continue
            if max(abs(px - math.floor(ox / stride)), abs(py - math.floor(oy / stride))) < cell_gap:
                clash = True
                break
            if iou(box, obox) > max_same_class_iou:
                clash = True
                break
        if clash:
            continue
        used_cells.add((px, py))
        placed.append((class_id, cx, cy, box))
        objects.append(GroundTruthObject(box, 1, Category.from_id(class_id), 0, 0))
    return objects


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
