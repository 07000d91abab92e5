"""Readers and writers for VisDrone-format annotation and result files.

Annotation files carry one object per line as eight comma-separated integers:

    left,top,width,height,score_flag,category,truncation,occlusion

Result files use the submission format, with a real-valued score in field 5
and literal ``-1,-1`` tail fields:

    left,top,width,height,score,category,-1,-1

CRLF line endings and trailing commas are accepted on input; emitted files
use LF and ASCII digits only. Box coordinates are rounded to integers at
emission time, scores are printed with six decimal places.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

from .errors import (
    DronedetError,
    InvalidGeometry,
    InvalidScore,
    MalformedLine,
)
from .types import BBox, Category, Detection, GroundTruthObject, ImageAnnotations

ANNOTATION_FIELD_COUNT = 8
DETECTION_FIELD_COUNT = 6  # fields 7-8 are the constant -1,-1 tail


def _fields(line: str) -> list[str]:
    return line.strip().rstrip(",").split(",")


def _int_field(raw: str, position: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise MalformedLine(f"field {position} is not an integer: {raw!r}") from None


def _float_field(raw: str, position: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise MalformedLine(f"field {position} is not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise MalformedLine(f"field {position} is not finite: {raw!r}")
    return value


def parse_annotation_line(line: str) -> GroundTruthObject:
    """Parse one annotation record into a ground-truth object.

    Raises MalformedLine on bad field count or non-integer fields,
    InvalidGeometry on non-positive width/height, InvalidCategory on
    category ids outside 0..11.
    """
    parts = _fields(line)
    if len(parts) < ANNOTATION_FIELD_COUNT:
        raise MalformedLine(
            f"expected at least {ANNOTATION_FIELD_COUNT} fields, got {len(parts)}"
        )
    values = [_int_field(raw, i + 1) for i, raw in enumerate(parts[:ANNOTATION_FIELD_COUNT])]
    left, top, width, height, score_flag, category_id, truncation, occlusion = values
    if width <= 0 or height <= 0:
        raise InvalidGeometry(f"non-positive box size {width}x{height}")
    category = Category.from_id(category_id)
    bbox = BBox(left, top, left + width, top + height)
    return GroundTruthObject(bbox, score_flag, category, truncation, occlusion)


def load_annotations(content: str, image_id: str) -> ImageAnnotations:
    """Parse a whole annotation file; blank lines are skipped, order is kept.

    Line errors are re-raised with the 1-based line number prepended.
    """
    objects = []
    for number, raw in enumerate(content.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            objects.append(parse_annotation_line(raw))
        except DronedetError as err:
            raise type(err)(f"line {number}: {err}") from err
    return ImageAnnotations(image_id, tuple(objects))


def write_annotations(objects: Iterable[GroundTruthObject]) -> str:
    """Emit annotation-format text; coordinates are rounded to integers."""
    lines = []
    for obj in objects:
        b = obj.bbox
        left, top = _emit_int(b.x1), _emit_int(b.y1)
        width, height = _emit_int(b.width), _emit_int(b.height)
        if width <= 0 or height <= 0:
            raise InvalidGeometry(f"box {b} collapses at integer precision")
        lines.append(
            f"{left},{top},{width},{height},{obj.score_flag},"
            f"{obj.category.id},{obj.truncation},{obj.occlusion}"
        )
    return "".join(line + "\n" for line in lines)


def parse_detection_line(line: str) -> Detection:
    """Parse one result record; coordinates may be real-valued on input."""
    parts = _fields(line)
    if len(parts) < DETECTION_FIELD_COUNT:
        raise MalformedLine(
            f"expected at least {DETECTION_FIELD_COUNT} fields, got {len(parts)}"
        )
    left = _float_field(parts[0], 1)
    top = _float_field(parts[1], 2)
    width = _float_field(parts[2], 3)
    height = _float_field(parts[3], 4)
    score = _float_field(parts[4], 5)
    category_id = _int_field(parts[5], 6)
    if width <= 0 or height <= 0:
        raise InvalidGeometry(f"non-positive box size {width}x{height}")
    if not 0.0 <= score <= 1.0:
        raise InvalidScore(f"score {score} outside [0, 1]")
    Category.from_id(category_id)  # bounds check only
    return Detection(category_id, BBox(left, top, left + width, top + height), score)


def load_detections(content: str) -> list[Detection]:
    """Parse a result file into detections in file order."""
    detections = []
    for number, raw in enumerate(content.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            detections.append(parse_detection_line(raw))
        except DronedetError as err:
            raise type(err)(f"line {number}: {err}") from err
    return detections


def write_detections(detections: Sequence[Detection]) -> str:
    """Emit result-format text, one line per detection.

    Scores must lie in [0, 1] and are printed with six decimals; boxes are
    rounded to integer left/top/width/height. Re-parsing the emitted text
    reproduces the written values exactly at that precision.
    """
    lines = []
    for det in detections:
        if not 0.0 <= det.score <= 1.0:
            raise InvalidScore(f"score {det.score} outside [0, 1]")
        b = det.bbox
        left, top = _emit_int(b.x1), _emit_int(b.y1)
        width, height = _emit_int(b.width), _emit_int(b.height)
        if width <= 0 or height <= 0:
            raise InvalidGeometry(f"box {b} collapses at integer precision")
        lines.append(f"{left},{top},{width},{height},{det.score:.6f},{det.class_id},-1,-1")
    return "".join(line + "\n" for line in lines)


def _emit_int(value: float) -> int:
    return int(round(value))
