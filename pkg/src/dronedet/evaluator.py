"""COCO-protocol AP/AR scoring with VisDrone ignore-region handling.

AP is the 101-point interpolated average precision, averaged over the IoU
thresholds 0.50:0.05:0.95 and over every evaluated class that has ground
truth; AR is recall averaged the same way under per-image detection caps.
Category-0 regions never count as ground truth and swallow any detection
whose center falls strictly inside them; category 11 ("others") is dropped.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGroundTruth, ImageIdMismatch
from .geometry import iou
from .types import BBox, Detection, EVALUATED_CLASS_IDS, GroundTruthObject, ImageAnnotations

DEFAULT_IOU_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))
DEFAULT_MAX_DETS = (1, 10, 100, 500)
RECALL_GRID = tuple(i / 100.0 for i in range(101))


@dataclass(frozen=True)
class EvalConfig:
    """Thresholds, per-image detection caps, and the evaluated class set."""

    iou_thresholds: tuple[float, ...] = DEFAULT_IOU_THRESHOLDS
    max_dets: tuple[int, ...] = DEFAULT_MAX_DETS
    evaluated_classes: tuple[int, ...] = EVALUATED_CLASS_IDS

    def __post_init__(self) -> None:
        if not self.iou_thresholds or not all(
            0.0 < t <= 1.0 for t in self.iou_thresholds
        ):
            raise ValueError("iou_thresholds must lie in (0, 1]")
        if any(b <= a for a, b in zip(self.iou_thresholds, self.iou_thresholds[1:])):
            raise ValueError("iou_thresholds must be strictly increasing")
        if not self.max_dets or any(m < 1 for m in self.max_dets):
            raise ValueError("max_dets must be positive")
        if any(b <= a for a, b in zip(self.max_dets, self.max_dets[1:])):
            raise ValueError("max_dets must be strictly increasing")
        if not self.evaluated_classes:
            raise ValueError("evaluated_classes must be non-empty")


@dataclass(frozen=True)
class EvalResult:
    """Scores in [0, 1]; multiply by 100 at the presentation layer."""

    ap: float
    ap50: float
    ap75: float
    ar: dict[int, float]
    per_class_ap: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ap": self.ap,
            "ap50": self.ap50,
            "ap75": self.ap75,
            "ar": {str(m): v for m, v in sorted(self.ar.items())},
            "per_class_ap": {str(c): v for c, v in sorted(self.per_class_ap.items())},
        }


@dataclass(frozen=True)
class MatchResult:
    """Per-detection TP flags (score-descending order) plus bookkeeping."""

    tp_flags: tuple[bool, ...]
    scores: tuple[float, ...]
    num_gt: int

    @property
    def matched(self) -> int:
        return sum(self.tp_flags)


def filter_ignore_regions(dets: Sequence[Detection], regions: Sequence[BBox]) -> list[Detection]:
    """Drop detections whose box center lies strictly inside any region."""
    if not regions:
        return list(dets)
    kept = []
    for det in dets:
        cx, cy = det.bbox.center
        if not any(r.x1 < cx < r.x2 and r.y1 < cy < r.y2 for r in regions):
            kept.append(det)
    return kept


def match_detections(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthObject],
    iou_thresh: float,
    class_id: int,
) -> MatchResult:
    """Greedy one-to-one matching for a single class and threshold.

    Detections are visited by score descending (stable in input order); each
    takes the still-unmatched ground truth with the highest IoU, provided
    that IoU >= iou_thresh. IoU ties go to the earlier ground-truth entry.
    """
    cls_dets = sorted(
        (d for d in dets if d.class_id == class_id), key=lambda d: -d.score
    )
    cls_gts = [g for g in gts if g.category.id == class_id]
    taken = [False] * len(cls_gts)
    flags = []
    for det in cls_dets:
        best, best_iou = -1, 0.0
        for j, gt in enumerate(cls_gts):
            if taken[j]:
                continue
            overlap = iou(det.bbox, gt.bbox)
            if overlap > best_iou:
                best, best_iou = j, overlap
        if best >= 0 and best_iou >= iou_thresh:
            taken[best] = True
            flags.append(True)
        else:
            flags.append(False)
    return MatchResult(tuple(flags), tuple(d.score for d in cls_dets), len(cls_gts))


def average_precision(tp_flags: Sequence[bool], num_gt: int) -> float | None:
    """101-point interpolated AP from flags already in global score order.

    Precision is made monotone non-increasing from the right and sampled at
    recalls 0.00, 0.01, ..., 1.00. A class with no ground truth cannot be
    scored; that is signalled with None rather than 0.
    """
    if num_gt < 0:
        raise ValueError("num_gt must be >= 0")
    if num_gt == 0:
        return None
    flags = np.asarray(tp_flags, dtype=bool)
    if flags.size == 0:
        return 0.0
    tp = np.cumsum(flags)
    fp = np.cumsum(~flags)
    recall = tp / num_gt
    precision = tp / (tp + fp)
    precision = np.maximum.accumulate(precision[::-1])[::-1]
    idx = np.searchsorted(recall, np.asarray(RECALL_GRID), side="left")
    samples = np.where(idx < flags.size, precision[np.minimum(idx, flags.size - 1)], 0.0)
    return float(samples.mean())


def evaluate(
    detections: Mapping[str, Sequence[Detection]],
    annotations: Mapping[str, ImageAnnotations],
    cfg: EvalConfig | None = None,
) -> EvalResult:
    """Score a detection set against annotations over a whole image collection.

    Per image: "others"-class ground truth is dropped, detections centered in
    ignore regions are removed, and the survivors are capped per image to the
    largest max_det by score across classes. AP averages over all thresholds
    and every evaluated class with ground truth; AR at each cap averages
    matched-over-total recall the same way.
    """
    cfg = cfg or EvalConfig()
    unknown = sorted(set(detections) - set(annotations))
    if unknown:
        raise ImageIdMismatch(f"detections for unknown image ids: {unknown}")
    evaluated = set(cfg.evaluated_classes)
    cap_max = cfg.max_dets[-1]

    prepped: list[tuple[list[Detection], list[GroundTruthObject]]] = []
    gt_count = {c: 0 for c in cfg.evaluated_classes}
    for image_id in sorted(annotations):
        ann = annotations[image_id]
        if ann.image_id != image_id:
            raise ImageIdMismatch(f"key {image_id!r} holds annotations for {ann.image_id!r}")
        regions = [o.bbox for o in ann.objects if o.category.id == 0]
        gts = [o for o in ann.objects if o.category.id in evaluated]
        dets = filter_ignore_regions(detections.get(image_id, []), regions)
        dets = sorted(dets, key=lambda d: -d.score)[:cap_max]
        prepped.append((dets, gts))
        for gt in gts:
            gt_count[gt.category.id] += 1

    classes = [c for c in cfg.evaluated_classes if gt_count[c] > 0]
    if not classes:
        raise EmptyGroundTruth("no evaluated-class ground truth in any image")

    ap_by_class_thresh: dict[tuple[int, float], float] = {}
    recall_by_cap: dict[int, list[float]] = {m: [] for m in cfg.max_dets}
    for class_id in classes:
        for thresh in cfg.iou_thresholds:
            entries: list[tuple[float, bool]] = []
            for dets, gts in prepped:
                result = match_detections(dets, gts, thresh, class_id)
                entries.extend(zip(result.scores, result.tp_flags))
            entries.sort(key=lambda e: -e[0])
            ap_value = average_precision([flag for _, flag in entries], gt_count[class_id])
            ap_by_class_thresh[(class_id, thresh)] = ap_value
            for cap in cfg.max_dets:
                matched = sum(
                    match_detections(dets[:cap], gts, thresh, class_id).matched
                    for dets, gts in prepped
                )
                recall_by_cap[cap].append(matched / gt_count[class_id])

    def _mean_over(thresholds: Sequence[float]) -> float:
        values = [ap_by_class_thresh[(c, t)] for c in classes for t in thresholds]
        return float(np.mean(values))

    ap = _mean_over(cfg.iou_thresholds)
    ap50 = _mean_over([0.5]) if 0.5 in cfg.iou_thresholds else float("nan")
    ap75 = _mean_over([0.75]) if 0.75 in cfg.iou_thresholds else float("nan")
    per_class = {
        c: float(np.mean([ap_by_class_thresh[(c, t)] for t in cfg.iou_thresholds]))
        for c in classes
    }
    ar = {m: float(np.mean(recall_by_cap[m])) for m in cfg.max_dets}
    return EvalResult(ap, ap50, ap75, ar, per_class)
