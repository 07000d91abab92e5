"""Deterministic report rendering: markdown and CSV tables, SVG bar charts.

All percentages are printed with two decimals. Output is assembled from
plain f-strings so identical inputs give byte-identical text on every
platform.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import EmptyReport, UnknownFormat
from .evaluator import EvalResult
from .types import CATEGORY_NAMES

REPORT_FORMATS = ("csv", "markdown", "svg")

_SHORT_CLASS_LABELS = {
    1: "ped",
    2: "people",
    3: "bicycle",
    4: "car",
    5: "van",
    6: "truck",
    7: "tricycle",
    8: "awn",
    9: "bus",
    10: "motor",
}


@dataclass(frozen=True)
class SweepRow:
    """One labelled result row of a sweep table."""

    label: str
    metrics: EvalResult


def render_report(rows: Sequence[SweepRow], format: str) -> str:
    """Render sweep rows as csv, markdown, or an SVG per-class bar chart."""
    if format not in REPORT_FORMATS:
        raise UnknownFormat(f"format must be one of {REPORT_FORMATS}, got {format!r}")
    if not rows:
        raise EmptyReport("no rows to render")
    ar_keys = sorted(rows[0].metrics.ar)
    if any(sorted(row.metrics.ar) != ar_keys for row in rows):
        raise ValueError("rows disagree on AR cap set")
    if format == "markdown":
        return _render_markdown(rows, ar_keys)
    if format == "csv":
        return _render_csv(rows, ar_keys)
    return _render_svg(rows[0])


def _pct(value: float) -> str:
    return f"{value * 100:.2f}"


def _class_label(class_id: int) -> str:
    if class_id in _SHORT_CLASS_LABELS:
        return _SHORT_CLASS_LABELS[class_id]
    if 0 <= class_id < len(CATEGORY_NAMES):
        return CATEGORY_NAMES[class_id]
    return str(class_id)


def _metric_cells(metrics: EvalResult, ar_keys: Sequence[int]) -> list[str]:
    cells = [_pct(metrics.ap), _pct(metrics.ap50), _pct(metrics.ap75)]
    cells.extend(_pct(metrics.ar[m]) for m in ar_keys)
    return cells


def _per_class_rows(rows: Sequence[SweepRow]) -> tuple[list[SweepRow], list[int]]:
    with_classes = [r for r in rows if r.metrics.per_class_ap]
    if not with_classes:
        return [], []
    class_ids = sorted(with_classes[0].metrics.per_class_ap)
    if any(sorted(r.metrics.per_class_ap) != class_ids for r in with_classes):
        raise ValueError("rows disagree on per-class id set")
    return with_classes, class_ids


def _md_row(cells: Sequence[str]) -> str:
    return "| " + " | ".join(cells) + " |"


def _render_markdown(rows: Sequence[SweepRow], ar_keys: Sequence[int]) -> str:
    headers = ["Method", "AP", "AP50", "AP75"] + [f"AR{m}" for m in ar_keys]
    lines = [_md_row(headers), _md_row(["---"] * len(headers))]
    for row in rows:
        lines.append(_md_row([row.label] + _metric_cells(row.metrics, ar_keys)))
    class_rows, class_ids = _per_class_rows(rows)
    if class_rows:
        lines.append("")
        headers = ["Method"] + [_class_label(c) for c in class_ids]
        lines.append(_md_row(headers))
        lines.append(_md_row(["---"] * len(headers)))
        for row in class_rows:
            cells = [row.label] + [_pct(row.metrics.per_class_ap[c]) for c in class_ids]
            lines.append(_md_row(cells))
    return "\n".join(lines) + "\n"


def _render_csv(rows: Sequence[SweepRow], ar_keys: Sequence[int]) -> str:
    class_rows, class_ids = _per_class_rows(rows)
    include_classes = bool(class_ids) and len(class_rows) == len(rows)
    headers = ["label", "ap", "ap50", "ap75"] + [f"ar{m}" for m in ar_keys]
    if include_classes:
        headers.extend(_class_label(c) for c in class_ids)
    lines = [",".join(headers)]
    for row in rows:
        cells = [row.label] + _metric_cells(row.metrics, ar_keys)
        if include_classes:
            cells.extend(_pct(row.metrics.per_class_ap[c]) for c in class_ids)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _render_svg(row: SweepRow) -> str:
    """Per-class AP bar chart of a single row."""
    per_class = row.metrics.per_class_ap
    if not per_class:
        raise EmptyReport(f"row {row.label!r} has no per-class values to chart")
    class_ids = sorted(per_class)
    bar_w, slot_w, left, plot_h, base_y = 40, 60, 60, 280, 320
    width = left + slot_w * len(class_ids) + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="380" '
        f'viewBox="0 0 {width} 380">',
        f"  <title>Per-class AP: {row.label}</title>",
        f'  <line x1="{left - 10}" y1="{base_y}" x2="{width - 10}" y2="{base_y}" '
        f'stroke="#222" stroke-width="1"/>',
    ]
    for i, class_id in enumerate(class_ids):
        value = per_class[class_id]
        bar_h = value * plot_h
        x = left + i * slot_w
        y = base_y - bar_h
        parts.append(
            f'  <rect x="{x}" y="{y:.2f}" width="{bar_w}" height="{bar_h:.2f}" fill="#4878a8"/>'
        )
        parts.append(
            f'  <text x="{x + bar_w / 2:.1f}" y="{y - 6:.2f}" font-size="11" '
            f'text-anchor="middle">{_pct(value)}</text>'
        )
        parts.append(
            f'  <text x="{x + bar_w / 2:.1f}" y="{base_y + 16}" font-size="11" '
            f'text-anchor="middle">{_class_label(class_id)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def sweep_rows_from_json(text: str) -> list[SweepRow]:
    """Load SweepRows from a JSON list of {label, ap, ap50, ap75, ar, per_class_ap}."""
    raw = json.loads(text)
    if not isinstance(raw, list):
        raise ValueError("sweep rows JSON must be a list")
    rows = []
    for entry in raw:
        metrics = EvalResult(
            ap=float(entry["ap"]),
            ap50=float(entry["ap50"]),
            ap75=float(entry["ap75"]),
            ar={int(k): float(v) for k, v in entry["ar"].items()},
            per_class_ap={int(k): float(v) for k, v in entry.get("per_class_ap", {}).items()},
        )
        rows.append(SweepRow(str(entry["label"]), metrics))
    return rows
