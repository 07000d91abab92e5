"""Run a pretrained center-point detector and dump its raw heads.

The checkpoint must be a TorchScript module mapping a normalized float32
batch (1, 3, S, S) to three tensors: a per-class probability heatmap
(1, C, S/R, S/R), a size head (1, 2, S/R, S/R) in input pixels, and a
sub-cell offset head (1, 2, S/R, S/R). One CNHM file is written per
(scale, flip) branch as <image_id>_s<scale>_<f|n>.cnhm.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from .cnhm import write_cnhm
from .preprocess import preprocess_image

SUPPORTED_RESOLUTIONS = (512, 1024, 2048)


class ModelLoadFailure(Exception):
    """Checkpoint missing or not a loadable TorchScript module."""


class UnreadableImage(Exception):
    """Image file missing or undecodable."""


@dataclass(frozen=True)
class ExportJob:
    """What to export: images, destination, and the inference grid."""

    image_paths: tuple[Path, ...]
    out_dir: Path
    resolution: int = 2048
    scales: tuple[float, ...] = (1.0,)
    flip: bool = False
    stride: int = 4

    def __post_init__(self) -> None:
        if self.resolution not in SUPPORTED_RESOLUTIONS:
            raise ValueError(f"resolution must be one of {SUPPORTED_RESOLUTIONS}")
        if not self.scales or any(s <= 0 for s in self.scales):
            raise ValueError(f"scales must be positive, got {self.scales}")
        for scale in self.scales:
            side = self.resolution * scale
            if abs(side - round(side)) > 1e-9 or int(round(side)) % self.stride:
                raise ValueError(
                    f"scale {scale} of {self.resolution} is not divisible by stride {self.stride}"
                )

    def branches(self) -> list[tuple[float, bool]]:
        flips = (False, True) if self.flip else (False,)
        return [(scale, flipped) for scale in self.scales for flipped in flips]


def load_model(path: Path) -> torch.jit.ScriptModule:
    try:
        model = torch.jit.load(str(path), map_location="cpu")
    except Exception as err:
        raise ModelLoadFailure(f"cannot load TorchScript checkpoint {path}: {err}") from err
    model.eval()
    return model


def _load_image(path: Path) -> Image.Image:
    try:
        with Image.open(path) as img:
            return img.convert("RGB")
    except (OSError, UnidentifiedImageError) as err:
        raise UnreadableImage(f"cannot read image {path}: {err}") from err


def _run_heads(model, batch: torch.Tensor, side: int, stride: int):
    with torch.no_grad():
        heads = model(batch)
    if not isinstance(heads, (tuple, list)) or len(heads) != 3:
        raise ValueError("model must return (heatmap, size, offset)")
    heat, size, offset = (h.squeeze(0).cpu().numpy().astype(np.float32) for h in heads)
    cells = side // stride
    if heat.ndim != 3 or heat.shape[1:] != (cells, cells):
        raise ValueError(f"heatmap shape {heat.shape} does not match side {side} / stride {stride}")
    if size.shape != (2, cells, cells) or offset.shape != (2, cells, cells):
        raise ValueError(f"regression head shapes {size.shape}, {offset.shape} unexpected")
    # the format guarantees heatmap values in [0, 1]; clamp float fuzz
    return np.clip(heat, 0.0, 1.0), size, offset


def export_image(job: ExportJob, model, image_path: Path) -> list[Path]:
    """Export one image; returns the written file paths, one per branch."""
    image = _load_image(image_path)
    image_id = image_path.stem
    job.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for scale, flipped in job.branches():
        side = int(round(job.resolution * scale))
        chw = preprocess_image(image, side, flip=flipped)
        batch = torch.from_numpy(chw).unsqueeze(0)
        heat, size, offset = _run_heads(model, batch, side, job.stride)
        data = write_cnhm(heat, size, offset, job.stride, side, side)
        path = job.out_dir / f"{image_id}_s{scale:g}_{'f' if flipped else 'n'}.cnhm"
        path.write_bytes(data)
        written.append(path)
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnhm-export",
        description="dump raw center-point detector heads to CNHM files",
    )
    parser.add_argument("images", nargs="+", help="image files to export")
    parser.add_argument("--model", required=True, help="TorchScript checkpoint path")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--resolution", type=int, default=2048, choices=SUPPORTED_RESOLUTIONS)
    parser.add_argument("--scales", default="1", help='e.g. "1" or "0.5,0.75,1"')
    parser.add_argument("--flip", action="store_true", help="also export mirrored branches")
    parser.add_argument("--stride", type=int, default=4)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = ExportJob(
            image_paths=tuple(Path(p) for p in args.images),
            out_dir=Path(args.out),
            resolution=args.resolution,
            scales=tuple(float(s) for s in args.scales.split(",")),
            flip=args.flip,
            stride=args.stride,
        )
        model = load_model(Path(args.model))
        total = 0
        for image_path in job.image_paths:
            total += len(export_image(job, model, image_path))
    except (ModelLoadFailure, UnreadableImage, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2
    print(f"wrote {total} map files for {len(job.image_paths)} images to {job.out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
