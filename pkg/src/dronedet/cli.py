"""Command-line interface.

Subcommands:

    encode    annotations -> synthetic oracle maps (.cnhm per scale/flip)
    decode    .cnhm maps -> VisDrone result files (plain single-map decode)
    eval      result files + annotations -> AP/AR JSON
    tta-eval  .cnhm map directory + TTA config -> AP/AR JSON
    report    sweep rows JSON -> csv / markdown / svg

Every flag can also be supplied through a JSON config file (--config);
explicit flags win over config values. Exit codes: 0 success, 1 validation
error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .codec import decode
from .errors import DronedetError, ProviderFailure
from .evaluator import EvalConfig, evaluate
from .mapfile import read_maps, write_maps
from .oracle import oracle_provider
from .report import REPORT_FORMATS, render_report, sweep_rows_from_json
from .tta import DEFAULT_SCALES, TtaConfig, run_tta, scale_range
from .types import Detection, PreprocessSpec
from .visdrone_io import load_annotations, load_detections, write_detections

_DEFAULTS = {
    "resolution": PreprocessSpec().test_resolution,
    "stride": 4,
    "num_classes": 10,
    "scales": (1.0,),
    "flip": False,
    "noise": 0.0,
    "seed": 0,
    "topk": 500,
    "score_floor": 0.0,
    "nms_iou": 0.5,
    "max_dets": 500,
    "jobs": 1,
    "format": "markdown",
}


def parse_scale_list(value) -> tuple[float, ...]:
    """Accept a JSON list, "a,b,c" enumeration, or "lo:hi[:step]" range."""
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    text = str(value).strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) == 2:
            return scale_range(parts[0], parts[1])
        if len(parts) == 3:
            return scale_range(parts[0], parts[1], parts[2])
        raise ValueError(f"bad scale range {text!r}")
    return tuple(float(p) for p in text.split(","))


def _merged(args: argparse.Namespace, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    config = getattr(args, "_config", {})
    if key in config:
        return config[key]
    return _DEFAULTS.get(key) if default is None else default


def _map_name(image_id: str, scale: float, flipped: bool) -> str:
    return f"{image_id}_s{scale:g}_{'f' if flipped else 'n'}.cnhm"


def _collect(path: Path, suffix: str) -> list[Path]:
    if path.is_dir():
        return sorted(path.glob(f"*{suffix}"))
    if path.is_file():
        return [path]
    raise FileNotFoundError(f"no such file or directory: {path}")


def _read_annotation_dir(path: Path) -> dict:
    files = _collect(path, ".txt")
    return {f.stem: load_annotations(f.read_text(), f.stem) for f in files}


def _run_jobs(worker, items, jobs: int) -> list:
    if jobs <= 1:
        return [worker(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, items))


def _write_or_print(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_encode(args: argparse.Namespace) -> int:
    scales = parse_scale_list(_merged(args, "scales"))
    flip = bool(_merged(args, "flip"))
    resolution = int(_merged(args, "resolution"))
    stride = int(_merged(args, "stride"))
    num_classes = int(_merged(args, "num_classes"))
    noise = float(_merged(args, "noise"))
    seed = int(_merged(args, "seed"))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = TtaConfig(base_resolution=resolution, scales=scales, use_flip=flip)

    def encode_one(ann_file: Path) -> int:
        anns = load_annotations(ann_file.read_text(), ann_file.stem)
        provider = oracle_provider(anns, cfg, noise, seed, stride, num_classes)
        written = 0
        for scale in scales:
            for flipped in ((False, True) if flip else (False,)):
                maps = provider(scale, flipped)
                (out_dir / _map_name(anns.image_id, scale, flipped)).write_bytes(write_maps(maps))
                written += 1
        return written

    files = _collect(Path(args.annotations), ".txt")
    counts = _run_jobs(encode_one, files, int(_merged(args, "jobs")))
    print(f"wrote {sum(counts)} map files for {len(files)} images to {out_dir}")
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    topk = int(_merged(args, "topk"))
    floor = float(_merged(args, "score_floor"))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def decode_one(map_file: Path) -> int:
        maps = read_maps(map_file.read_bytes())
        dets = decode(maps, topk, floor)
        # boxes thinner than one pixel cannot be represented in the result format
        writable = [d for d in dets if round(d.bbox.width) >= 1 and round(d.bbox.height) >= 1]
        dropped = len(dets) - len(writable)
        if dropped:
            print(f"warning: {map_file.name}: dropped {dropped} sub-pixel boxes", file=sys.stderr)
        (out_dir / f"{map_file.stem}.txt").write_text(write_detections(writable))
        return len(writable)

    files = _collect(Path(args.maps), ".cnhm")
    counts = _run_jobs(decode_one, files, int(_merged(args, "jobs")))
    print(f"wrote {len(files)} result files ({sum(counts)} detections) to {out_dir}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    annotations = _read_annotation_dir(Path(args.annotations))
    detections: dict[str, list[Detection]] = {}
    for f in _collect(Path(args.results), ".txt"):
        detections[f.stem] = load_detections(f.read_text())
    result = evaluate(detections, annotations, EvalConfig())
    _write_or_print(json.dumps(result.to_dict(), indent=2, sort_keys=True), args.out)
    return 0


def _cmd_tta_eval(args: argparse.Namespace) -> int:
    scales = parse_scale_list(_merged(args, "scales", DEFAULT_SCALES))
    cfg = TtaConfig(
        base_resolution=int(_merged(args, "resolution")),
        scales=scales,
        use_flip=bool(_merged(args, "flip", True)),
        nms_iou=float(_merged(args, "nms_iou")),
        max_dets=int(_merged(args, "max_dets")),
    )
    topk = int(_merged(args, "topk"))
    floor = float(_merged(args, "score_floor"))
    maps_dir = Path(args.maps)
    annotations = _read_annotation_dir(Path(args.annotations))

    def file_provider(image_id: str):
        def provider(scale: float, flipped: bool):
            path = maps_dir / _map_name(image_id, scale, flipped)
            if not path.is_file():
                raise ProviderFailure(f"missing map file {path.name}")
            return read_maps(path.read_bytes())

        return provider

    image_ids = sorted(annotations)
    det_lists = _run_jobs(
        lambda iid: run_tta(file_provider(iid), cfg, topk, floor),
        image_ids,
        int(_merged(args, "jobs")),
    )
    detections = dict(zip(image_ids, det_lists))
    result = evaluate(detections, annotations, EvalConfig())
    _write_or_print(json.dumps(result.to_dict(), indent=2, sort_keys=True), args.out)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    rows = sweep_rows_from_json(Path(args.rows).read_text())
    text = render_report(rows, str(_merged(args, "format")))
    _write_or_print(text, args.out)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file supplying defaults for any flag")
    parser.add_argument("--jobs", type=int, help="process images concurrently (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dronedet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="render oracle maps from annotation files")
    p.add_argument("annotations", help="annotation file or directory")
    p.add_argument("--out", required=True, help="output directory for .cnhm files")
    p.add_argument("--resolution", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--num-classes", dest="num_classes", type=int)
    p.add_argument("--scales", help='e.g. "1" or "0.5,1,1.5" or "0.5:1.5"')
    p.add_argument("--flip", action=argparse.BooleanOptionalAction)
    p.add_argument("--noise", type=float)
    p.add_argument("--seed", type=int)
    _add_common(p)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="decode .cnhm maps into result files")
    p.add_argument("maps", help=".cnhm file or directory")
    p.add_argument("--out", required=True, help="output directory for result files")
    p.add_argument("--topk", type=int)
    p.add_argument("--score-floor", dest="score_floor", type=float)
    _add_common(p)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("eval", help="score result files against annotations")
    p.add_argument("--results", required=True, help="result file directory")
    p.add_argument("--annotations", required=True, help="annotation file directory")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    _add_common(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("tta-eval", help="run flip/multi-scale fusion over a map directory, then score")
    p.add_argument("--maps", required=True, help=".cnhm directory")
    p.add_argument("--annotations", required=True, help="annotation file directory")
    p.add_argument("--resolution", type=int)
    p.add_argument("--scales", help='e.g. "0.5:1.5" (step 0.25) or "0.5,1,1.5"')
    p.add_argument("--flip", action=argparse.BooleanOptionalAction)
    p.add_argument("--nms-iou", dest="nms_iou", type=float)
    p.add_argument("--max-dets", dest="max_dets", type=int)
    p.add_argument("--topk", type=int)
    p.add_argument("--score-floor", dest="score_floor", type=float)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    _add_common(p)
    p.set_defaults(func=_cmd_tta_eval)

    p = sub.add_parser("report", help="render sweep rows as a table or chart")
    p.add_argument("rows", help="JSON file of sweep rows")
    p.add_argument("--format", choices=REPORT_FORMATS)
    p.add_argument("--out", help="write rendered report here instead of stdout")
    _add_common(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = {}
    if getattr(args, "config", None):
        config = json.loads(Path(args.config).read_text())
        if "scales" in config:
            config["scales"] = parse_scale_list(config["scales"])
    args._config = config
    try:
        return args.func(args)
    except (DronedetError, ValueError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
