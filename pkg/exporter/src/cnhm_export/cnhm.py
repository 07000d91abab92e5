"""Writer for the CNHM binary map format.

Little-endian layout: 4-byte magic "CNHM", u32 version (1), u32 num_classes,
height, width, stride, input_width, input_height, then row-major float32
planes: heatmap (C), size (2), offset (2). Kept independent of any reader
implementation so the format itself stays the interchange contract.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"CNHM"
VERSION = 1
_HEADER = struct.Struct("<4s7I")


def write_cnhm(
    heatmap: np.ndarray,
    size_map: np.ndarray,
    offset_map: np.ndarray,
    stride: int,
    input_width: int,
    input_height: int,
) -> bytes:
    num_classes, height, width = heatmap.shape
    if size_map.shape != (2, height, width) or offset_map.shape != (2, height, width):
        raise ValueError(
            f"head shapes disagree: heat {heatmap.shape}, size {size_map.shape}, "
            f"offset {offset_map.shape}"
        )
    if input_width != width * stride or input_height != height * stride:
        raise ValueError(
            f"input {input_width}x{input_height} != map {width}x{height} at stride {stride}"
        )
    header = _HEADER.pack(
        MAGIC, VERSION, num_classes, height, width, stride, input_width, input_height
    )
    planes = b"".join(
        np.ascontiguousarray(arr, dtype="<f4").tobytes()
        for arr in (heatmap, size_map, offset_map)
    )
    return header + planes
