"""CNHM binary interchange format for detection maps.

Layout, all little-endian:

    magic   4 bytes  "CNHM"
    u32     version (currently 1)
    u32     num_classes, height, width, stride, input_width, input_height
    f32[]   heatmap planes, then size planes, then offset planes, row-major

Values are stored as 32-bit IEEE-754, so the write/read round trip is
bit-exact for float32 payloads; wider inputs are quantized on write.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import BadMagic, CorruptFile, DimensionMismatch, UnsupportedVersion
from .types import DetectionMaps

MAGIC = b"CNHM"
VERSION = 1
_HEADER = struct.Struct("<4s7I")
HEADER_SIZE = _HEADER.size  # 32 bytes
_FLOAT = np.dtype("<f4")


@dataclass(frozen=True)
class MapFileHeader:
    magic: bytes
    version: int
    num_classes: int
    height: int
    width: int
    stride: int
    input_width: int
    input_height: int


def write_maps(maps: DetectionMaps) -> bytes:
    """Serialize detection maps; inverse of read_maps."""
    maps.validate()
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        maps.num_classes,
        maps.height,
        maps.width,
        maps.stride,
        maps.input_width,
        maps.input_height,
    )
    planes = b"".join(
        np.ascontiguousarray(arr, dtype=_FLOAT).tobytes()
        for arr in (maps.heatmap, maps.size_map, maps.offset_map)
    )
    return header + planes


def read_header(data: bytes) -> MapFileHeader:
    if len(data) < HEADER_SIZE:
        raise CorruptFile(f"file shorter than the {HEADER_SIZE}-byte header")
    magic, version, num_classes, height, width, stride, input_w, input_h = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"version {version} not supported (expected {VERSION})")
    if stride < 1:
        raise DimensionMismatch(f"stride must be >= 1, got {stride}")
    if input_w != width * stride or input_h != height * stride:
        raise DimensionMismatch(
            f"input dims ({input_w}, {input_h}) != map dims ({width}, {height}) x stride {stride}"
        )
    return MapFileHeader(magic, version, num_classes, height, width, stride, input_w, input_h)


def read_maps(data: bytes) -> DetectionMaps:
    """Deserialize detection maps, validating magic, version, and dimensions."""
    header = read_header(data)
    cells = header.height * header.width
    expected = HEADER_SIZE + (header.num_classes + 4) * cells * _FLOAT.itemsize
    if len(data) != expected:
        raise CorruptFile(f"payload is {len(data)} bytes, expected {expected}")
    flat = np.frombuffer(data, dtype=_FLOAT, offset=HEADER_SIZE)
    split = header.num_classes * cells
    heat = flat[:split].reshape(header.num_classes, header.height, header.width).copy()
    size = flat[split : split + 2 * cells].reshape(2, header.height, header.width).copy()
    offset = flat[split + 2 * cells :].reshape(2, header.height, header.width).copy()
    return DetectionMaps(heat, size, offset, header.stride, header.input_width, header.input_height)
