import struct

import numpy as np
import pytest

from dronedet import DetectionMaps, read_maps, write_maps
from dronedet.mapfile import HEADER_SIZE, MAGIC, VERSION
from dronedet.errors import (
    BadMagic,
    CorruptFile,
    DimensionMismatch,
    UnsupportedVersion,
)


def random_maps(rng, num_classes=3, height=6, width=9, stride=4):
    heat = rng.random((num_classes, height, width), dtype=np.float32)
    size = (rng.random((2, height, width), dtype=np.float32) * 100).astype(np.float32)
    offset = rng.random((2, height, width), dtype=np.float32)
    return DetectionMaps(heat, size, offset, stride, width * stride, height * stride)


def header_bytes(
    magic=MAGIC, version=VERSION, num_classes=1, height=2, width=2, stride=4,
    input_w=None, input_h=None,
):
    input_w = width * stride if input_w is None else input_w
    input_h = height * stride if input_h is None else input_h
    return struct.pack("<4s7I", magic, version, num_classes, height, width, stride, input_w, input_h)


class TestWriteMaps:
    def test_byte_length(self):
        maps = DetectionMaps(
            np.zeros((1, 2, 2), np.float32),
            np.zeros((2, 2, 2), np.float32),
            np.zeros((2, 2, 2), np.float32),
            4, 8, 8,
        )
        data = write_maps(maps)
        assert len(data) == 32 + (1 + 2 + 2) * 4 * 4 == 112
        assert data[:4] == b"CNHM"

    def test_header_fields(self, rng):
        maps = random_maps(rng, num_classes=5, height=3, width=7, stride=2)
        data = write_maps(maps)
        fields = struct.unpack_from("<4s7I", data)
        assert fields == (b"CNHM", 1, 5, 3, 7, 2, 14, 6)


class TestRoundTrip:
    def test_bit_exact_on_random_maps(self, rng):
        for _ in range(25):
            maps = random_maps(
                rng,
                num_classes=int(rng.integers(1, 8)),
                height=int(rng.integers(1, 20)),
                width=int(rng.integers(1, 20)),
                stride=int(rng.integers(1, 8)),
            )
            again = read_maps(write_maps(maps))
            assert np.array_equal(again.heatmap, maps.heatmap)
            assert np.array_equal(again.size_map, maps.size_map)
            assert np.array_equal(again.offset_map, maps.offset_map)
            assert (again.stride, again.input_width, again.input_height) == (
                maps.stride, maps.input_width, maps.input_height,
            )
            assert write_maps(again) == write_maps(maps)

    def test_preserves_special_values(self):
        heat = np.array([[[0.0, 1.0], [np.float32(1e-45), np.float32(3.4e38)]]], np.float32)
        maps = DetectionMaps(
            heat, np.zeros((2, 2, 2), np.float32), np.zeros((2, 2, 2), np.float32), 1, 2, 2
        )
        again = read_maps(write_maps(maps))
        assert np.array_equal(again.heatmap, heat)


class TestReadValidation:
    def test_bad_magic(self):
        data = header_bytes(magic=b"XXXX") + b"\x00" * 80
        with pytest.raises(BadMagic):
            read_maps(data)

    def test_unsupported_version(self):
        data = header_bytes(version=2) + b"\x00" * 80
        with pytest.raises(UnsupportedVersion):
            read_maps(data)

    def test_dimension_mismatch(self):
        data = header_bytes(input_w=9) + b"\x00" * 80
        with pytest.raises(DimensionMismatch):
            read_maps(data)

    def test_zero_stride(self):
        data = header_bytes(stride=0, input_w=0, input_h=0) + b"\x00" * 80
        with pytest.raises(DimensionMismatch):
            read_maps(data)

    def test_truncated_payload(self, rng):
        data = write_maps(random_maps(rng))
        with pytest.raises(CorruptFile):
            read_maps(data[:-4])

    def test_trailing_garbage(self, rng):
        data = write_maps(random_maps(rng))
        with pytest.raises(CorruptFile):
            read_maps(data + b"\x00")

    def test_shorter_than_header(self):
        with pytest.raises(CorruptFile):
            read_maps(b"CNHM\x01")

    def test_header_size_constant(self):
        assert HEADER_SIZE == 32
