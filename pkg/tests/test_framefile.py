"""Tests for the RDRE frame file format."""

import struct

import numpy as np
import pytest

from radareye.errors import (
    BadMagicError,
    DimensionMismatchError,
    FrameFileError,
    FrameFileSizeError,
    UnsupportedVersionError,
)
from radareye.framefile import (
    FLAG_BACKGROUND,
    FLAG_TRUTH,
    HDR_FMT,
    HDR_SZ,
    MAGIC,
    read_frame_file,
    write_frame_file,
)
from radareye.radar_model import BACKGROUND_SLOT, Frame


def random_frames(count=3, shape=(2, 5), seed=0):
    rng = np.random.default_rng(seed)
    return [
        Frame(t, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        for t in range(count)
    ]


def test_header_layout(tmp_path):
    """Test the header fields and total size."""
    frames = random_frames()
    path = write_frame_file(tmp_path / "a.rdre", frames, background=frames[0], truth=[0.1, 0.2, 0.3])
    data = path.read_bytes()
    assert HDR_SZ == 21
    magic, version, m, k, t, flags = struct.unpack_from(HDR_FMT, data)
    assert (magic, version, m, k, t) == (MAGIC, 1, 2, 5, 3)
    assert flags == FLAG_BACKGROUND | FLAG_TRUTH
    assert len(data) == HDR_SZ + 4 * 2 * 5 * 8 + 3 * 4


def test_round_trip(tmp_path):
    """Test reading back gives the complex64-narrowed samples and float32 truth."""
    frames = random_frames()
    background = Frame(BACKGROUND_SLOT, np.full((2, 5), 0.5 - 0.25j))
    truth = [0.0, 0.0123, 0.07]
    path = write_frame_file(tmp_path / "a.rdre", frames, background, truth)

    contents = read_frame_file(path)
    assert len(contents) == 3
    assert contents.frame_shape == (2, 5)
    assert contents.version == 1
    for original, loaded in zip(frames, contents.frames):
        assert loaded.slot == original.slot
        np.testing.assert_array_equal(loaded.samples, original.samples.astype(np.complex64))
    assert contents.background.slot == BACKGROUND_SLOT
    np.testing.assert_array_equal(contents.background.samples, background.samples)
    np.testing.assert_array_equal(contents.truth, np.asarray(truth, dtype=np.float32))


def test_rewrite_is_byte_identical(tmp_path):
    """Test write(read(file)) reproduces the file exactly."""
    frames = random_frames(seed=1)
    first = write_frame_file(tmp_path / "a.rdre", frames, frames[1], [0.01, 0.02, 0.03])
    contents = read_frame_file(first)
    second = write_frame_file(
        tmp_path / "b.rdre", contents.frames, contents.background, contents.truth
    )
    assert first.read_bytes() == second.read_bytes()


def test_optional_sections(tmp_path):
    """Test files without background and truth."""
    path = write_frame_file(tmp_path / "bare.rdre", random_frames(count=2))
    contents = read_frame_file(path)
    assert contents.background is None
    assert contents.truth is None
    assert struct.unpack_from(HDR_FMT, path.read_bytes())[5] == 0


def test_write_validation(tmp_path):
    with pytest.raises(ValueError):
        write_frame_file(tmp_path / "x.rdre", [])
    mixed = random_frames(count=1) + random_frames(count=1, shape=(3, 5))
    with pytest.raises(DimensionMismatchError):
        write_frame_file(tmp_path / "x.rdre", mixed)
    with pytest.raises(ValueError):
        write_frame_file(tmp_path / "x.rdre", random_frames(count=2), truth=[0.1])


def test_bad_magic(tmp_path):
    path = write_frame_file(tmp_path / "a.rdre", random_frames())
    data = bytearray(path.read_bytes())
    data[:4] = b"JUNK"
    path.write_bytes(bytes(data))
    with pytest.raises(BadMagicError):
        read_frame_file(path)

    short = tmp_path / "short.rdre"
    short.write_bytes(b"PK")
    with pytest.raises(BadMagicError):
        read_frame_file(short)


def test_unsupported_version(tmp_path):
    path = write_frame_file(tmp_path / "a.rdre", random_frames())
    data = bytearray(path.read_bytes())
    data[4:8] = struct.pack("<I", 2)
    path.write_bytes(bytes(data))
    with pytest.raises(UnsupportedVersionError):
        read_frame_file(path)


def test_truncated_and_trailing(tmp_path):
    """Test payload size mismatches in both directions."""
    path = write_frame_file(tmp_path / "a.rdre", random_frames(), truth=[0.1, 0.2, 0.3])
    data = path.read_bytes()

    truncated = tmp_path / "truncated.rdre"
    truncated.write_bytes(data[:-1])
    with pytest.raises(FrameFileSizeError, match="truncated"):
        read_frame_file(truncated)

    trailing = tmp_path / "trailing.rdre"
    trailing.write_bytes(data + b"\x00")
    with pytest.raises(FrameFileSizeError, match="trailing"):
        read_frame_file(trailing)

    header_only = tmp_path / "header.rdre"
    header_only.write_bytes(data[:10])
    with pytest.raises(FrameFileSizeError):
        read_frame_file(header_only)


def test_dimension_mismatch(tmp_path):
    path = write_frame_file(tmp_path / "a.rdre", random_frames())
    assert read_frame_file(path, expected_shape=(2, 5)).frame_shape == (2, 5)
    with pytest.raises(DimensionMismatchError) as excinfo:
        read_frame_file(path, expected_shape=(4, 128))
    assert isinstance(excinfo.value, FrameFileError)
