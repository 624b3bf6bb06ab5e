"""RDRE frame files: a recorded or simulated frame sequence on disk.

Layout, all little-endian:

    header   magic b"RDRE", version u32, M u32, K u32, T u32, flags u8
             (bit 0: background present, bit 1: truth present)
    payload  [background frame] T frames [T truth levels as float32]

Each frame is M*K complex samples stored as interleaved float32 (real, imag),
antenna-major then frequency.
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    BadMagicError,
    DimensionMismatchError,
    FrameFileSizeError,
    UnsupportedVersionError,
)
from .radar_model import BACKGROUND_SLOT, Frame

logger = logging.getLogger(__name__)

MAGIC = b"RDRE"
FORMAT_VERSION = 1
HDR_FMT = "<4sIIIIB"  # magic, version, M, K, T, flags
HDR_SZ = struct.calcsize(HDR_FMT)

FLAG_BACKGROUND = 0x01
FLAG_TRUTH = 0x02

SAMPLE_DTYPE = np.dtype("<c8")
TRUTH_DTYPE = np.dtype("<f4")


@dataclass(frozen=True, eq=False)
class FrameFileContents:
    frames: List[Frame]
    background: Optional[Frame]
    truth: Optional[np.ndarray]
    num_antennas: int
    num_freq_points: int
    version: int = FORMAT_VERSION

    @property
    def frame_shape(self) -> Tuple[int, int]:
        return (self.num_antennas, self.num_freq_points)

    def __len__(self) -> int:
        return len(self.frames)


def write_frame_file(
    path: Union[str, Path],
    frames: Sequence[Frame],
    background: Optional[Frame] = None,
    truth: Optional[Sequence[float]] = None,
) -> Path:
    """Write frames (and optionally background and truth) in RDRE format.

    Samples are narrowed to complex64 and truth to float32.
    """
    if not frames:
        raise ValueError("a frame file needs at least one frame")
    shape = frames[0].shape
    for frame in frames:
        if frame.shape != shape:
            raise DimensionMismatchError(
                f"slot {frame.slot}: frame shape {frame.shape} differs from {shape}"
            )
    if background is not None and background.shape != shape:
        raise DimensionMismatchError(
            f"background shape {background.shape} differs from frame shape {shape}"
        )
    if truth is not None and len(truth) != len(frames):
        raise ValueError(f"{len(truth)} truth levels for {len(frames)} frames")

    flags = (FLAG_BACKGROUND if background is not None else 0) | (
        FLAG_TRUTH if truth is not None else 0
    )
    num_antennas, num_freq_points = shape
    path = Path(path)
    with open(path, "wb") as f:
        f.write(struct.pack(HDR_FMT, MAGIC, FORMAT_VERSION, num_antennas, num_freq_points,
                            len(frames), flags))
        payload = ([background] if background is not None else []) + list(frames)
        for frame in payload:
            f.write(frame.vector.astype(SAMPLE_DTYPE).tobytes())
        if truth is not None:
            f.write(np.asarray(truth, dtype=float).astype(TRUTH_DTYPE).tobytes())

    logger.debug("wrote %d frames (%dx%d, flags=%#x) to %s",
                 len(frames), num_antennas, num_freq_points, flags, path)
    return path


def read_frame_file(
    path: Union[str, Path],
    expected_shape: Optional[Tuple[int, int]] = None,
) -> FrameFileContents:
    """Parse an RDRE file.

    Args:
        path: File to read
        expected_shape: (M, K) the caller's radar configuration requires

    Raises:
        BadMagicError: If the file does not start with b"RDRE"
        UnsupportedVersionError: If the version is not FORMAT_VERSION
        FrameFileSizeError: If the payload is truncated or has trailing bytes
        DimensionMismatchError: If (M, K) differs from ``expected_shape``
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < HDR_SZ:
        if not MAGIC.startswith(data[:4]):
            raise BadMagicError(f"{path}: not an RDRE frame file")
        raise FrameFileSizeError(f"{path}: truncated header ({len(data)} of {HDR_SZ} bytes)")

    magic, version, m, k, t, flags = struct.unpack_from(HDR_FMT, data, 0)
    if magic != MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{path}: format version {version} is not supported (expected {FORMAT_VERSION})"
        )
    if expected_shape is not None and (m, k) != tuple(expected_shape):
        raise DimensionMismatchError(
            f"{path}: frames are {m}x{k} but the radar configuration expects "
            f"{expected_shape[0]}x{expected_shape[1]}"
        )

    has_background = bool(flags & FLAG_BACKGROUND)
    has_truth = bool(flags & FLAG_TRUTH)
    frame_bytes = m * k * SAMPLE_DTYPE.itemsize
    num_frames = t + (1 if has_background else 0)
    expected = HDR_SZ + num_frames * frame_bytes + (t * TRUTH_DTYPE.itemsize if has_truth else 0)
    if len(data) != expected:
        what = "truncated" if len(data) < expected else "has trailing bytes"
        raise FrameFileSizeError(
            f"{path}: payload {what} ({len(data)} bytes, header implies {expected})"
        )

    samples = np.frombuffer(data, dtype=SAMPLE_DTYPE, count=num_frames * m * k, offset=HDR_SZ)
    samples = samples.reshape(num_frames, m, k)
    background = None
    if has_background:
        background = Frame(BACKGROUND_SLOT, samples[0])
        samples = samples[1:]
    frames = [Frame(slot, block) for slot, block in enumerate(samples)]

    truth = None
    if has_truth:
        offset = HDR_SZ + num_frames * frame_bytes
        truth = np.frombuffer(data, dtype=TRUTH_DTYPE, count=t, offset=offset).astype(float)

    logger.debug("read %d frames (%dx%d) from %s", t, m, k, path)
    return FrameFileContents(
        frames=frames,
        background=background,
        truth=truth,
        num_antennas=m,
        num_freq_points=k,
        version=version,
    )
