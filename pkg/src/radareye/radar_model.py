"""Radar parameters and multipath frame synthesis.

A frame is the M x K matrix of complex samples seen by an M-element uniform
linear array at K frequency points. Each propagation path contributes

    alpha * exp(-j 2 pi f_k tau) * exp(-j 2 pi f_k m d cos(theta) / c)

for antenna index m = 0..M-1, with the transmitted waveform fixed to 1.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .geometry import SPEED_OF_LIGHT

logger = logging.getLogger(__name__)

BACKGROUND_SLOT = -1


class PathLabel(str, Enum):
    """Ground-truth tag of a simulated reflector. Never visible to estimators."""

    LIQUID_SURFACE = "LiquidSurface"
    GRIPPER = "Gripper"
    SOURCE_CONTAINER = "SourceContainer"
    DESKTOP = "Desktop"
    OTHER = "Other"

    @classmethod
    def parse(cls, value: str) -> "PathLabel":
        key = value.strip().replace("_", "").replace("-", "").lower()
        for label in cls:
            if label.value.lower() == key or label.name.replace("_", "").lower() == key:
                return label
        raise ValueError(f"unknown path label {value!r}")


@dataclass(frozen=True)
class RadarConfig:
    """Array geometry and stepped-frequency waveform."""

    carrier_frequency: float  # Hz, centre of the frequency sweep
    bandwidth: float  # Hz
    num_antennas: int  # M
    num_freq_points: int  # K
    element_spacing: Optional[float] = None  # m, half wavelength when omitted
    noise_std: float = 0.0  # per real/imag component

    def __post_init__(self):
        if self.element_spacing is None:
            object.__setattr__(
                self, "element_spacing", SPEED_OF_LIGHT / (2.0 * self.carrier_frequency)
            )
        self._validate_config()

    def _validate_config(self):
        if self.num_antennas < 1:
            raise ValueError(f"num_antennas must be >= 1, got {self.num_antennas}")
        if self.num_freq_points < 1:
            raise ValueError(f"num_freq_points must be >= 1, got {self.num_freq_points}")
        if not np.isfinite(self.bandwidth) or self.bandwidth < 0:
            raise ValueError(f"bandwidth must be >= 0, got {self.bandwidth}")
        if not np.isfinite(self.carrier_frequency) or self.carrier_frequency <= self.bandwidth / 2:
            raise ValueError(
                "carrier_frequency must exceed bandwidth/2 "
                f"(carrier={self.carrier_frequency}, bandwidth={self.bandwidth})"
            )
        if not np.isfinite(self.element_spacing) or self.element_spacing <= 0:
            raise ValueError(f"element_spacing must be positive, got {self.element_spacing}")
        if not np.isfinite(self.noise_std) or self.noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")

    @property
    def frequencies(self) -> np.ndarray:
        """The K frequency points, uniform and symmetric about the carrier."""
        if self.num_freq_points == 1:
            return np.array([self.carrier_frequency], dtype=float)
        return np.linspace(
            self.carrier_frequency - self.bandwidth / 2,
            self.carrier_frequency + self.bandwidth / 2,
            self.num_freq_points,
        )

    @property
    def vector_length(self) -> int:
        return self.num_antennas * self.num_freq_points


def default_config() -> RadarConfig:
    """61.8 GHz / 3.6 GHz, 1x4 array, 128 frequency points, noiseless."""
    return RadarConfig(
        carrier_frequency=61.8e9,
        bandwidth=3.6e9,
        num_antennas=4,
        num_freq_points=128,
    )


@dataclass(frozen=True)
class PropagationPath:
    aoa: float  # rad from the array axis
    tof: float  # s, two-way
    attenuation: complex = 1.0 + 0.0j
    label: PathLabel = PathLabel.OTHER

    def __post_init__(self):
        object.__setattr__(self, "attenuation", complex(self.attenuation))
        if not (np.isfinite(self.aoa) and np.isfinite(self.tof)):
            raise ValueError(f"path parameters must be finite (aoa={self.aoa}, tof={self.tof})")
        if not np.isfinite(self.attenuation):
            raise ValueError(f"attenuation must be finite, got {self.attenuation}")
        if not 0 < self.aoa < np.pi:
            raise ValueError(f"aoa must lie in (0, pi), got {self.aoa}")
        if self.tof <= 0:
            raise ValueError(f"tof must be positive, got {self.tof}")
        if abs(self.attenuation) == 0:
            raise ValueError("attenuation must be non-zero")

    def scaled(self, factor: complex) -> "PropagationPath":
        return PropagationPath(self.aoa, self.tof, self.attenuation * factor, self.label)


@dataclass(frozen=True, eq=False)
class Frame:
    """Received samples r_{m,k}(t) for one slot, rows = antennas."""

    slot: int
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.complex128)
        if samples.ndim != 2:
            raise ValueError(f"frame samples must be a 2-D M x K array, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("frame samples must be finite")
        if self.slot < BACKGROUND_SLOT:
            raise ValueError(f"slot must be >= {BACKGROUND_SLOT}, got {self.slot}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "slot", int(self.slot))

    @property
    def shape(self):
        return self.samples.shape

    @property
    def vector(self) -> np.ndarray:
        """r(t): antenna-major, then frequency."""
        return self.samples.reshape(-1)

    @classmethod
    def zeros(cls, config: RadarConfig, slot: int = 0) -> "Frame":
        return cls(slot, np.zeros((config.num_antennas, config.num_freq_points), complex))


def _path_response(config: RadarConfig, path: PropagationPath) -> np.ndarray:
    freqs = config.frequencies
    antenna = np.arange(config.num_antennas)[:, None]
    delay = np.exp(-2j * np.pi * freqs * path.tof)
    spatial = np.exp(
        -2j * np.pi * freqs[None, :] * antenna * config.element_spacing * np.cos(path.aoa)
        / SPEED_OF_LIGHT
    )
    return path.attenuation * delay[None, :] * spatial


def synthesize_frame(
    config: RadarConfig,
    paths: Sequence[PropagationPath],
    slot: int = 0,
    rng_seed: int = 0,
) -> Frame:
    """Sum the path responses and add circular Gaussian noise.

    Noise is drawn from ``numpy.random.default_rng(rng_seed)`` so identical
    inputs give bit-identical frames.
    """
    samples = np.zeros((config.num_antennas, config.num_freq_points), dtype=np.complex128)
    for path in paths:
        if not (np.isfinite(path.aoa) and np.isfinite(path.tof) and np.isfinite(path.attenuation)):
            raise ValueError(f"non-finite path parameters: {path}")
        if path.tof <= 0:
            raise ValueError(f"tof must be positive, got {path.tof}")
        samples += _path_response(config, path)

    if config.noise_std > 0:
        rng = np.random.default_rng(rng_seed)
        shape = samples.shape
        samples += config.noise_std * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    elif not paths:
        logger.debug("slot %d: no paths and no noise, returning an all-zero frame", slot)

    return Frame(slot, samples)
