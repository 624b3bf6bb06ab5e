"""AoA-ToF beamforming over a discretized N x N grid.

The steering vector of bin (i, j) has entries

    phi_{m,k}(i, j) = exp(-j 2 pi f_k tau_j) * exp(-j 2 pi f_k m d cos(theta_i) / c)

and the spectrum value is P(i, j) = |a_{i,j}^H r|. Rows of every N x N table
index AoA (i), columns index ToF (j).
"""

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Tuple

import numpy as np

from .errors import DimensionMismatchError, TrackingError
from .geometry import SPEED_OF_LIGHT
from .radar_model import Frame, RadarConfig

logger = logging.getLogger(__name__)

Bin = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class SteeringGrid:
    """Precomputed steering table, held as its delay and angle factors.

    ``delay[j, k]`` and ``angle[i, m, k]`` multiply to phi_{m,k}(i, j);
    ``steering`` materializes the full N x N x (M*K) table.
    """

    aoa_bins: np.ndarray
    tof_bins: np.ndarray
    frequencies: np.ndarray
    num_antennas: int
    element_spacing: float
    delay: np.ndarray = field(repr=False)
    angle: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.aoa_bins)

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.aoa_bins), len(self.tof_bins))

    @property
    def frame_shape(self) -> Tuple[int, int]:
        return (self.num_antennas, len(self.frequencies))

    @property
    def aoa_step(self) -> float:
        return float(self.aoa_bins[1] - self.aoa_bins[0])

    @property
    def tof_step(self) -> float:
        return float(self.tof_bins[1] - self.tof_bins[0])

    @cached_property
    def steering(self) -> np.ndarray:
        """a_{i,j} for every bin, shape (N, N, M*K), frame vectorization order."""
        table = self.angle[:, None, :, :] * self.delay[None, :, None, :]
        n_aoa, n_tof = self.shape
        return table.reshape(n_aoa, n_tof, -1)

    def nearest_bin(self, aoa: float, tof: float) -> Bin:
        i = int(np.argmin(np.abs(self.aoa_bins - aoa)))
        j = int(np.argmin(np.abs(self.tof_bins - tof)))
        return i, j

    def covers(self, aoa: float, tof: float) -> bool:
        return bool(
            self.aoa_bins[0] <= aoa <= self.aoa_bins[-1]
            and self.tof_bins[0] <= tof <= self.tof_bins[-1]
        )


def build_grid(
    config: RadarConfig,
    n: int,
    aoa_range: Tuple[float, float],
    tof_range: Tuple[float, float],
) -> SteeringGrid:
    """Discretize the AoA-ToF plane and precompute the steering factors."""
    if n < 2:
        raise ValueError(f"grid size must be >= 2, got {n}")
    aoa_min, aoa_max = aoa_range
    tof_min, tof_max = tof_range
    if not aoa_min < aoa_max:
        raise ValueError(f"inverted or empty aoa_range {aoa_range}")
    if not tof_min < tof_max:
        raise ValueError(f"inverted or empty tof_range {tof_range}")
    if tof_min <= 0:
        raise ValueError(f"tof_min must be positive, got {tof_min}")

    aoa_bins = np.linspace(aoa_min, aoa_max, n)
    tof_bins = np.linspace(tof_min, tof_max, n)
    freqs = config.frequencies
    antenna = np.arange(config.num_antennas)

    delay = np.exp(-2j * np.pi * freqs[None, :] * tof_bins[:, None])
    angle = np.exp(
        -2j * np.pi * freqs[None, None, :] * antenna[None, :, None]
        * config.element_spacing * np.cos(aoa_bins)[:, None, None] / SPEED_OF_LIGHT
    )
    for table in (aoa_bins, tof_bins, freqs, delay, angle):
        table.setflags(write=False)

    logger.debug(
        "built %dx%d grid: aoa [%.4f, %.4f] rad, tof [%.4e, %.4e] s",
        n, n, aoa_min, aoa_max, tof_min, tof_max,
    )
    return SteeringGrid(
        aoa_bins=aoa_bins,
        tof_bins=tof_bins,
        frequencies=freqs,
        num_antennas=config.num_antennas,
        element_spacing=config.element_spacing,
        delay=delay,
        angle=angle,
    )


@dataclass(frozen=True, eq=False)
class Spectrum:
    """N x N AoA-ToF magnitude map for one slot."""

    slot: int
    values: np.ndarray = field(repr=False)
    mask: np.ndarray = field(repr=False)
    normalized: bool
    aoa_bins: np.ndarray = field(repr=False)
    tof_bins: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        if values.shape != mask.shape or values.ndim != 2:
            raise ValueError(f"values {values.shape} and mask {mask.shape} must be equal 2-D shapes")
        if values.shape != (len(self.aoa_bins), len(self.tof_bins)):
            raise ValueError("spectrum shape does not match its bin axes")
        if np.any(values < 0):
            raise ValueError("spectrum values must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def masked_values(self, fill: float = -np.inf) -> np.ndarray:
        return np.where(self.mask, fill, self.values)

    @classmethod
    def from_values(cls, values, slot: int = 0, mask=None, aoa_bins=None, tof_bins=None,
                    normalized: bool = False) -> "Spectrum":
        """Wrap a bare array, with index-valued axes unless given."""
        values = np.asarray(values, dtype=float)
        n_aoa, n_tof = values.shape
        return cls(
            slot=slot,
            values=values,
            mask=np.zeros(values.shape, bool) if mask is None else mask,
            normalized=normalized,
            aoa_bins=np.arange(n_aoa, dtype=float) if aoa_bins is None else aoa_bins,
            tof_bins=np.arange(n_tof, dtype=float) if tof_bins is None else tof_bins,
        )


def normalize_spectrum(spectrum: Spectrum) -> Spectrum:
    """Divide by the maximum over unmasked bins; all-zero maps stay zero."""
    unmasked = spectrum.values[~spectrum.mask]
    peak = float(unmasked.max()) if unmasked.size else 0.0
    values = spectrum.values / peak if peak > 0 else spectrum.values.copy()
    return replace(spectrum, values=values, normalized=True)


def compute_spectrum(
    grid: SteeringGrid,
    frame: Frame,
    normalize: bool = False,
    dense: bool = False,
) -> Spectrum:
    """P(i, j) = |a_{i,j}^H r| for every bin.

    The default path combines antennas per AoA bin first and then focuses all
    delays with one (N x K) @ (K x N) product; ``dense=True`` runs the literal
    (N^2 x MK) matrix-vector product over the materialized table.
    """
    if frame.shape != grid.frame_shape:
        raise DimensionMismatchError(
            f"frame shape {frame.shape} does not match grid M x K {grid.frame_shape}"
        )
    if dense:
        table = grid.steering
        values = np.abs(table.reshape(-1, table.shape[-1]).conj() @ frame.vector)
        values = values.reshape(grid.shape)
    else:
        combined = np.sum(grid.angle.conj() * frame.samples[None, :, :], axis=1)
        values = np.abs(combined @ grid.delay.conj().T)

    spectrum = Spectrum(
        slot=frame.slot,
        values=values,
        mask=np.zeros(grid.shape, dtype=bool),
        normalized=False,
        aoa_bins=grid.aoa_bins,
        tof_bins=grid.tof_bins,
    )
    return normalize_spectrum(spectrum) if normalize else spectrum


def subtract_background(frame: Frame, background: Frame) -> Frame:
    """Differential measurement: remove the empty-scene capture."""
    if frame.shape != background.shape:
        raise DimensionMismatchError(
            f"frame shape {frame.shape} does not match background shape {background.shape}"
        )
    return Frame(frame.slot, frame.samples - background.samples)


def apply_los_mask(spectrum: Spectrum, tof_floor: float) -> Spectrum:
    """Exclude every bin whose delay is strictly below ``tof_floor``."""
    excluded = np.broadcast_to(spectrum.tof_bins < tof_floor, spectrum.shape)
    return replace(spectrum, mask=spectrum.mask | excluded)


def static_peak(spectrum: Spectrum) -> Tuple[Bin, float]:
    """Arg-max over unmasked bins; ties go to the smallest ToF, then AoA index."""
    if spectrum.mask.all():
        raise TrackingError(f"slot {spectrum.slot}: every spectrum bin is masked")
    # ToF-major flattening makes argmax's first-occurrence rule the tie-break.
    flat = spectrum.masked_values().T.ravel()
    k = int(np.argmax(flat))
    j, i = divmod(k, spectrum.shape[0])
    return (i, j), float(spectrum.values[i, j])


def local_peak(spectrum: Spectrum, bin: Bin, radius: int) -> Bin:
    """Hill-climb from ``bin`` to a local maximum at most ``radius`` bins away.

    Each move goes to the largest unmasked bin of the 3x3 neighbourhood, and
    only when it is strictly larger than the current one.
    """
    values = spectrum.masked_values()
    n_aoa, n_tof = spectrum.shape
    i, j = int(bin[0]), int(bin[1])
    lo_i, hi_i = max(i - radius, 0), min(i + radius, n_aoa - 1)
    lo_j, hi_j = max(j - radius, 0), min(j + radius, n_tof - 1)
    while True:
        top, left = max(i - 1, lo_i), max(j - 1, lo_j)
        window = values[top:min(i + 1, hi_i) + 1, left:min(j + 1, hi_j) + 1]
        dj, di = divmod(int(np.argmax(window.T.ravel())), window.shape[0])
        if not window[di, dj] > values[i, j]:
            return (i, j)
        i, j = top + di, left + dj


def _parabolic_offset(left: float, centre: float, right: float) -> float:
    """Vertex offset of the parabola through three unit-spaced samples."""
    curvature = left - 2.0 * centre + right
    if not curvature < 0:
        return 0.0
    offset = 0.5 * (left - right) / curvature
    return float(np.clip(offset, -1.0, 1.0))


def refine_peak(spectrum: Spectrum, bin: Bin) -> Tuple[float, float]:
    """Sub-bin (aoa, tof) by parabolic interpolation along each axis.

    A masked bin or one on any grid border keeps the bin centre on both
    axes. Otherwise an axis keeps its centre when a neighbour along it is
    masked or the three samples are not concave.
    """
    i, j = bin
    n_aoa, n_tof = spectrum.shape
    values, mask = spectrum.values, spectrum.mask
    aoa = float(spectrum.aoa_bins[i])
    tof = float(spectrum.tof_bins[j])
    if mask[i, j] or not (0 < i < n_aoa - 1 and 0 < j < n_tof - 1):
        return aoa, tof

    if not mask[i, j - 1] and not mask[i, j + 1]:
        offset = _parabolic_offset(values[i, j - 1], values[i, j], values[i, j + 1])
        tof += offset * float(spectrum.tof_bins[1] - spectrum.tof_bins[0])
    if not mask[i - 1, j] and not mask[i + 1, j]:
        offset = _parabolic_offset(values[i - 1, j], values[i, j], values[i + 1, j])
        aoa += offset * float(spectrum.aoa_bins[1] - spectrum.aoa_bins[0])
    return aoa, tof
