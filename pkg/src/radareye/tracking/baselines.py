"""Reference estimators: per-frame peak picking and top-N envelope smoothing."""

from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional, Sequence, Tuple

import numpy as np

from ..beamforming import Bin, Spectrum, SteeringGrid, static_peak
from ..errors import TrackingError
from ..geometry import MountGeometry
from .base import BaseLevelEstimator, LevelEstimate


@dataclass(frozen=True)
class BaselineParams:
    top_n: int = 5  # peaks pooled per frame
    window: int = 3  # trailing frames, current one included

    def __post_init__(self):
        if self.top_n < 1:
            raise ValueError(f"top_n must be >= 1, got {self.top_n}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


def peak_pick_track(spectra: Sequence[Spectrum]) -> List[Bin]:
    """Independent static peak of every spectrum."""
    return [static_peak(spectrum)[0] for spectrum in spectra]


def top_peaks(spectrum: Spectrum, top_n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Coordinates (aoa, tof) and magnitudes of the ``top_n`` highest unmasked bins.

    Equal magnitudes rank by smallest ToF index, then AoA index.
    """
    if spectrum.mask.all():
        raise TrackingError(f"slot {spectrum.slot}: every spectrum bin is masked")
    flat = spectrum.masked_values().T.ravel()
    count = min(top_n, int(np.count_nonzero(~spectrum.mask)))
    order = np.argsort(-flat, kind="stable")[:count]
    j, i = np.divmod(order, spectrum.shape[0])
    coords = np.column_stack([spectrum.aoa_bins[i], spectrum.tof_bins[j]])
    return coords, spectrum.values[i, j]


def _weighted_mean(coords: np.ndarray, weights: np.ndarray) -> Tuple[float, float]:
    if weights.sum() > 0:
        aoa, tof = np.average(coords, axis=0, weights=weights)
    else:
        aoa, tof = coords.mean(axis=0)
    return float(aoa), float(tof)


def smoothed_peak_track(
    spectra: Sequence[Spectrum], params: Optional[BaselineParams] = None
) -> List[Tuple[float, float]]:
    """Magnitude-weighted mean of the top-N peaks pooled over a trailing window.

    The first ``window - 1`` slots use whatever prefix is available.
    """
    params = params or BaselineParams()
    peaks = [top_peaks(spectrum, params.top_n) for spectrum in spectra]
    estimates = []
    for t in range(len(spectra)):
        pooled = peaks[max(0, t - params.window + 1): t + 1]
        coords = np.concatenate([c for c, _ in pooled])
        weights = np.concatenate([w for _, w in pooled])
        estimates.append(_weighted_mean(coords, weights))
    return estimates


class PeakPickEstimator(BaseLevelEstimator):
    """Highest bin of each frame, refined to sub-bin accuracy."""

    def get_estimator_name(self) -> str:
        return "peak"

    def update(self, spectrum: Spectrum) -> LevelEstimate:
        self._check_spectrum(spectrum)
        bin, _ = static_peak(spectrum)
        return self._estimate_at(spectrum, bin)

    def reset(self):
        pass


class SmoothedPeakEstimator(BaseLevelEstimator):
    """Online form of ``smoothed_peak_track``."""

    def __init__(
        self,
        grid: SteeringGrid,
        mount: MountGeometry,
        params: Optional[BaselineParams] = None,
    ):
        self.params = params or BaselineParams()
        self._window: Deque[Tuple[np.ndarray, np.ndarray]] = deque(maxlen=self.params.window)
        super().__init__(grid, mount)

    def get_estimator_name(self) -> str:
        return "smooth"

    def update(self, spectrum: Spectrum) -> LevelEstimate:
        self._check_spectrum(spectrum)
        self._window.append(top_peaks(spectrum, self.params.top_n))
        coords = np.concatenate([c for c, _ in self._window])
        weights = np.concatenate([w for _, w in self._window])
        aoa, tof = _weighted_mean(coords, weights)
        return self._estimate_from(spectrum.slot, aoa, tof, self.grid.nearest_bin(aoa, tof))

    def reset(self):
        self._window.clear()
