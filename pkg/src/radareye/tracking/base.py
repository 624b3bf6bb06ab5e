"""Abstract base class for level estimators."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

from ..beamforming import Bin, Spectrum, SteeringGrid, refine_peak
from ..errors import DimensionMismatchError
from ..geometry import MountGeometry, tof_to_level


@dataclass(frozen=True)
class LevelEstimate:
    """One per-slot output of an estimator."""

    slot: int
    aoa: float  # rad, sub-bin
    tof: float  # s, sub-bin
    level: float  # m
    bin: Bin  # grid bin the estimate was read from


class BaseLevelEstimator(ABC):
    """Abstract base class for spectrum-sequence level estimators."""

    def __init__(self, grid: SteeringGrid, mount: MountGeometry):
        """Initialize the estimator.

        Args:
            grid: Steering grid every incoming spectrum was computed on
            mount: Radar mounting used to turn ToF into a level
        """
        self.grid = grid
        self.mount = mount
        self._validate_config()

    @abstractmethod
    def get_estimator_name(self) -> str:
        """Return the registry name (e.g., 'track', 'peak')."""
        pass

    def _validate_config(self):
        """Validate the configuration. Raise ValueError if invalid."""
        if self.grid.n < 2:
            raise ValueError(f"{self.get_estimator_name()}: grid must have at least 2 bins")

    @abstractmethod
    def update(self, spectrum: Spectrum) -> LevelEstimate:
        """Consume the next slot's spectrum and return the current estimate.

        Spectra must arrive in slot order.

        Raises:
            TrackingError: If no estimate can be formed (e.g. all bins masked)
        """
        pass

    @abstractmethod
    def reset(self):
        """Forget every spectrum seen so far."""
        pass

    def _check_spectrum(self, spectrum: Spectrum):
        if spectrum.shape != self.grid.shape:
            raise DimensionMismatchError(
                f"spectrum shape {spectrum.shape} does not match grid {self.grid.shape}"
            )

    def _estimate_at(self, spectrum: Spectrum, bin: Bin) -> LevelEstimate:
        aoa, tof = refine_peak(spectrum, bin)
        return self._estimate_from(spectrum.slot, aoa, tof, bin)

    def _estimate_from(self, slot: int, aoa: float, tof: float, bin: Bin) -> LevelEstimate:
        return LevelEstimate(
            slot=slot,
            aoa=aoa,
            tof=tof,
            level=tof_to_level(self.mount, tof),
            bin=_as_bin(bin),
        )


def _as_bin(bin) -> Tuple[int, int]:
    return (int(bin[0]), int(bin[1]))
