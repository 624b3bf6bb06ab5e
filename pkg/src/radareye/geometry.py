"""Conversions between propagation delay, range and liquid level.

The radar looks straight down into the container, so a surface echo arrives
along the vertical and ``level = radar_height - range``.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.constants import speed_of_light

SPEED_OF_LIGHT = float(speed_of_light)  # m/s

DEFAULT_AOA_RANGE = (np.deg2rad(60.0), np.deg2rad(120.0))
GRID_PADDING = 0.1


@dataclass(frozen=True)
class MountGeometry:
    """Radar mounting above the target container."""

    radar_height: float = 0.30  # m above the container's inner bottom
    max_level: float = 0.15  # m, usable container depth

    def __post_init__(self):
        if not np.isfinite(self.radar_height) or self.radar_height <= 0:
            raise ValueError(f"radar_height must be positive, got {self.radar_height}")
        if not 0 < self.max_level < self.radar_height:
            raise ValueError(
                f"max_level must lie in (0, radar_height={self.radar_height}), "
                f"got {self.max_level}"
            )


def tof_to_range(tof: float) -> float:
    """Two-way delay (s) to one-way range (m)."""
    if not tof > 0:
        raise ValueError(f"tof must be positive, got {tof}")
    return SPEED_OF_LIGHT * tof / 2.0


def range_to_tof(range_m: float) -> float:
    if not range_m > 0:
        raise ValueError(f"range must be positive, got {range_m}")
    return 2.0 * range_m / SPEED_OF_LIGHT


def level_from_range(geometry: MountGeometry, range_m: float) -> float:
    """Liquid level for a vertical echo at ``range_m``, clamped to [0, max_level]."""
    if range_m < 0:
        raise ValueError(f"range must be non-negative, got {range_m}")
    level = geometry.radar_height - range_m
    return float(min(max(level, 0.0), geometry.max_level))


def level_to_tof(radar_height: float, level: float) -> float:
    """Two-way delay of the surface echo for a given fill level."""
    if not 0 <= level < radar_height:
        raise ValueError(
            f"level must lie in [0, radar_height={radar_height}), got {level}"
        )
    return 2.0 * (radar_height - level) / SPEED_OF_LIGHT


def tof_to_level(geometry: MountGeometry, tof: float) -> float:
    return level_from_range(geometry, tof_to_range(tof))


def default_grid_ranges(
    geometry: MountGeometry,
) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """AoA and ToF extents covering the container under the given mount.

    The ToF span from a full to an empty container is padded by 10% of its
    width on both sides.
    """
    tof_low = 2.0 * (geometry.radar_height - geometry.max_level) / SPEED_OF_LIGHT
    tof_high = 2.0 * geometry.radar_height / SPEED_OF_LIGHT
    pad = GRID_PADDING * (tof_high - tof_low)
    return DEFAULT_AOA_RANGE, (tof_low - pad, tof_high + pad)
