"""Liquid-level estimators over AoA-ToF spectrum sequences."""

from .base import BaseLevelEstimator, LevelEstimate
from .baselines import (
    BaselineParams,
    PeakPickEstimator,
    SmoothedPeakEstimator,
    peak_pick_track,
    smoothed_peak_track,
)
from .tracker import (
    Backtrack,
    PhysicsTracker,
    TrackerParams,
    TrackerState,
    backtrack,
    brute_force_best_path,
    estimate_level,
    init_tracker,
    step,
    transition_cost,
)

__all__ = [
    "BaseLevelEstimator",
    "LevelEstimate",
    "BaselineParams",
    "PeakPickEstimator",
    "SmoothedPeakEstimator",
    "peak_pick_track",
    "smoothed_peak_track",
    "Backtrack",
    "PhysicsTracker",
    "TrackerParams",
    "TrackerState",
    "backtrack",
    "brute_force_best_path",
    "estimate_level",
    "init_tracker",
    "step",
    "transition_cost",
    "create_estimator",
    "get_available_estimators",
]

_ESTIMATORS = {
    "track": PhysicsTracker,
    "peak": PeakPickEstimator,
    "smooth": SmoothedPeakEstimator,
}


def get_available_estimators() -> list:
    """Get list of estimator names.

    Returns:
        Registry names accepted by ``create_estimator``
    """
    return list(_ESTIMATORS)


def create_estimator(name: str, grid, mount, **params) -> BaseLevelEstimator:
    """Instantiate an estimator by registry name.

    Args:
        name: One of ``get_available_estimators()``
        grid: Steering grid shared by all spectra
        mount: Radar mounting
        **params: Estimator-specific keyword arguments (``params``, ``warmup``)

    Raises:
        ValueError: If the name is unknown
    """
    try:
        cls = _ESTIMATORS[name]
    except KeyError:
        raise ValueError(
            f"unknown estimator {name!r}; choose from {', '.join(_ESTIMATORS)}"
        ) from None
    return cls(grid, mount, **params)
