"""radareye: mmWave radar liquid-level sensing for robotic pouring."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("radareye")
except PackageNotFoundError:
    __version__ = "0.0.0+unknown"


def _check_deps():
    try:
        import numpy
        from numpy.lib.stride_tricks import sliding_window_view  # noqa: F401
    except Exception as e:
        raise RuntimeError(
            "Required dependencies could not be imported.\n"
            "radareye needs numpy with sliding_window_view (>= 1.20).\n"
            "Try:\n"
            "  pip install -U numpy scipy\n"
        ) from e

    np_v = tuple(int(part) for part in numpy.__version__.split(".")[:2])
    if np_v < (1, 20):
        raise RuntimeError(
            f"Incompatible environment detected: numpy {numpy.__version__}\n\n"
            "Fix:\n"
            "  pip install -U numpy\n"
        )


_check_deps()

from .beamforming import (  # noqa: E402
    Spectrum,
    SteeringGrid,
    apply_los_mask,
    build_grid,
    compute_spectrum,
    local_peak,
    normalize_spectrum,
    refine_peak,
    static_peak,
    subtract_background,
)
from .geometry import (  # noqa: E402
    MountGeometry,
    level_from_range,
    range_to_tof,
    tof_to_level,
    tof_to_range,
)
from .pipeline import LevelPipeline, RunReport  # noqa: E402
from .radar_model import (  # noqa: E402
    Frame,
    PathLabel,
    PropagationPath,
    RadarConfig,
    default_config,
    synthesize_frame,
)
from .scenario import (  # noqa: E402
    LabeledFrameSequence,
    ScenarioConfig,
    default_pour_config,
    pouring_scenario,
    static_fill_scenario,
)
from .tracking import (  # noqa: E402
    PhysicsTracker,
    TrackerParams,
    TrackerState,
    create_estimator,
    get_available_estimators,
)

__all__ = [
    "Spectrum",
    "SteeringGrid",
    "apply_los_mask",
    "build_grid",
    "compute_spectrum",
    "local_peak",
    "normalize_spectrum",
    "refine_peak",
    "static_peak",
    "subtract_background",
    "MountGeometry",
    "level_from_range",
    "range_to_tof",
    "tof_to_level",
    "tof_to_range",
    "LevelPipeline",
    "RunReport",
    "Frame",
    "PathLabel",
    "PropagationPath",
    "RadarConfig",
    "default_config",
    "synthesize_frame",
    "LabeledFrameSequence",
    "ScenarioConfig",
    "default_pour_config",
    "pouring_scenario",
    "static_fill_scenario",
    "PhysicsTracker",
    "TrackerParams",
    "TrackerState",
    "create_estimator",
    "get_available_estimators",
]
