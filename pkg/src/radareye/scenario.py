"""Ground-truth pouring scenarios.

Two protocols are generated here: a stepwise static fill (one frame per fill
step) and a continuous pour with interfering reflectors that cross the liquid
surface trace in the AoA-ToF plane. Every sequence also carries the empty-scene
background frame used for differential clutter removal.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import MountGeometry, default_grid_ranges, level_to_tof, range_to_tof
from .radar_model import (
    BACKGROUND_SLOT,
    Frame,
    PathLabel,
    PropagationPath,
    RadarConfig,
    synthesize_frame,
)

logger = logging.getLogger(__name__)

SURFACE_AOA = np.pi / 2
LOS_RANGE = 0.0075  # m, direct transmit-to-receive leakage


@dataclass(frozen=True)
class Interferer:
    """A moving reflector that is present during ``start_slot..stop_slot``.

    Its AoA and ToF move linearly between the start and end values across the
    active window (both ends inclusive). With ``sweeps`` > 1 the reflector
    travels that many one-way passes, turning back at each end.
    """

    label: PathLabel
    magnitude: float
    start_slot: int
    stop_slot: int
    aoa_start: float  # rad
    aoa_end: float  # rad
    tof_start: float  # s
    tof_end: float  # s
    sweeps: int = 1

    def __post_init__(self):
        if not self.magnitude > 0:
            raise ValueError(f"interferer magnitude must be positive, got {self.magnitude}")
        if self.start_slot < 0 or self.stop_slot < self.start_slot:
            raise ValueError(
                f"interferer active window ({self.start_slot}, {self.stop_slot}) is invalid"
            )
        for name in ("aoa_start", "aoa_end"):
            if not 0 < getattr(self, name) < np.pi:
                raise ValueError(f"interferer {name} must lie in (0, pi)")
        for name in ("tof_start", "tof_end"):
            if not getattr(self, name) > 0:
                raise ValueError(f"interferer {name} must be positive")
        if self.sweeps < 1:
            raise ValueError(f"interferer sweeps must be >= 1, got {self.sweeps}")

    @classmethod
    def line(
        cls,
        label: PathLabel,
        magnitude: float,
        active: Tuple[int, int],
        aoa_deg: Tuple[float, float],
        range_m: Tuple[float, float],
        sweeps: int = 1,
    ) -> "Interferer":
        """Straight-line trajectory given in degrees and one-way range."""
        return cls(
            label=label,
            magnitude=float(magnitude),
            start_slot=int(active[0]),
            stop_slot=int(active[1]),
            aoa_start=float(np.deg2rad(aoa_deg[0])),
            aoa_end=float(np.deg2rad(aoa_deg[1])),
            tof_start=range_to_tof(range_m[0]),
            tof_end=range_to_tof(range_m[1]),
            sweeps=int(sweeps),
        )

    @property
    def active(self) -> Tuple[int, int]:
        return (self.start_slot, self.stop_slot)

    def is_active(self, slot: int) -> bool:
        return self.start_slot <= slot <= self.stop_slot

    def position(self, slot: int) -> Tuple[float, float]:
        """(aoa, tof) at ``slot``, clamped to the active window ends."""
        span = self.stop_slot - self.start_slot
        frac = 0.0 if span == 0 else (slot - self.start_slot) / span
        frac = min(max(frac, 0.0), 1.0) * self.sweeps
        frac %= 2.0
        if frac > 1.0:
            frac = 2.0 - frac
        aoa = self.aoa_start + frac * (self.aoa_end - self.aoa_start)
        tof = self.tof_start + frac * (self.tof_end - self.tof_start)
        return aoa, tof

    def path_at(self, slot: int) -> PropagationPath:
        aoa, tof = self.position(slot)
        return PropagationPath(aoa, tof, complex(self.magnitude), self.label)


def static_path(
    label: PathLabel, aoa_deg: float, range_m: float, magnitude: float
) -> PropagationPath:
    """Fixed reflector such as the desktop or the container rim."""
    return PropagationPath(
        float(np.deg2rad(aoa_deg)), range_to_tof(range_m), complex(magnitude), label
    )


def los_path(magnitude: float) -> PropagationPath:
    """Direct leakage from the transmit to the receive antennas."""
    return static_path(PathLabel.OTHER, 90.0, LOS_RANGE, magnitude)


@dataclass(frozen=True)
class ScenarioConfig:
    radar_height: float = 0.30
    max_level: float = 0.15
    num_slots: int = 60
    slot_duration: float = 0.1  # s
    level_knots: Tuple[Tuple[int, float], ...] = ((0, 0.0),)
    interferers: Tuple[Interferer, ...] = ()
    surface_magnitude: float = 1.0
    static_clutter: Tuple[PropagationPath, ...] = ()
    snr_db: Optional[float] = None  # None keeps the radar noise_std
    aoa_range: Optional[Tuple[float, float]] = None  # rad, default from the mount
    tof_range: Optional[Tuple[float, float]] = None  # s, default from the mount

    def __post_init__(self):
        object.__setattr__(self, "level_knots", tuple(tuple(k) for k in self.level_knots))
        object.__setattr__(self, "interferers", tuple(self.interferers))
        object.__setattr__(self, "static_clutter", tuple(self.static_clutter))
        self._validate_config()

    def _validate_config(self):
        MountGeometry(self.radar_height, self.max_level)
        if self.num_slots < 2:
            raise ValueError(f"num_slots must be >= 2, got {self.num_slots}")
        if not self.slot_duration > 0:
            raise ValueError(f"slot_duration must be positive, got {self.slot_duration}")
        if not self.surface_magnitude > 0:
            raise ValueError(f"surface_magnitude must be positive, got {self.surface_magnitude}")
        if not self.level_knots:
            raise ValueError("level_knots must contain at least one (slot, level) pair")
        slots = [k[0] for k in self.level_knots]
        if any(b <= a for a, b in zip(slots, slots[1:])):
            raise ValueError(f"level_knots slots must be strictly increasing, got {slots}")
        for slot, level in self.level_knots:
            if not 0 <= level < self.radar_height:
                raise ValueError(
                    f"level {level} at slot {slot} must lie in [0, radar_height={self.radar_height})"
                )

    @property
    def mount(self) -> MountGeometry:
        return MountGeometry(self.radar_height, self.max_level)

    def grid_ranges(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        aoa_default, tof_default = default_grid_ranges(self.mount)
        return (self.aoa_range or aoa_default, self.tof_range or tof_default)

    def level_at(self, slot: int) -> float:
        """Piecewise-linear level; held constant outside the knot span."""
        slots, levels = zip(*self.level_knots)
        return float(np.interp(slot, slots, levels))

    def levels(self) -> np.ndarray:
        slots, levels = zip(*self.level_knots)
        return np.interp(np.arange(self.num_slots), slots, levels)


@dataclass(frozen=True, eq=False)
class LabeledFrameSequence:
    frames: List[Frame]
    truth_levels: np.ndarray
    background: Frame
    paths: List[Tuple[PropagationPath, ...]] = field(repr=False)
    interference_slots: Tuple[int, ...] = ()
    mount: MountGeometry = MountGeometry()

    def __post_init__(self):
        if len(self.frames) != len(self.truth_levels):
            raise ValueError(
                f"{len(self.frames)} frames but {len(self.truth_levels)} truth levels"
            )

    def __len__(self) -> int:
        return len(self.frames)


def noise_std_for_snr(
    surface_magnitude: float, snr_db: Optional[float], default: float = 0.0
) -> float:
    """Per-component noise std giving ``snr_db`` per complex sample.

    ``default`` (normally the radar's own noise_std) applies when no SNR is set.
    """
    if snr_db is None:
        return default
    return float(surface_magnitude / np.sqrt(2.0 * 10.0 ** (snr_db / 10.0)))


def _frame_seeds(seed: int, count: int) -> List[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]


def _render(
    config: RadarConfig,
    slot_paths: Sequence[Tuple[PropagationPath, ...]],
    clutter: Sequence[PropagationPath],
    noise_std: float,
    seed: int,
) -> Tuple[List[Frame], Frame]:
    noisy = replace(config, noise_std=noise_std)
    seeds = _frame_seeds(seed, len(slot_paths) + 1)
    background = synthesize_frame(noisy, list(clutter), BACKGROUND_SLOT, seeds[0])
    frames = [
        synthesize_frame(noisy, list(paths), slot, seeds[slot + 1])
        for slot, paths in enumerate(slot_paths)
    ]
    return frames, background


def _surface_path(radar_height: float, level: float, magnitude: float) -> PropagationPath:
    return PropagationPath(
        SURFACE_AOA, level_to_tof(radar_height, level), complex(magnitude), PathLabel.LIQUID_SURFACE
    )


def static_fill_scenario(
    config: RadarConfig,
    steps: Sequence[float],
    snr_db: Optional[float],
    mount: MountGeometry = MountGeometry(),
    surface_magnitude: float = 1.0,
    static_clutter: Sequence[PropagationPath] = (),
    seed: int = 0,
) -> LabeledFrameSequence:
    """One frame per fill step with the surface directly below the radar.

    Args:
        config: Radar parameters; its ``noise_std`` is replaced by the value
            implied by ``snr_db`` when one is given.
        steps: Liquid level (m) of each step.
        snr_db: Per-sample SNR against the surface path; ``None`` keeps
            ``config.noise_std`` (noiseless for the default radar).
        mount: Radar mounting above the container.
        surface_magnitude: |alpha| of the surface echo.
        static_clutter: Fixed reflectors present in every frame and the background.
        seed: Root seed; each frame draws noise from its own child seed.

    Returns:
        LabeledFrameSequence with one slot per step.

    Raises:
        ValueError: If a level is negative or not below the radar height.
    """
    if len(steps) == 0:
        raise ValueError("static fill needs at least one level step")
    for index, level in enumerate(steps):
        if not 0 <= level < mount.radar_height:
            raise ValueError(
                f"step {index}: level {level} must lie in [0, radar_height={mount.radar_height})"
            )

    clutter = tuple(static_clutter)
    slot_paths = [
        (_surface_path(mount.radar_height, level, surface_magnitude),) + clutter
        for level in steps
    ]
    noise_std = noise_std_for_snr(surface_magnitude, snr_db, config.noise_std)
    frames, background = _render(config, slot_paths, clutter, noise_std, seed)
    logger.debug("static fill: %d steps, noise_std=%.3g", len(frames), noise_std)
    return LabeledFrameSequence(
        frames=frames,
        truth_levels=np.asarray(steps, dtype=float),
        background=background,
        paths=slot_paths,
        mount=mount,
    )


def _check_coverage(scfg: ScenarioConfig, moving: Sequence[Tuple[PropagationPath, ...]]):
    """Surface and interferer paths must stay inside the grid; clutter may not."""
    (aoa_min, aoa_max), (tof_min, tof_max) = scfg.grid_ranges()
    for slot, paths in enumerate(moving):
        for path in paths:
            if not (aoa_min <= path.aoa <= aoa_max and tof_min <= path.tof <= tof_max):
                raise ValueError(
                    f"slot {slot}: {path.label.value} path (aoa={np.rad2deg(path.aoa):.2f} deg, "
                    f"tof={path.tof:.4e} s) leaves the AoA-ToF grid coverage"
                )


def pouring_scenario(
    config: RadarConfig, scfg: ScenarioConfig, seed: int = 0
) -> LabeledFrameSequence:
    """Continuous pour: rising surface, moving interferers, static clutter, noise.

    Raises:
        ValueError: If the surface or an interferer leaves the grid coverage.
    """
    truth = scfg.levels()
    moving = []
    interference_slots = []
    for slot, level in enumerate(truth):
        paths = [_surface_path(scfg.radar_height, float(level), scfg.surface_magnitude)]
        active = [i for i in scfg.interferers if i.is_active(slot)]
        if active:
            interference_slots.append(slot)
        paths.extend(i.path_at(slot) for i in active)
        moving.append(tuple(paths))

    _check_coverage(scfg, moving)
    slot_paths = [paths + scfg.static_clutter for paths in moving]

    noise_std = noise_std_for_snr(scfg.surface_magnitude, scfg.snr_db, config.noise_std)
    frames, background = _render(config, slot_paths, scfg.static_clutter, noise_std, seed)
    logger.debug(
        "pour: %d slots, %d with interference, noise_std=%.3g",
        len(frames), len(interference_slots), noise_std,
    )
    return LabeledFrameSequence(
        frames=frames,
        truth_levels=truth,
        background=background,
        paths=slot_paths,
        interference_slots=tuple(interference_slots),
        mount=scfg.mount,
    )


def default_pour_config(snr_db: Optional[float] = 20.0) -> ScenarioConfig:
    """60-slot pour from 0 to 7 cm with a 1.5x gripper sweeping across the surface.

    The gripper passes through the surface bin in both AoA and ToF around
    slot 30.
    """
    return ScenarioConfig(
        num_slots=60,
        level_knots=((0, 0.0), (59, 0.07)),
        interferers=(
            Interferer.line(
                PathLabel.GRIPPER, 1.5, active=(12, 59), aoa_deg=(61.0, 94.0),
                range_m=(0.14, 0.28), sweeps=8,
            ),
        ),
        static_clutter=(
            static_path(PathLabel.DESKTOP, 80.0, 0.33, 2.0),
            static_path(PathLabel.OTHER, 70.0, 0.16, 0.6),  # container rim
            los_path(3.0),
        ),
        snr_db=snr_db,
    )
