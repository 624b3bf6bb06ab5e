"""Scenario/radar configuration files.

Flat ``key = value`` text. ``#`` starts a comment, blank lines are ignored and
``level_knot``, ``interferer`` and ``clutter`` may repeat; every other key may
appear once. Example::

    scenario = pour
    snr_db = 20
    num_slots = 60
    level_knot = 0 0.0
    level_knot = 59 0.07
    #          label   mag start stop aoa0 aoa1 range0 range1 [sweeps]
    interferer = gripper 1.5 12 59 61 94 0.14 0.28 8
    #       label   aoa  range magnitude
    clutter = desktop 80 0.33 2.0
"""

import logging
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .errors import ConfigError
from .geometry import DEFAULT_AOA_RANGE, MountGeometry
from .radar_model import PathLabel, PropagationPath, RadarConfig, default_config
from .scenario import (
    Interferer,
    LabeledFrameSequence,
    ScenarioConfig,
    los_path,
    pouring_scenario,
    static_fill_scenario,
    static_path,
)

logger = logging.getLogger(__name__)

SCENARIO_KINDS = ("static_fill", "pour")
DEFAULT_GRID_N = 64

RADAR_KEYS = {
    "carrier_frequency": float,
    "bandwidth": float,
    "num_antennas": int,
    "num_freq_points": int,
    "element_spacing": float,
    "noise_std": float,
}
MOUNT_KEYS = {"radar_height": float, "max_level": float}
SCALAR_KEYS = {
    **RADAR_KEYS,
    **MOUNT_KEYS,
    "scenario": str,
    "snr_db": str,
    "levels": str,
    "num_slots": int,
    "slot_duration": float,
    "surface_magnitude": float,
    "los_magnitude": float,
    "grid_n": int,
    "aoa_min_deg": float,
    "aoa_max_deg": float,
}
# (fewest, most) whitespace-separated fields per repeated key
REPEATED_KEYS = {"level_knot": (2, 2), "interferer": (8, 9), "clutter": (4, 4)}


@dataclass(frozen=True)
class ScenarioFile:
    """Everything a configuration file describes."""

    kind: str
    radar: RadarConfig
    mount: MountGeometry
    snr_db: Optional[float] = None
    levels: Tuple[float, ...] = ()  # static fill steps
    scenario: Optional[ScenarioConfig] = None  # pour
    surface_magnitude: float = 1.0
    static_clutter: Tuple[PropagationPath, ...] = ()
    grid_n: int = DEFAULT_GRID_N
    aoa_range: Tuple[float, float] = DEFAULT_AOA_RANGE
    path: Optional[str] = field(default=None, compare=False)

    def generate(self, seed: int = 0) -> LabeledFrameSequence:
        """Simulate the described scenario; all randomness flows from ``seed``."""
        if self.kind == "static_fill":
            return static_fill_scenario(
                self.radar,
                self.levels,
                self.snr_db,
                mount=self.mount,
                surface_magnitude=self.surface_magnitude,
                static_clutter=self.static_clutter,
                seed=seed,
            )
        return pouring_scenario(self.radar, self.scenario, seed=seed)


@dataclass
class _Entry:
    value: str
    line: int


def resolve_config_path(name: Union[str, Path]) -> Path:
    """A path on disk, or the name of a bundled configuration (``pour``, ``pour.cfg``)."""
    path = Path(name)
    if path.exists():
        return path
    bundled_name = path.name if path.suffix else f"{path.name}.cfg"
    bundled = files("radareye") / "configs" / bundled_name
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError("no such file or bundled configuration", path=str(name))


def load_config(name: Union[str, Path]) -> ScenarioFile:
    path = resolve_config_path(name)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read configuration: {e.strerror}", path=str(path)) from e
    return parse_config(text, path=str(path))


def _tokenize(text: str, path: Optional[str]):
    scalars: Dict[str, _Entry] = {}
    repeated: Dict[str, List[_Entry]] = {key: [] for key in REPEATED_KEYS}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", path=path, line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("missing key before '='", path=path, line=number)
        if not value:
            raise ConfigError("missing value", path=path, line=number, key=key)
        if key in REPEATED_KEYS:
            repeated[key].append(_Entry(value, number))
        elif key in SCALAR_KEYS:
            if key in scalars:
                raise ConfigError(
                    f"duplicate key (first set on line {scalars[key].line})",
                    path=path, line=number, key=key,
                )
            scalars[key] = _Entry(value, number)
        else:
            raise ConfigError("unknown key", path=path, line=number, key=key)
    return scalars, repeated


class _Parser:
    def __init__(self, scalars: Dict[str, _Entry], repeated, path: Optional[str]):
        self.scalars = scalars
        self.repeated = repeated
        self.path = path

    def error(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        if line is None and key in self.scalars:
            line = self.scalars[key].line
        return ConfigError(message, path=self.path, line=line, key=key)

    def get(self, key: str, default=None):
        entry = self.scalars.get(key)
        if entry is None:
            return default
        kind = SCALAR_KEYS[key]
        try:
            return kind(entry.value)
        except ValueError:
            raise self.error(
                f"expected {kind.__name__}, got {entry.value!r}", key, entry.line
            ) from None

    def fields(self, key: str) -> List[Tuple[List[str], int]]:
        fewest, most = REPEATED_KEYS[key]
        expected = str(fewest) if fewest == most else f"{fewest} or {most}"
        rows = []
        for entry in self.repeated[key]:
            parts = entry.value.split()
            if not fewest <= len(parts) <= most:
                raise self.error(
                    f"expected {expected} fields, got {len(parts)}", key, entry.line
                )
            rows.append((parts, entry.line))
        return rows

    def numbers(self, key: str, parts: List[str], line: int, kinds) -> list:
        try:
            return [kind(p) for kind, p in zip(kinds, parts)]
        except ValueError as e:
            raise self.error(f"unparseable value ({e})", key, line) from None

    def label(self, key: str, value: str, line: int) -> PathLabel:
        try:
            return PathLabel.parse(value)
        except ValueError as e:
            raise self.error(str(e), key, line) from None

    def blame(self, exc: ValueError, keys, fallback: Optional[str] = None) -> ConfigError:
        """Attribute a dataclass validation error to the key its message names."""
        message = str(exc)
        for key in keys:
            if key in self.scalars and key in message:
                return self.error(message, key)
        return self.error(message, fallback)


def parse_config(text: str, path: Optional[str] = None) -> ScenarioFile:
    """Parse configuration text.

    Raises:
        ConfigError: With the line and key of the first problem found
    """
    scalars, repeated = _tokenize(text, path)
    p = _Parser(scalars, repeated, path)

    kind = p.get("scenario")
    if kind is None:
        raise p.error("missing required key", "scenario")
    if kind not in SCENARIO_KINDS:
        raise p.error(f"must be one of {', '.join(SCENARIO_KINDS)}, got {kind!r}", "scenario")

    base = default_config()
    radar_args = {
        "carrier_frequency": p.get("carrier_frequency", base.carrier_frequency),
        "bandwidth": p.get("bandwidth", base.bandwidth),
        "num_antennas": p.get("num_antennas", base.num_antennas),
        "num_freq_points": p.get("num_freq_points", base.num_freq_points),
        "element_spacing": p.get("element_spacing"),
        "noise_std": p.get("noise_std", base.noise_std),
    }
    try:
        radar = RadarConfig(**radar_args)
    except ValueError as e:
        raise p.blame(e, RADAR_KEYS) from None

    defaults = MountGeometry()
    try:
        mount = MountGeometry(
            p.get("radar_height", defaults.radar_height),
            p.get("max_level", defaults.max_level),
        )
    except ValueError as e:
        raise p.blame(e, MOUNT_KEYS) from None

    snr_db = None
    snr_text = p.get("snr_db")
    if snr_text is not None and snr_text.lower() != "none":
        try:
            snr_db = float(snr_text)
        except ValueError:
            raise p.error(f"expected a number or 'none', got {snr_text!r}", "snr_db") from None

    grid_n = p.get("grid_n", DEFAULT_GRID_N)
    if grid_n < 2:
        raise p.error(f"must be >= 2, got {grid_n}", "grid_n")
    aoa_min = p.get("aoa_min_deg", float(np.rad2deg(DEFAULT_AOA_RANGE[0])))
    aoa_max = p.get("aoa_max_deg", float(np.rad2deg(DEFAULT_AOA_RANGE[1])))
    if not 0 < aoa_min < aoa_max < 180:
        raise p.error(
            f"AoA range [{aoa_min}, {aoa_max}] deg must satisfy 0 < min < max < 180",
            "aoa_min_deg" if "aoa_min_deg" in scalars else "aoa_max_deg",
        )
    aoa_range = (float(np.deg2rad(aoa_min)), float(np.deg2rad(aoa_max)))

    surface_magnitude = p.get("surface_magnitude", 1.0)
    if not surface_magnitude > 0:
        raise p.error(f"must be positive, got {surface_magnitude}", "surface_magnitude")

    clutter = []
    for parts, line in p.fields("clutter"):
        label = p.label("clutter", parts[0], line)
        aoa_deg, range_m, magnitude = p.numbers("clutter", parts[1:], line, (float,) * 3)
        try:
            clutter.append(static_path(label, aoa_deg, range_m, magnitude))
        except ValueError as e:
            raise p.error(str(e), "clutter", line) from None
    los_magnitude = p.get("los_magnitude")
    if los_magnitude is not None:
        if not los_magnitude > 0:
            raise p.error(f"must be positive, got {los_magnitude}", "los_magnitude")
        clutter.append(los_path(los_magnitude))

    common = dict(
        kind=kind,
        radar=radar,
        mount=mount,
        snr_db=snr_db,
        surface_magnitude=surface_magnitude,
        static_clutter=tuple(clutter),
        grid_n=grid_n,
        aoa_range=aoa_range,
        path=path,
    )

    if kind == "static_fill":
        levels = _parse_levels(p, mount)
        logger.debug("parsed static_fill config with %d levels", len(levels))
        return ScenarioFile(levels=levels, **common)

    scenario = _parse_pour(p, mount, snr_db, surface_magnitude, tuple(clutter), aoa_range)
    logger.debug("parsed pour config: %d slots, %d interferers",
                 scenario.num_slots, len(scenario.interferers))
    return ScenarioFile(scenario=scenario, **common)


def _parse_levels(p: _Parser, mount: MountGeometry) -> Tuple[float, ...]:
    text = p.get("levels")
    if text is None:
        raise p.error("missing required key for scenario = static_fill", "levels")
    try:
        levels = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise p.error(f"unparseable level list ({e})", "levels") from None
    if not levels:
        raise p.error("needs at least one level", "levels")
    for level in levels:
        if not 0 <= level < mount.radar_height:
            raise p.error(
                f"level {level} must lie in [0, radar_height={mount.radar_height})", "levels"
            )
    return levels


def _parse_pour(
    p: _Parser,
    mount: MountGeometry,
    snr_db: Optional[float],
    surface_magnitude: float,
    clutter: Tuple[PropagationPath, ...],
    aoa_range: Tuple[float, float],
) -> ScenarioConfig:
    knots = []
    for parts, line in p.fields("level_knot"):
        slot, level = p.numbers("level_knot", parts, line, (int, float))
        if not 0 <= level < mount.radar_height:
            raise p.error(
                f"level {level} must lie in [0, radar_height={mount.radar_height})",
                "level_knot", line,
            )
        knots.append((slot, level))
    if not knots:
        raise p.error("scenario = pour needs at least one level_knot", "level_knot")

    interferers = []
    for parts, line in p.fields("interferer"):
        label = p.label("interferer", parts[0], line)
        magnitude, start, stop, aoa0, aoa1, range0, range1, *sweeps = p.numbers(
            "interferer", parts[1:], line, (float, int, int, float, float, float, float, int)
        )
        try:
            interferers.append(
                Interferer.line(
                    label, magnitude, (start, stop), (aoa0, aoa1), (range0, range1),
                    sweeps=sweeps[0] if sweeps else 1,
                )
            )
        except ValueError as e:
            raise p.error(str(e), "interferer", line) from None

    defaults = ScenarioConfig()
    num_slots = p.get("num_slots", defaults.num_slots)
    slot_duration = p.get("slot_duration", defaults.slot_duration)
    try:
        return ScenarioConfig(
            radar_height=mount.radar_height,
            max_level=mount.max_level,
            num_slots=num_slots,
            slot_duration=slot_duration,
            level_knots=tuple(knots),
            interferers=tuple(interferers),
            surface_magnitude=surface_magnitude,
            static_clutter=clutter,
            snr_db=snr_db,
            aoa_range=aoa_range,
        )
    except ValueError as e:
        raise p.blame(e, ("num_slots", "slot_duration"), fallback="level_knot") from None
