"""Per-slot processing chain and run reports.

background subtraction -> spectrum -> LoS mask -> normalization -> estimators
"""

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from .beamforming import (
    Spectrum,
    SteeringGrid,
    apply_los_mask,
    build_grid,
    compute_spectrum,
    normalize_spectrum,
    subtract_background,
)
from .geometry import MountGeometry, default_grid_ranges, range_to_tof
from .radar_model import Frame, RadarConfig
from .tracking import BaseLevelEstimator, create_estimator, get_available_estimators
from .tracking.baselines import BaselineParams
from .tracking.tracker import TrackerParams

logger = logging.getLogger(__name__)

LOS_RANGE_FLOOR = 0.05  # m; echoes closer than this are direct leakage
DEFAULT_LOS_FLOOR = range_to_tof(LOS_RANGE_FLOOR)
DEFAULT_WARMUP = 3
PRIMARY_ORDER = ("track", "peak", "smooth")


def grid_for(
    radar: RadarConfig,
    mount: MountGeometry,
    n: int = 64,
    aoa_range: Optional[Tuple[float, float]] = None,
) -> SteeringGrid:
    """Steering grid covering the container under ``mount``."""
    default_aoa, tof_range = default_grid_ranges(mount)
    return build_grid(radar, n, aoa_range or default_aoa, tof_range)


@dataclass
class RunRow:
    slot: int
    truth: Optional[float]
    levels: Dict[str, float]
    latency_us: float


@dataclass
class RunReport:
    methods: Tuple[str, ...]
    primary: str
    rows: List[RunRow] = field(default_factory=list)

    @property
    def has_truth(self) -> bool:
        return any(row.truth is not None for row in self.rows)

    def median_error(self, method: str, slots: Optional[Sequence[int]] = None) -> Optional[float]:
        """Median absolute level error (m) over slots with truth, optionally a subset."""
        wanted = None if slots is None else set(slots)
        errs = [
            abs(row.levels[method] - row.truth)
            for row in self.rows
            if row.truth is not None and (wanted is None or row.slot in wanted)
        ]
        return float(np.median(errs)) if errs else None

    def median_latency_us(self) -> float:
        return float(np.median([row.latency_us for row in self.rows])) if self.rows else 0.0

    def summary(self) -> Dict[str, Optional[float]]:
        out: Dict[str, Optional[float]] = {
            f"{m}_median_error_m": self.median_error(m) for m in self.methods
        }
        out["median_latency_us"] = self.median_latency_us()
        return out

    def summary_line(self) -> str:
        parts = []
        if self.has_truth:
            for method in self.methods:
                parts.append(f"{method} median error {self.median_error(method) * 100:.3f} cm")
        parts.append(f"median latency {self.median_latency_us():.1f} us ({self.primary})")
        return "; ".join(parts)

    def columns(self) -> List[str]:
        return ["slot", "truth_m"] + [f"{m}_m" for m in self.methods] + ["latency_us"]

    def write_csv(self, out: Union[str, Path, TextIO]):
        """Per-slot rows; truth/error cells stay empty when truth is absent."""
        if isinstance(out, (str, Path)):
            with open(out, "w", newline="", encoding="utf-8") as f:
                self.write_csv(f)
            return
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns())
        for row in self.rows:
            writer.writerow(
                [row.slot, "" if row.truth is None else f"{row.truth:.6f}"]
                + [f"{row.levels[m]:.6f}" for m in self.methods]
                + [f"{row.latency_us:.1f}"]
            )


class LevelPipeline:
    """Runs the selected estimators over a frame sequence."""

    def __init__(
        self,
        grid: SteeringGrid,
        mount: MountGeometry,
        methods: Sequence[str] = PRIMARY_ORDER,
        use_background: bool = True,
        normalize: bool = True,
        los_floor: Optional[float] = DEFAULT_LOS_FLOOR,
        tracker_params: Optional[TrackerParams] = None,
        baseline_params: Optional[BaselineParams] = None,
        warmup: int = DEFAULT_WARMUP,
    ):
        unknown = [m for m in methods if m not in get_available_estimators()]
        if unknown or not methods:
            raise ValueError(f"unknown or empty method selection: {list(methods)}")
        self.grid = grid
        self.mount = mount
        self.methods = tuple(m for m in PRIMARY_ORDER if m in methods)
        self.primary = self.methods[0]
        self.use_background = use_background
        self.normalize = normalize
        self.los_floor = los_floor

        params = {
            "track": {"params": tracker_params or TrackerParams(), "warmup": warmup},
            "peak": {},
            "smooth": {"params": baseline_params or BaselineParams()},
        }
        self.estimators: Dict[str, BaseLevelEstimator] = {
            m: create_estimator(m, grid, mount, **params[m]) for m in self.methods
        }

    def spectrum(self, frame: Frame, background: Optional[Frame] = None) -> Spectrum:
        """Spectrum stage for one slot."""
        if self.use_background and background is not None:
            frame = subtract_background(frame, background)
        spectrum = compute_spectrum(self.grid, frame)
        if self.los_floor is not None:
            spectrum = apply_los_mask(spectrum, self.los_floor)
        if self.normalize:
            spectrum = normalize_spectrum(spectrum)
        return spectrum

    def reset(self):
        for estimator in self.estimators.values():
            estimator.reset()

    def run(
        self,
        frames: Sequence[Frame],
        background: Optional[Frame] = None,
        truth: Optional[Sequence[float]] = None,
    ) -> RunReport:
        """Process ``frames`` in slot order.

        Latency covers the spectrum stage plus the primary estimator's update.
        """
        if truth is not None and len(truth) != len(frames):
            raise ValueError(f"{len(truth)} truth levels for {len(frames)} frames")
        if self.use_background and background is None:
            logger.debug("no background frame, skipping differential subtraction")

        self.reset()
        report = RunReport(methods=self.methods, primary=self.primary)
        primary = self.estimators[self.primary]
        for index, frame in enumerate(frames):
            start = time.perf_counter_ns()
            spectrum = self.spectrum(frame, background)
            levels = {self.primary: primary.update(spectrum).level}
            elapsed = time.perf_counter_ns() - start
            for name, estimator in self.estimators.items():
                if name != self.primary:
                    levels[name] = estimator.update(spectrum).level
            report.rows.append(
                RunRow(
                    slot=frame.slot,
                    truth=None if truth is None else float(truth[index]),
                    levels=levels,
                    latency_us=elapsed / 1e3,
                )
            )

        logger.info("processed %d slots: %s", len(report.rows), report.summary_line())
        return report
