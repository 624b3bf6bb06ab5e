"""Per-update latency benchmark: one spectrum plus one tracker step."""

import logging
import time
from dataclasses import dataclass

import numpy as np

from .geometry import MountGeometry
from .pipeline import LevelPipeline, grid_for
from .radar_model import RadarConfig
from .scenario import static_fill_scenario
from .tracking.tracker import TrackerParams

logger = logging.getLogger(__name__)

NUM_BENCH_FRAMES = 32


@dataclass(frozen=True)
class BenchResult:
    n: int
    m: int
    k: int
    q: int
    repetitions: int
    min_us: float
    median_us: float
    p99_us: float
    transitions_per_step: int

    @property
    def transition_bound(self) -> int:
        """N^2 (2Q+1)^2, the unclipped neighbourhood size."""
        return self.n * self.n * (2 * self.q + 1) ** 2

    def format(self) -> str:
        return (
            f"N={self.n} M={self.m} K={self.k} Q={self.q} reps={self.repetitions}: "
            f"min {self.min_us:.1f} us, median {self.median_us:.1f} us, "
            f"p99 {self.p99_us:.1f} us; {self.transitions_per_step} transitions/step "
            f"(bound {self.transition_bound})"
        )


def run_benchmark(
    n: int = 64,
    m: int = 4,
    k: int = 128,
    q: int = 5,
    repetitions: int = 1000,
    warmup: int = 10,
    seed: int = 0,
) -> BenchResult:
    """Time ``repetitions`` warm-cache updates after ``warmup`` untimed ones.

    Frames come from a slowly rising surface at 20 dB SNR so the tracker does
    real work; file IO and frame synthesis stay outside the timed region.
    """
    for name, value in (("n", n), ("m", m), ("k", k), ("q", q), ("repetitions", repetitions)):
        if value < 1:
            raise ValueError(f"{name} must be positive, got {value}")
    warmup = max(warmup, 1)

    radar = RadarConfig(carrier_frequency=61.8e9, bandwidth=3.6e9, num_antennas=m,
                        num_freq_points=k)
    mount = MountGeometry()
    levels = np.linspace(0.0, 0.07, NUM_BENCH_FRAMES)
    sequence = static_fill_scenario(radar, levels, snr_db=20.0, mount=mount, seed=seed)

    pipeline = LevelPipeline(
        grid_for(radar, mount, n),
        mount,
        methods=("track",),
        tracker_params=TrackerParams(q=q),
        warmup=1,
    )
    tracker = pipeline.estimators["track"]
    background = sequence.background
    frames = sequence.frames

    samples = np.empty(repetitions, dtype=np.int64)
    for index in range(warmup + repetitions):
        frame = frames[index % len(frames)]
        start = time.perf_counter_ns()
        tracker.update(pipeline.spectrum(frame, background))
        elapsed = time.perf_counter_ns() - start
        if index >= warmup:
            samples[index - warmup] = elapsed

    state = tracker.state
    per_step = state.transitions // state.steps if state.steps else 0
    micros = samples / 1e3
    result = BenchResult(
        n=n,
        m=m,
        k=k,
        q=q,
        repetitions=repetitions,
        min_us=float(micros.min()),
        median_us=float(np.median(micros)),
        p99_us=float(np.percentile(micros, 99)),
        transitions_per_step=per_step,
    )
    logger.info("bench: %s", result.format())
    return result
