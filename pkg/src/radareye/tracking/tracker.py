"""Physics-informed level tracking over a sequence of AoA-ToF spectra.

The surface moves slowly, so the tracker searches for the minimal-cost bin
path through the spectra where each edge costs

    c_t(b -> b') = -P_t(b) - P_{t+1}(b') + omega * (omega_theta |di| + omega_tau |dj|)

and every transition stays inside the Chebyshev ball of radius Q. The search
is an online Viterbi recursion: one ``step`` per slot, a cumulative cost table
plus a bounded ring of backpointer tables.

The displacement penalty makes the cost-table arg-min trail a moving surface
by a bin or two, so the reported position is the spectral peak reached by
climbing from that bin, at most Q bins away.

Internally all windows are laid out ToF-major so that argmin's first-hit rule
gives the tie-break (smallest ToF index, then smallest AoA index).
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..beamforming import Bin, Spectrum, SteeringGrid, local_peak, refine_peak, static_peak
from ..errors import DimensionMismatchError, EnumerationTooLargeError, TrackingError
from ..geometry import MountGeometry, tof_to_range
from .base import BaseLevelEstimator, LevelEstimate

logger = logging.getLogger(__name__)

DEFAULT_HISTORY_DEPTH = 256
MAX_ENUMERATION = 10**7


@dataclass(frozen=True)
class TrackerParams:
    omega: float = 1.0
    omega_theta: float = 0.1
    omega_tau: float = 0.1
    q: int = 5
    free_start: bool = False
    history_depth: int = DEFAULT_HISTORY_DEPTH

    def __post_init__(self):
        for name in ("omega", "omega_theta", "omega_tau"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite value >= 0, got {value}")
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.history_depth < 1:
            raise ValueError(f"history_depth must be >= 1, got {self.history_depth}")

    def penalty(self, di, dj):
        """Displacement term of the transition cost."""
        return self.omega * (self.omega_theta * np.abs(di) + self.omega_tau * np.abs(dj))


@dataclass
class TrackerState:
    """Cumulative cost table and backpointers up to ``slot``.

    ``current_estimate`` is the arg-min of the cost table; ``peak_bin`` is the
    spectral peak next to it that the level is read from.

    ``backpointers[k]`` maps every bin of one slot to the flat index
    (i * N + j) of its predecessor, or -1 when the bin is unreachable.
    """

    slot: int
    cost_table: np.ndarray = field(repr=False)
    current_estimate: Bin
    peak_bin: Bin
    initial_bin: Bin
    spectrum: Spectrum = field(repr=False)
    backpointers: Deque[np.ndarray] = field(repr=False, default_factory=deque)
    steps: int = 0
    transitions: int = 0  # candidate (source, target) pairs scored by step()

    @property
    def cost(self) -> float:
        """Cumulative cost of the best path ending at the current estimate."""
        return float(self.cost_table[self.current_estimate])

    @property
    def refined(self) -> Tuple[float, float]:
        return refine_peak(self.spectrum, self.peak_bin)


class Backtrack(NamedTuple):
    path: List[Bin]  # oldest first
    truncated: bool  # True when older slots were evicted from the ring


def transition_cost(
    params: TrackerParams, p_t: Spectrum, p_next: Spectrum, src: Bin, dst: Bin
) -> float:
    """Cost of moving from bin ``src`` at slot t to bin ``dst`` at slot t+1."""
    (i, j), (i2, j2) = src, dst
    if p_t.mask[i, j] or p_next.mask[i2, j2]:
        return float("inf")
    # Same evaluation order as the vectorized recursion in step().
    return float(
        -p_t.values[i, j] - p_next.values[i2, j2]
        + params.omega * (params.omega_theta * abs(i - i2) + params.omega_tau * abs(j - j2))
    )


def _argmin_bin(table: np.ndarray) -> Bin:
    flat = table.T.ravel()
    j, i = divmod(int(np.argmin(flat)), table.shape[0])
    return (i, j)


def _mean_spectrum(spectra: Sequence[Spectrum]) -> Spectrum:
    first = spectra[0]
    for other in spectra[1:]:
        if other.shape != first.shape:
            raise DimensionMismatchError(
                f"warm-up spectra disagree in shape: {first.shape} vs {other.shape}"
            )
    values = np.mean([s.values for s in spectra], axis=0)
    mask = np.logical_or.reduce([s.mask for s in spectra])
    return Spectrum(
        slot=spectra[-1].slot,
        values=values,
        mask=mask,
        normalized=all(s.normalized for s in spectra),
        aoa_bins=first.aoa_bins,
        tof_bins=first.tof_bins,
    )


def init_tracker(
    params: TrackerParams,
    warmup_spectra: Sequence[Spectrum],
    initial: Optional[Bin] = None,
) -> TrackerState:
    """Start the path search from the static-phase spectra.

    The initial bin is the static peak of the element-wise mean of the warm-up
    spectra, unless ``initial`` is given. With the fixed start the cost table
    is 0 at that bin and +inf elsewhere; ``params.free_start`` seeds it with
    -P of the last warm-up spectrum instead.

    Raises:
        TrackingError: If no warm-up spectrum is given or all bins are masked.
    """
    if not warmup_spectra:
        raise TrackingError("init_tracker needs at least one warm-up spectrum")
    mean = _mean_spectrum(list(warmup_spectra))
    last = warmup_spectra[-1]

    if initial is None:
        initial, _ = static_peak(mean)
    initial = (int(initial[0]), int(initial[1]))
    if last.mask[initial]:
        raise TrackingError(f"initial bin {initial} is masked")

    if params.free_start:
        cost = np.where(last.mask, np.inf, -last.values)
        current = _argmin_bin(cost)
    else:
        cost = np.full(last.shape, np.inf)
        cost[initial] = 0.0
        current = initial

    logger.debug(
        "tracker initialized at slot %d from %d warm-up spectra: bin %s (%s start)",
        last.slot, len(warmup_spectra), initial, "free" if params.free_start else "fixed",
    )
    return TrackerState(
        slot=last.slot,
        cost_table=cost,
        current_estimate=current,
        peak_bin=local_peak(last, current, params.q),
        initial_bin=initial,
        spectrum=last,
        backpointers=deque(maxlen=params.history_depth),
    )


def _offset_penalty(params: TrackerParams) -> np.ndarray:
    """Penalty for every (dj, di) window offset, ToF offset first."""
    q = params.q
    offsets = np.arange(-q, q + 1, dtype=float)
    dj, di = np.meshgrid(offsets, offsets, indexing="ij")
    return params.penalty(di, dj)


def step(
    state: TrackerState, params: TrackerParams, p_t: Spectrum, p_next: Spectrum
) -> TrackerState:
    """Advance the recursion by one slot, updating ``state`` in place.

    D_{T+1}(b') = min over admissible b of D_T(b) + c_T(b -> b'); the estimate
    becomes the arg-min of D_{T+1}.

    Raises:
        DimensionMismatchError: If the spectra and the cost table disagree.
        TrackingError: If no bin of ``p_next`` has a finite-cost predecessor.
    """
    shape = state.cost_table.shape
    if p_t.shape != shape or p_next.shape != shape:
        raise DimensionMismatchError(
            f"spectra {p_t.shape}/{p_next.shape} do not match tracker grid {shape}"
        )
    q = params.q
    width = 2 * q + 1
    n_aoa, n_tof = shape

    source = np.where(p_t.mask, np.inf, state.cost_table).T
    cost_pad = np.pad(source, q, constant_values=np.inf)
    neg_pad = np.pad(-p_t.values.T, q, constant_values=0.0)
    cost_win = sliding_window_view(cost_pad, (width, width))
    neg_win = sliding_window_view(neg_pad, (width, width))

    buf = neg_win - p_next.values.T[:, :, None, None]
    buf += _offset_penalty(params)
    buf += cost_win
    flat = buf.reshape(n_tof, n_aoa, width * width)

    k = np.argmin(flat, axis=-1)
    best = np.take_along_axis(flat, k[..., None], axis=-1)[..., 0]
    best[p_next.mask.T] = np.inf

    dj, di = np.divmod(k, width)
    src_j = np.arange(n_tof)[:, None] + dj - q
    src_i = np.arange(n_aoa)[None, :] + di - q
    pred = np.where(np.isfinite(best), src_i * n_tof + src_j, -1)

    if not np.isfinite(best).any():
        raise TrackingError(
            f"slot {state.slot + 1}: no bin has a finite-cost predecessor"
        )

    cost_table = best.T.copy()
    if len(state.backpointers) == state.backpointers.maxlen:
        logger.debug("slot %d: evicting oldest backpointer table", state.slot + 1)
    state.backpointers.append(pred.T.copy())
    state.cost_table = cost_table
    state.current_estimate = _argmin_bin(cost_table)
    state.peak_bin = local_peak(p_next, state.current_estimate, q)
    state.spectrum = p_next
    state.slot += 1
    state.steps += 1
    state.transitions += buf.size
    return state


def estimate_level(
    state: TrackerState,
    grid: SteeringGrid,
    radar_height: float,
    max_level: Optional[float] = None,
) -> float:
    """Level at the refined ToF of the peak next to the current estimate.

    Clamped to [0, max_level] (``radar_height`` when no maximum is given).
    """
    if state.cost_table.shape != grid.shape:
        raise DimensionMismatchError(
            f"tracker grid {state.cost_table.shape} does not match {grid.shape}"
        )
    _, tof = state.refined
    level = radar_height - tof_to_range(tof)
    upper = radar_height if max_level is None else max_level
    return float(min(max(level, 0.0), upper))


def backtrack(state: TrackerState) -> Backtrack:
    """Minimal-cost path ending at the current estimate, oldest first."""
    n_tof = state.cost_table.shape[1]
    bin = state.current_estimate
    path = [bin]
    for pred in reversed(state.backpointers):
        k = int(pred[bin])
        if k < 0:
            raise TrackingError(f"backtrack reached an unreachable bin {bin}")
        bin = divmod(k, n_tof)
        path.append(bin)
    path.reverse()
    truncated = len(state.backpointers) < state.steps
    if truncated:
        logger.debug(
            "backtrack truncated: %d of %d transitions retained",
            len(state.backpointers), state.steps,
        )
    return Backtrack(path=path, truncated=truncated)


def brute_force_best_path(
    params: TrackerParams, spectra: Sequence[Spectrum], initial: Bin
) -> Tuple[List[Bin], float]:
    """Exhaustive minimum of the path cost from a fixed initial bin.

    Ties are resolved like ``step``: smallest final bin, then predecessors
    compared from the newest slot backwards, each bin ordered by (ToF, AoA).

    Raises:
        EnumerationTooLargeError: If N^2 (2Q+1)^(2(T-1)) exceeds 10^7.
    """
    if not spectra:
        raise ValueError("brute_force_best_path needs at least one spectrum")
    n_aoa, n_tof = spectra[0].shape
    t = len(spectra)
    size = n_aoa * n_tof * (2 * params.q + 1) ** (2 * (t - 1))
    if size > MAX_ENUMERATION:
        raise EnumerationTooLargeError(
            f"instance too large to enumerate: N^2 (2Q+1)^(2(T-1)) = {size} > {MAX_ENUMERATION}"
        )
    initial = (int(initial[0]), int(initial[1]))
    if spectra[0].mask[initial]:
        raise TrackingError(f"initial bin {initial} is masked")

    def neighbours(bin: Bin) -> List[Bin]:
        i, j = bin
        return [
            (i2, j2)
            for j2 in range(max(j - params.q, 0), min(j + params.q, n_tof - 1) + 1)
            for i2 in range(max(i - params.q, 0), min(i + params.q, n_aoa - 1) + 1)
        ]

    best: Optional[Tuple[float, tuple]] = None
    best_path: List[Bin] = []

    def visit(slot: int, path: List[Bin], total: float):
        nonlocal best, best_path
        if slot == t - 1:
            key = (total, tuple((j, i) for i, j in reversed(path)))
            if best is None or key < best:
                best = key
                best_path = list(path)
            return
        for nxt in neighbours(path[-1]):
            c = transition_cost(params, spectra[slot], spectra[slot + 1], path[-1], nxt)
            if c == float("inf"):
                continue
            path.append(nxt)
            visit(slot + 1, path, total + c)
            path.pop()

    visit(0, [initial], 0.0)
    if best is None:
        raise TrackingError("no finite-cost path exists")
    return best_path, best[0]


class PhysicsTracker(BaseLevelEstimator):
    """Online tracker: warm-up on the static phase, then one step per slot."""

    def __init__(
        self,
        grid: SteeringGrid,
        mount: MountGeometry,
        params: Optional[TrackerParams] = None,
        warmup: int = 1,
    ):
        self.params = params or TrackerParams()
        self.warmup = warmup
        self.state: Optional[TrackerState] = None
        self._buffer: List[Spectrum] = []
        super().__init__(grid, mount)

    def get_estimator_name(self) -> str:
        return "track"

    def _validate_config(self):
        super()._validate_config()
        if self.warmup < 1:
            raise ValueError(f"warmup must be >= 1, got {self.warmup}")
        if self.params.q >= self.grid.n:
            logger.debug("q=%d covers the whole %d-bin grid", self.params.q, self.grid.n)

    def update(self, spectrum: Spectrum) -> LevelEstimate:
        self._check_spectrum(spectrum)
        if self.state is not None:
            step(self.state, self.params, self.state.spectrum, spectrum)
            return self._current()

        self._buffer.append(spectrum)
        if len(self._buffer) < self.warmup:
            mean = _mean_spectrum(self._buffer)
            peak, _ = static_peak(mean)
            aoa, tof = refine_peak(mean, peak)
            return self._estimate_from(spectrum.slot, aoa, tof, peak)

        self.state = init_tracker(self.params, self._buffer)
        self._buffer = []
        return self._current()

    def _current(self) -> LevelEstimate:
        state = self.state
        aoa, tof = state.refined
        level = estimate_level(state, self.grid, self.mount.radar_height, self.mount.max_level)
        return LevelEstimate(state.slot, aoa, tof, level, state.peak_bin)

    def reset(self):
        self.state = None
        self._buffer = []
