"""Tests for the static-fill and pouring scenario generators."""

import numpy as np
import pytest

from radareye.beamforming import static_peak
from radareye.geometry import SPEED_OF_LIGHT, MountGeometry
from radareye.pipeline import LevelPipeline, grid_for
from radareye.radar_model import BACKGROUND_SLOT, PathLabel, default_config
from radareye.scenario import (
    Interferer,
    ScenarioConfig,
    default_pour_config,
    noise_std_for_snr,
    pouring_scenario,
    static_fill_scenario,
    static_path,
)


def surface_tofs(sequence):
    return [
        next(p.tof for p in paths if p.label is PathLabel.LIQUID_SURFACE)
        for paths in sequence.paths
    ]


# -------------------- static fill --------------------


def test_static_fill_empty_container():
    """Test a single empty step puts the surface at 2 H / c."""
    sequence = static_fill_scenario(default_config(), [0.0], snr_db=None)
    assert len(sequence) == 1
    assert surface_tofs(sequence)[0] == pytest.approx(2 * 0.30 / SPEED_OF_LIGHT)
    assert sequence.frames[0].slot == 0
    assert sequence.background.slot == BACKGROUND_SLOT
    assert not sequence.background.samples.any()


def test_static_fill_levels():
    """Test the surface delay decreases as the level rises."""
    steps = np.linspace(0.0, 0.07, 8)
    sequence = static_fill_scenario(default_config(), steps, snr_db=None)
    np.testing.assert_array_equal(sequence.truth_levels, steps)
    tofs = surface_tofs(sequence)
    assert all(b < a for a, b in zip(tofs, tofs[1:]))
    assert tofs[-1] == pytest.approx(2 * (0.30 - 0.07) / SPEED_OF_LIGHT)


def test_static_fill_rejects_bad_levels():
    with pytest.raises(ValueError):
        static_fill_scenario(default_config(), [0.0, 0.30], snr_db=None)
    with pytest.raises(ValueError):
        static_fill_scenario(default_config(), [-0.01], snr_db=None)
    with pytest.raises(ValueError):
        static_fill_scenario(default_config(), [], snr_db=None)


def test_static_fill_clutter_in_background():
    """Test fixed reflectors appear in every frame and in the background."""
    desk = static_path(PathLabel.DESKTOP, 80.0, 0.33, 2.0)
    sequence = static_fill_scenario(
        default_config(), [0.02, 0.03], snr_db=None, static_clutter=[desk]
    )
    assert sequence.background.samples.any()
    assert all(desk in paths for paths in sequence.paths)


def test_seeded_noise():
    """Test noise is reproducible per seed and differs across seeds."""
    config = default_config()
    a = static_fill_scenario(config, [0.01, 0.02], snr_db=20.0, seed=4)
    b = static_fill_scenario(config, [0.01, 0.02], snr_db=20.0, seed=4)
    c = static_fill_scenario(config, [0.01, 0.02], snr_db=20.0, seed=5)
    for x, y in zip(a.frames + [a.background], b.frames + [b.background]):
        assert np.array_equal(x.samples, y.samples)
    assert not np.array_equal(a.frames[0].samples, c.frames[0].samples)


def test_noise_std_for_snr():
    assert noise_std_for_snr(1.0, 20.0) == pytest.approx(1 / np.sqrt(200))
    assert noise_std_for_snr(2.0, 0.0) == pytest.approx(2 / np.sqrt(2))
    assert noise_std_for_snr(1.0, None) == 0.0
    assert noise_std_for_snr(1.0, None, default=0.3) == 0.3


# -------------------- config --------------------


def test_scenario_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(level_knots=((5, 0.0), (5, 0.01)))
    with pytest.raises(ValueError):
        ScenarioConfig(level_knots=((0, 0.30),))
    with pytest.raises(ValueError):
        ScenarioConfig(num_slots=1)
    with pytest.raises(ValueError):
        ScenarioConfig(level_knots=())
    with pytest.raises(ValueError):
        ScenarioConfig(radar_height=0.1, max_level=0.15)


def test_level_trajectory():
    """Test knots interpolate linearly and hold outside their span."""
    scfg = ScenarioConfig(num_slots=10, level_knots=((2, 0.01), (6, 0.05)))
    levels = scfg.levels()
    assert levels[0] == levels[2] == pytest.approx(0.01)
    assert levels[4] == pytest.approx(0.03)
    assert levels[9] == pytest.approx(0.05)
    assert scfg.level_at(3) == pytest.approx(0.02)


def test_interferer_line():
    """Test trajectories move linearly and clamp outside the active window."""
    gripper = Interferer.line(PathLabel.GRIPPER, 1.5, (10, 20), (60.0, 70.0), (0.14, 0.24))
    assert gripper.active == (10, 20)
    assert gripper.is_active(10) and gripper.is_active(20)
    assert not gripper.is_active(21)
    aoa, tof = gripper.position(15)
    assert np.rad2deg(aoa) == pytest.approx(65.0)
    assert tof * SPEED_OF_LIGHT / 2 == pytest.approx(0.19)
    assert gripper.position(0) == gripper.position(10)
    assert gripper.path_at(25).label is PathLabel.GRIPPER

    with pytest.raises(ValueError):
        Interferer.line(PathLabel.GRIPPER, 1.0, (5, 4), (60.0, 70.0), (0.14, 0.24))
    with pytest.raises(ValueError):
        Interferer.line(PathLabel.GRIPPER, 0.0, (5, 6), (60.0, 70.0), (0.14, 0.24))
    with pytest.raises(ValueError):
        Interferer.line(PathLabel.GRIPPER, 1.0, (5, 6), (60.0, 70.0), (0.14, 0.24), sweeps=0)


def test_interferer_sweeps_back_and_forth():
    """Test each pass runs end to end and the next one turns back."""
    gripper = Interferer.line(
        PathLabel.GRIPPER, 1.5, (0, 4), (60.0, 70.0), (0.14, 0.24), sweeps=2
    )
    degrees = [np.rad2deg(gripper.position(slot)[0]) for slot in range(5)]
    assert degrees == pytest.approx([60.0, 65.0, 70.0, 65.0, 60.0])
    _, tof = gripper.position(2)
    assert tof * SPEED_OF_LIGHT / 2 == pytest.approx(0.24)


# -------------------- pour --------------------


def test_default_pour():
    """Test the default pour: 60 slots, gripper from slot 12 on, rising surface."""
    sequence = pouring_scenario(default_config(), default_pour_config())
    assert len(sequence) == 60
    assert sequence.interference_slots == tuple(range(12, 60))
    assert sequence.truth_levels[0] == 0.0
    assert sequence.truth_levels[-1] == pytest.approx(0.07)
    tofs = surface_tofs(sequence)
    assert all(b < a for a, b in zip(tofs, tofs[1:]))
    for slot, paths in enumerate(sequence.paths):
        has_gripper = any(p.label is PathLabel.GRIPPER for p in paths)
        assert has_gripper == (slot >= 12)
        assert any(p.label is PathLabel.DESKTOP for p in paths)


def test_default_gripper_crosses_surface_bin():
    """Test the gripper passes within two bins of the surface in both axes."""
    config = default_config()
    mount = MountGeometry()
    sequence = pouring_scenario(config, default_pour_config(snr_db=None))
    grid = grid_for(config, mount)
    gaps = []
    for paths in sequence.paths:
        bins = {p.label: grid.nearest_bin(p.aoa, p.tof) for p in paths}
        if PathLabel.GRIPPER in bins:
            (i, j), (i2, j2) = bins[PathLabel.LIQUID_SURFACE], bins[PathLabel.GRIPPER]
            gaps.append((abs(i - i2), abs(j - j2)))
    assert any(di <= 2 and dj <= 2 for di, dj in gaps)
    # most of the time it is well clear of the surface bin
    assert sum(max(di, dj) > 5 for di, dj in gaps) > len(gaps) // 2


def test_constant_trajectory():
    scfg = ScenarioConfig(num_slots=5, level_knots=((0, 0.03),))
    sequence = pouring_scenario(default_config(), scfg)
    np.testing.assert_allclose(sequence.truth_levels, 0.03)


def test_static_scene_frames_identical():
    """Test a noiseless scene without motion gives identical frames."""
    scfg = ScenarioConfig(
        num_slots=4,
        level_knots=((0, 0.02),),
        static_clutter=(static_path(PathLabel.DESKTOP, 80.0, 0.33, 2.0),),
    )
    frames = pouring_scenario(default_config(), scfg).frames
    for frame in frames[1:]:
        assert np.array_equal(frame.samples, frames[0].samples)


def test_coverage_rejected():
    """Test surface and interferers must stay on the grid."""
    stray = Interferer.line(PathLabel.GRIPPER, 1.0, (0, 3), (30.0, 30.0), (0.2, 0.2))
    with pytest.raises(ValueError, match="Gripper"):
        pouring_scenario(default_config(), ScenarioConfig(num_slots=4, interferers=(stray,)))
    with pytest.raises(ValueError):
        pouring_scenario(
            default_config(), ScenarioConfig(num_slots=4, level_knots=((0, 0.0), (3, 0.2)))
        )


def test_clutter_may_leave_grid():
    """Test static clutter outside the grid is accepted."""
    scfg = ScenarioConfig(
        num_slots=3, static_clutter=(static_path(PathLabel.OTHER, 90.0, 0.0075, 3.0),)
    )
    assert len(pouring_scenario(default_config(), scfg)) == 3


def test_surface_is_peak_without_interferers():
    """Test the clean spectrum peaks at the surface ToF bin in every slot."""
    config = default_config()
    mount = MountGeometry()
    scfg = ScenarioConfig(num_slots=10, level_knots=((0, 0.0), (9, 0.05)))
    sequence = pouring_scenario(config, scfg)
    pipeline = LevelPipeline(grid_for(config, mount), mount, methods=("peak",))
    for frame, tof in zip(sequence.frames, surface_tofs(sequence)):
        (_, j), _ = static_peak(pipeline.spectrum(frame, sequence.background))
        assert j == pipeline.grid.nearest_bin(np.pi / 2, tof)[1]


def test_gripper_takes_the_peak():
    """Test the stronger gripper echo wins the per-frame peak while present."""
    config = default_config()
    mount = MountGeometry()
    sequence = pouring_scenario(config, default_pour_config(snr_db=None))
    pipeline = LevelPipeline(grid_for(config, mount), mount, methods=("peak",))
    (i, _), _ = static_peak(pipeline.spectrum(sequence.frames[24], sequence.background))
    assert i < 5
    (i, _), _ = static_peak(pipeline.spectrum(sequence.frames[10], sequence.background))
    assert 28 <= i <= 35
