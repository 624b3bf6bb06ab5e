"""Tests for radar parameters and frame synthesis."""

import cmath
import math

import numpy as np
import pytest

from radareye.geometry import SPEED_OF_LIGHT
from radareye.radar_model import (
    Frame,
    PathLabel,
    PropagationPath,
    RadarConfig,
    default_config,
    synthesize_frame,
)


def direct_eval(config, paths):
    """Element-wise evaluation of the signal model with the standard library."""
    freqs = config.frequencies
    out = np.zeros((config.num_antennas, config.num_freq_points), dtype=complex)
    for m in range(config.num_antennas):
        for k in range(config.num_freq_points):
            f = float(freqs[k])
            total = 0j
            for p in paths:
                total += (
                    p.attenuation
                    * cmath.exp(-2j * math.pi * f * p.tof)
                    * cmath.exp(-2j * math.pi * f * m * config.element_spacing
                                * math.cos(p.aoa) / SPEED_OF_LIGHT)
                )
            out[m, k] = total
    return out


def test_default_config():
    """Test the default radar matches the 61.8 GHz / 1x4 setup."""
    config = default_config()
    assert config.carrier_frequency == 61.8e9
    assert config.bandwidth == 3.6e9
    assert config.num_antennas == 4
    assert config.num_freq_points == 128
    assert config.noise_std == 0
    assert config.element_spacing == pytest.approx(2.426e-3, rel=1e-3)
    assert config.element_spacing == pytest.approx(SPEED_OF_LIGHT / (2 * 61.8e9))


def test_frequency_grid():
    """Test the sweep is uniform and symmetric about the carrier."""
    config = RadarConfig(60e9, 4e9, 2, 5)
    np.testing.assert_allclose(config.frequencies, [58e9, 59e9, 60e9, 61e9, 62e9])
    single = RadarConfig(60e9, 4e9, 2, 1)
    np.testing.assert_array_equal(single.frequencies, [60e9])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(num_antennas=0),
        dict(num_freq_points=0),
        dict(bandwidth=-1.0),
        dict(carrier_frequency=1e9, bandwidth=3e9),
        dict(element_spacing=0.0),
        dict(noise_std=-0.1),
    ],
)
def test_config_validation(kwargs):
    """Test invalid radar parameters are rejected."""
    base = dict(carrier_frequency=61.8e9, bandwidth=3.6e9, num_antennas=4, num_freq_points=8)
    base.update(kwargs)
    with pytest.raises(ValueError):
        RadarConfig(**base)


def test_path_validation():
    """Test reflector parameters outside their domain are rejected."""
    with pytest.raises(ValueError):
        PropagationPath(0.0, 1e-9)
    with pytest.raises(ValueError):
        PropagationPath(np.pi / 3, 0.0)
    with pytest.raises(ValueError):
        PropagationPath(np.pi / 3, 1e-9, 0j)
    with pytest.raises(ValueError):
        PropagationPath(np.pi / 3, float("nan"))


def test_label_parse():
    """Test labels parse from config spellings."""
    assert PathLabel.parse("LiquidSurface") is PathLabel.LIQUID_SURFACE
    assert PathLabel.parse("gripper") is PathLabel.GRIPPER
    assert PathLabel.parse("source_container") is PathLabel.SOURCE_CONTAINER
    with pytest.raises(ValueError):
        PathLabel.parse("robot")


def test_zero_paths_noiseless():
    """Test an empty noiseless scene gives an all-zero frame."""
    frame = synthesize_frame(default_config(), [], slot=3)
    assert frame.slot == 3
    assert frame.shape == (4, 128)
    assert not frame.samples.any()


def test_all_phases_vanish():
    """Test integer f*tau and broadside AoA give samples equal to 1."""
    fc = 60e9
    config = RadarConfig(fc, 0.0, 4, 1)
    path = PropagationPath(np.pi / 2, 100 / fc)
    frame = synthesize_frame(config, [path])
    np.testing.assert_allclose(frame.samples, np.ones((4, 1)), atol=1e-12)


def test_matches_direct_evaluation():
    """Test a 60 degree / 2 ns path against element-wise evaluation."""
    config = RadarConfig(61.8e9, 3.6e9, 4, 64)
    path = PropagationPath(np.deg2rad(60.0), 2e-9)
    frame = synthesize_frame(config, [path])
    assert np.max(np.abs(frame.samples - direct_eval(config, [path]))) < 1e-12


def test_vector_order():
    """Test the vectorized frame is antenna-major then frequency."""
    samples = np.arange(6).reshape(2, 3) + 0j
    frame = Frame(0, samples)
    np.testing.assert_array_equal(frame.vector, [0, 1, 2, 3, 4, 5])


def test_frame_is_immutable_copy():
    """Test frames copy their input and freeze it."""
    samples = np.zeros((2, 2), dtype=complex)
    frame = Frame(0, samples)
    samples[0, 0] = 5
    assert frame.samples[0, 0] == 0
    with pytest.raises(ValueError):
        frame.samples[0, 0] = 1


def test_frame_validation():
    """Test frames reject bad shapes, non-finite samples and slots."""
    with pytest.raises(ValueError):
        Frame(0, np.zeros(4))
    with pytest.raises(ValueError):
        Frame(0, np.array([[np.inf + 0j]]))
    with pytest.raises(ValueError):
        Frame(-2, np.zeros((1, 1)))


def test_linearity():
    """Test synthesis of a union equals the sum of the parts."""
    config = default_config()
    a = [PropagationPath(1.2, 1.7e-9, 0.8 - 0.1j)]
    b = [PropagationPath(1.9, 1.9e-9, 0.3j), PropagationPath(1.5, 2.0e-9, 1.1)]
    both = synthesize_frame(config, a + b).samples
    parts = synthesize_frame(config, a).samples + synthesize_frame(config, b).samples
    assert np.max(np.abs(both - parts)) < 1e-12


def test_scaling():
    """Test scaling every attenuation scales every sample."""
    config = default_config()
    z = 0.7 * np.exp(1j * 0.4)
    paths = [PropagationPath(1.2, 1.7e-9, 0.8), PropagationPath(1.9, 1.9e-9, 0.3j)]
    base = synthesize_frame(config, paths).samples
    scaled = synthesize_frame(config, [p.scaled(z) for p in paths]).samples
    np.testing.assert_allclose(scaled, z * base, atol=1e-12)


def test_determinism_and_noise():
    """Test noise is reproducible per seed and has the configured spread."""
    config = RadarConfig(61.8e9, 3.6e9, 4, 128, noise_std=0.5)
    paths = [PropagationPath(1.5, 2e-9)]
    first = synthesize_frame(config, paths, rng_seed=7)
    again = synthesize_frame(config, paths, rng_seed=7)
    other = synthesize_frame(config, paths, rng_seed=8)
    assert np.array_equal(first.samples, again.samples)
    assert not np.array_equal(first.samples, other.samples)

    noise = synthesize_frame(config, [], rng_seed=1).samples
    assert np.std(noise.real) == pytest.approx(0.5, rel=0.15)
    assert np.std(noise.imag) == pytest.approx(0.5, rel=0.15)
