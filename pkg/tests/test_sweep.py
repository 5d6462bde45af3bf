"""Tests for pump-detuning sweeps."""

import numpy as np
import pytest

from wgmsqueeze.config import (
    cavity_from_parameters,
    chain_from_parameters,
    load_preset,
    sweep_config_from_parameters,
)
from wgmsqueeze.detection import DetectionChain
from wgmsqueeze.errors import ParameterError
from wgmsqueeze.sweep import (
    CSV_COLUMNS,
    ChannelSpec,
    SweepConfig,
    SweepTrace,
    channel_maximum,
    channel_minimum,
    detuning_sweep,
    pump_transmission,
)
from wgmsqueeze.variance import (
    NoiseKind,
    correct_electronic_noise,
    to_db,
    twin_difference_variance,
)


@pytest.fixture
def preset():
    return load_preset()


class TestSweepConfig:
    """Test channel and sweep settings."""

    def test_channel_taper(self):
        """Test the pump parameter at the center, the edge and outside a channel."""
        channel = ChannelSpec(center=0.0, sigma=2.0, width=10e6)
        values = channel.sigma_at(np.array([0.0, 5e6, 6e6]))
        assert values[0] == 2.0
        assert values[1] == pytest.approx(0.5)
        assert values[2] == 0.0

    def test_overlapping_channels_rejected(self):
        """Test that overlapping channels are rejected."""
        channels = (ChannelSpec(0.0, 1.5, 10e6), ChannelSpec(4e6, 1.5, 10e6))
        with pytest.raises(ParameterError, match="overlap"):
            SweepConfig(channels=channels)

    def test_touching_channels_accepted(self):
        """Test that adjacent channels sharing an edge are accepted."""
        SweepConfig(channels=(ChannelSpec(0.0, 1.5, 10e6), ChannelSpec(10e6, 1.5, 10e6)))

    def test_from_timing(self):
        """Test 50 ms sweeps at 0.1 ms resolution give 500 points."""
        cfg = SweepConfig.from_timing((), span=80e6, sweep_time=50e-3, time_resolution=1e-4)
        assert cfg.points == 500
        assert cfg.time_resolution == pytest.approx(1e-4)

    def test_invalid_width(self):
        """Test that a channel needs a positive width."""
        with pytest.raises(ParameterError):
            ChannelSpec(0.0, 1.5, 0.0)


class TestDetuningSweep:
    """Test simulated sweep traces."""

    def test_no_channels_flat(self, measured_cavity, noisy_chain):
        """Test that a sweep without channels reads the SNL everywhere."""
        trace = detuning_sweep(measured_cavity, noisy_chain, SweepConfig(points=200, fluctuations=False))
        assert len(trace) == 200
        for name in ("snl", "noise_diff", "noise_sum", "noise_single"):
            assert np.allclose(trace.column(name), 1.0)

    def test_central_channel_matches_model(self, preset):
        """Test the corrected central difference minimum against the closed form within 0.1 dB."""
        cavity = cavity_from_parameters(preset)
        chain = chain_from_parameters(preset, "twin")
        cfg = sweep_config_from_parameters(preset, "twin", fluctuations=False)
        trace = detuning_sweep(cavity, chain, cfg)

        central = min(cfg.channels, key=lambda c: abs(c.center))
        measured = channel_minimum(trace, central, NoiseKind.DIFFERENCE)
        corrected = correct_electronic_noise(measured, chain.electronic_floor)
        expected = twin_difference_variance(0.22, 0.87, chain.nu_center / cavity.gamma)
        assert to_db(corrected) == pytest.approx(expected.value_db, abs=0.1)

    def test_sum_exceeds_snl_near_threshold(self, preset):
        """Test that the sum channel rises above the SNL in the central channel."""
        cavity = cavity_from_parameters(preset)
        chain = chain_from_parameters(preset, "twin")
        cfg = sweep_config_from_parameters(preset, "twin", fluctuations=False)
        trace = detuning_sweep(cavity, chain, cfg)
        central = min(cfg.channels, key=lambda c: abs(c.center))
        assert channel_maximum(trace, central, NoiseKind.SUM) > 1.2

    def test_sum_approaches_snl_at_high_pump(self, measured_cavity):
        """Test that the sum channel is close to the SNL for sigma >= 10."""
        chain = DetectionChain(eta=0.87, electronic_floor=0.05, avg_count=1, nu_center=3.2e6)
        cfg = SweepConfig(channels=(ChannelSpec(0.0, 12.0, 30e6),), points=501, fluctuations=False)
        trace = detuning_sweep(measured_cavity, chain, cfg)
        center = trace.noise_sum[250]
        assert trace.detuning[250] == pytest.approx(0.0, abs=1.0)
        assert 1.0 < center < 1.005

    def test_single_beam_squeezed_in_center(self, preset):
        """Test that the single-beam trace dips below the SNL in the central channel."""
        cavity = cavity_from_parameters(preset)
        chain = chain_from_parameters(preset, "single")
        cfg = sweep_config_from_parameters(preset, "single", fluctuations=False)
        trace = detuning_sweep(cavity, chain, cfg)
        central = min(cfg.channels, key=lambda c: abs(c.center))
        assert channel_minimum(trace, central, NoiseKind.SINGLE_BEAM) < 1.0

    def test_fluctuations_seeded(self, measured_cavity, noisy_chain):
        """Test that fluctuations repeat under a fixed seed and change with it."""
        cfg = SweepConfig(points=300, fluctuations=True)
        a = detuning_sweep(measured_cavity, noisy_chain, cfg, seed=4)
        b = detuning_sweep(measured_cavity, noisy_chain, cfg, seed=4)
        c = detuning_sweep(measured_cavity, noisy_chain, cfg, seed=5)
        assert np.array_equal(a.snl, b.snl)
        assert not np.array_equal(a.snl, c.snl)

    def test_fluctuations_unbiased(self, measured_cavity, noisy_chain):
        """Test that the fluctuating SNL trace averages to 1 SNU."""
        trace = detuning_sweep(measured_cavity, noisy_chain, SweepConfig(points=500, fluctuations=True), seed=8)
        assert np.mean(trace.snl) == pytest.approx(1.0, abs=0.03)
        assert np.std(trace.snl) > 0

    def test_default_is_expected_reading(self, measured_cavity, noisy_chain):
        """Test that the default sweep has no estimator noise and does not depend on the seed."""
        cfg = SweepConfig(points=300)
        assert not cfg.fluctuations
        a = detuning_sweep(measured_cavity, noisy_chain, cfg, seed=4)
        b = detuning_sweep(measured_cavity, noisy_chain, cfg, seed=5)
        assert np.array_equal(a.noise_diff, b.noise_diff)
        assert np.allclose(a.snl, 1.0, rtol=0, atol=1e-12)

    def test_pump_dip(self, measured_cavity, noisy_chain):
        """Test the pump transmission column."""
        trace = detuning_sweep(measured_cavity, noisy_chain, SweepConfig(points=401, fluctuations=False))
        assert trace.pump_transmission[200] == pytest.approx(0.1)
        assert trace.pump_transmission[0] > 0.85
        assert pump_transmission(np.array([15e6]), 30e6)[0] == pytest.approx(0.55)

    def test_channel_outside_sweep(self, measured_cavity, noisy_chain):
        """Test that a channel without sweep points cannot be summarized."""
        trace = detuning_sweep(measured_cavity, noisy_chain, SweepConfig(points=50, fluctuations=False))
        with pytest.raises(ParameterError):
            channel_minimum(trace, ChannelSpec(1e9, 1.5, 1e6), NoiseKind.DIFFERENCE)


class TestSweepTrace:
    """Test trace validation and column access."""

    def test_column_order(self):
        """Test the fixed column order with pump transmission last."""
        assert CSV_COLUMNS[:5] == ("detuning", "snl", "noise_diff", "noise_sum", "noise_single")
        assert CSV_COLUMNS[-1] == "pump_transmission"

    def test_default_transmission(self):
        """Test that a missing pump transmission defaults to ones."""
        x = np.linspace(-1, 1, 5)
        trace = SweepTrace(x, np.ones(5), np.ones(5), np.ones(5), np.ones(5))
        assert np.array_equal(trace.pump_transmission, np.ones(5))

    def test_length_mismatch(self):
        """Test that all columns must have the detuning length."""
        x = np.linspace(-1, 1, 5)
        with pytest.raises(ParameterError):
            SweepTrace(x, np.ones(5), np.ones(4), np.ones(5), np.ones(5))

    def test_snl_positive(self):
        """Test that SNL entries must be positive."""
        x = np.linspace(-1, 1, 3)
        with pytest.raises(ParameterError):
            SweepTrace(x, np.array([1.0, 0.0, 1.0]), np.ones(3), np.ones(3), np.ones(3))

    def test_unknown_column(self):
        """Test that unknown column names raise KeyError."""
        x = np.linspace(-1, 1, 3)
        trace = SweepTrace(x, np.ones(3), np.ones(3), np.ones(3), np.ones(3))
        with pytest.raises(KeyError):
            trace.column("phase")
