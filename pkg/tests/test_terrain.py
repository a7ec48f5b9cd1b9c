"""Ground-truth slip processes: constant, piecewise spikes, smooth random."""

import math

import numpy as np
import pytest

from skidtrack.errors import OutOfRange
from skidtrack.geometry import SLIP_CAP
from skidtrack.terrain import (
    SlipProcess,
    SlipProcessConfig,
    SlipSpike,
    zero_process,
)

DT = 0.01


class TestConfig:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            SlipProcessConfig(kind="sawtooth")

    def test_nonpositive_correlation_time_rejected(self):
        with pytest.raises(ValueError):
            SlipProcessConfig(kind="smooth-random", correlation_time=0.0)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            SlipProcessConfig(kind="smooth-random", slip_sigma=-0.1)

    def test_spike_needs_positive_duration(self):
        with pytest.raises(ValueError):
            SlipSpike(t_start=0.0, duration=0.0, s_v=0.5, sigma_v=0.0)


class TestConstant:
    def test_constant_everywhere(self):
        proc = SlipProcess(SlipProcessConfig(mean_slip=0.2), 10.0, DT)
        for t in (0.0, 1.0, 5.55, 10.0):
            state = proc.at(t)
            assert state.s_v == 0.2
            assert state.sigma_v == 0.0

    def test_zero_process(self):
        proc = zero_process(5.0, DT)
        assert not proc.slip_values.any()
        assert not proc.skid_values.any()


class TestPiecewise:
    CONFIG = SlipProcessConfig(
        kind="piecewise",
        mean_slip=0.1,
        spikes=(SlipSpike(0.0, 2.0, 0.7, 0.0),),
    )

    def test_spike_overrides_baseline(self):
        proc = SlipProcess(self.CONFIG, 10.0, DT)
        assert proc.at(1.0).s_v == 0.7
        assert proc.at(1.0).sigma_v == 0.0

    def test_baseline_after_spike(self):
        proc = SlipProcess(self.CONFIG, 10.0, DT)
        assert proc.at(3.0).s_v == 0.1
        assert proc.at(3.0).sigma_v == 0.0

    def test_overlapping_spikes_first_wins(self):
        config = SlipProcessConfig(
            kind="piecewise",
            mean_slip=0.0,
            spikes=(SlipSpike(0.0, 4.0, 0.5, 0.0), SlipSpike(2.0, 4.0, 0.9, 0.0)),
        )
        proc = SlipProcess(config, 10.0, DT)
        assert proc.at(3.0).s_v == 0.5
        assert proc.at(5.0).s_v == 0.9


class TestSmoothRandom:
    CONFIG = SlipProcessConfig(
        kind="smooth-random",
        mean_slip=0.2,
        slip_sigma=0.05,
        skid_sigma=0.02,
        correlation_time=2.0,
        seed=11,
    )

    def test_deterministic_per_seed(self):
        a = SlipProcess(self.CONFIG, 20.0, DT)
        b = SlipProcess(self.CONFIG, 20.0, DT)
        assert np.array_equal(a.slip_values, b.slip_values)
        assert np.array_equal(a.skid_values, b.skid_values)

    def test_seed_changes_the_draw(self):
        a = SlipProcess(self.CONFIG, 20.0, DT)
        other = SlipProcessConfig(
            kind="smooth-random",
            mean_slip=0.2,
            slip_sigma=0.05,
            skid_sigma=0.02,
            correlation_time=2.0,
            seed=12,
        )
        b = SlipProcess(other, 20.0, DT)
        assert not np.array_equal(a.slip_values, b.slip_values)

    def test_query_paths_agree(self):
        # per-tick queries, time queries and the bulk arrays must all match
        proc = SlipProcess(self.CONFIG, 20.0, DT)
        values = proc.slip_values
        skids = proc.skid_values
        for k in (0, 1, 997, 2000):
            assert proc.at_tick(k).s_v == values[k]
            assert proc.at_tick(k).sigma_v == skids[k]
            t = k * DT
            assert proc.at(t).s_v == values[k]
        assert proc.tick_index(0.5 * DT) in (0, 1)

    def test_out_of_range_rejected(self):
        proc = SlipProcess(self.CONFIG, 20.0, DT)
        with pytest.raises(OutOfRange):
            proc.tick_index(-0.1)
        with pytest.raises(OutOfRange):
            proc.tick_index(20.1)

    def test_long_run_mean_is_stationary(self):
        duration = 1e5 * DT
        proc = SlipProcess(self.CONFIG, duration, DT)
        values = proc.slip_values
        # the process is autocorrelated: scale the standard error accordingly
        phi = math.exp(-DT / self.CONFIG.correlation_time)
        n_eff = len(values) * (1.0 - phi) / (1.0 + phi)
        se = self.CONFIG.slip_sigma / math.sqrt(n_eff)
        assert abs(values.mean() - self.CONFIG.mean_slip) <= 3.0 * se

    def test_long_run_spread_matches_stationary_sigma(self):
        duration = 1e5 * DT
        proc = SlipProcess(self.CONFIG, duration, DT)
        assert proc.slip_values.std() == pytest.approx(
            self.CONFIG.slip_sigma, rel=0.15
        )
        assert proc.skid_values.std() == pytest.approx(
            self.CONFIG.skid_sigma, rel=0.15
        )

    def test_values_respect_the_cap(self):
        wild = SlipProcessConfig(
            kind="smooth-random",
            mean_slip=0.8,
            slip_sigma=0.5,
            skid_sigma=0.02,
            correlation_time=0.5,
            seed=3,
        )
        proc = SlipProcess(wild, 200.0, DT)
        assert np.all(np.abs(proc.slip_values) <= SLIP_CAP)

    def test_spikes_override_the_random_channels(self):
        config = SlipProcessConfig(
            kind="smooth-random",
            mean_slip=0.2,
            slip_sigma=0.05,
            skid_sigma=0.02,
            correlation_time=2.0,
            spikes=(SlipSpike(1.0, 2.0, 0.7, 0.01),),
            seed=5,
        )
        proc = SlipProcess(config, 10.0, DT)
        assert proc.at(2.0).s_v == 0.7
        assert proc.at(2.0).sigma_v == 0.01
        assert proc.at(4.0).s_v != 0.7
