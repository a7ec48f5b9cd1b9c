"""Reference velocity profiles and the integrated desired poses."""

import math

import pytest

from skidtrack.errors import OutOfRange
from skidtrack.trajectories import (
    DEFAULT_DURATIONS,
    TrajectorySpec,
    desired_pose,
    desired_state,
    integrate_reference,
    profile,
)

TOL = 1e-10


class TestSpec:
    def test_known_kinds_have_durations(self):
        assert set(DEFAULT_DURATIONS) == {"straight", "circular", "bow"}
        for kind, duration in DEFAULT_DURATIONS.items():
            assert TrajectorySpec.make(kind).duration == duration

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            TrajectorySpec("zigzag", 10.0)

    def test_nonpositive_duration_rejected(self):
        with pytest.raises(ValueError):
            TrajectorySpec("straight", 0.0)

    def test_time_domain_is_enforced(self):
        spec = TrajectorySpec("straight", 30.0)
        with pytest.raises(OutOfRange):
            profile(spec, -0.1)
        with pytest.raises(OutOfRange):
            profile(spec, 30.1)
        with pytest.raises(OutOfRange):
            desired_pose(spec, 31.0)


class TestProfiles:
    def test_straight_is_constant(self):
        spec = TrajectorySpec("straight", 30.0)
        for t in (0.0, 10.0, 29.9):
            assert profile(spec, t) == pytest.approx((0.3, 0.0, 0.0, 0.0), abs=TOL)

    def test_circular_is_constant(self):
        spec = TrajectorySpec("circular", 35.0)
        for t in (0.0, 17.0, 34.9):
            assert profile(spec, t) == pytest.approx((0.2, 0.0, 0.2, 0.0), abs=TOL)

    def test_bow_start(self):
        spec = TrajectorySpec.make("bow")
        assert profile(spec, 0.0) == pytest.approx((0.0, 0.02, 0.2, 0.0), abs=TOL)

    def test_bow_rates_are_consistent_derivatives(self):
        spec = TrajectorySpec.make("bow")
        dt = 1e-6
        for t in (3.0, 20.0, 47.0, 90.0):
            v0, vd0, w0, wd0 = profile(spec, t)
            v1, _, w1, _ = profile(spec, t + dt)
            assert (v1 - v0) / dt == pytest.approx(vd0, abs=1e-5)
            assert (w1 - w0) / dt == pytest.approx(wd0, abs=1e-5)


class TestDesiredPose:
    def test_straight_line_distance(self):
        pose = desired_pose(TrajectorySpec("straight", 30.0), 10.0)
        assert (pose.x, pose.y, pose.theta) == pytest.approx(
            (3.0, 0.0, 0.0), abs=1e-9
        )

    def test_half_circle(self):
        t_half = math.pi / 0.2
        pose = desired_pose(TrajectorySpec("circular", 35.0), t_half)
        assert pose.x == pytest.approx(0.0, abs=1e-6)
        assert pose.y == pytest.approx(2.0, abs=1e-6)
        assert abs(pose.theta) == pytest.approx(math.pi, abs=1e-6)

    def test_bow_heading_peaks_at_quarter_period(self):
        # heading is the integral of the cosine yaw profile: 2 sin(t / 10)
        t_peak = 5.0 * math.pi
        pose = desired_pose(TrajectorySpec.make("bow"), t_peak)
        assert pose.theta == pytest.approx(2.0, abs=1e-6)

    def test_heading_matches_integrated_yaw_profile(self):
        spec = TrajectorySpec.make("bow")
        dt = 0.01
        for t in (0.5, 12.0, 40.0):
            th0 = desired_pose(spec, t).theta
            th1 = desired_pose(spec, t + dt).theta
            _, _, w, wd = profile(spec, t)
            predicted = w * dt + 0.5 * wd * dt * dt
            assert th1 - th0 == pytest.approx(predicted, abs=1e-8)

    def test_integrator_returns_full_path(self):
        x, y, theta = integrate_reference(TrajectorySpec("straight", 30.0), 10.0)
        assert x == pytest.approx(3.0, abs=1e-9)
        assert y == pytest.approx(0.0, abs=TOL)
        assert theta == pytest.approx(0.0, abs=TOL)


class TestDesiredState:
    def test_bundles_pose_and_profile(self):
        spec = TrajectorySpec("circular", 35.0)
        pose = desired_pose(spec, 5.0)
        state = desired_state(spec, 5.0, pose)
        assert state.pose == pose
        assert state.v == pytest.approx(0.2, abs=TOL)
        assert state.omega == pytest.approx(0.2, abs=TOL)
        assert state.v_dot == pytest.approx(0.0, abs=TOL)
        assert state.omega_dot == pytest.approx(0.0, abs=TOL)
