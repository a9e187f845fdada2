"""Driving-path sampling, trace construction, and Monte Carlo avoidance."""

import dataclasses
import math

import numpy as np
import pytest

from slewedge.conformal import WedgeRay, ray_avoid_probability
from slewedge.errors import DomainError
from slewedge.loewner import (
    AvoidanceEstimate,
    DrivingPath,
    SleParams,
    Terminated,
    Trace,
    avoid_ray,
    mc_wedge_avoidance,
    sample_driving,
    standard_params,
    trace_from_driving,
)

KAPPA_SAW = 8.0 / 3.0
FLAG_RAY = WedgeRay(0.5, 1.0)


def _params(**kw):
    base = dict(kappa=KAPPA_SAW, rho=0.0, dt=1e-3, max_time=1.0,
                stop_radius=10.0)
    base.update(kw)
    return SleParams(**base)


def _zero_driving(p: SleParams) -> DrivingPath:
    n = p.n_steps
    times = np.arange(n + 1) * p.dt
    return DrivingPath(times=times, W=np.zeros(n + 1), O=np.zeros(n + 1),
                       params=p)


def _manual_trace(points, terminated=Terminated.TIME) -> Trace:
    return Trace(points=np.asarray(points, dtype=complex), params=_params(),
                 terminated_by=terminated)


class TestParams:
    def test_standard_params_unit_ray(self):
        p = standard_params(KAPPA_SAW, 0.0, FLAG_RAY, seed=7)
        assert p.dt == pytest.approx(0.01 ** 2 / KAPPA_SAW, rel=1e-15)
        assert p.stop_radius == 10.0
        assert p.max_time == 50.0
        assert p.start_a == 0.0
        assert p.seed == 7

    def test_standard_params_scales_with_ray(self):
        # a longer obstacle relaxes dt and pushes the stop disk out with it
        p = standard_params(KAPPA_SAW, 0.0, WedgeRay(0.5, 8.0))
        assert p.dt == pytest.approx((0.01 * 8.0) ** 2 / KAPPA_SAW, rel=1e-15)
        assert p.stop_radius == 80.0
        assert p.max_time == 3200.0

    def test_standard_params_force_seeds_start(self):
        p = standard_params(KAPPA_SAW, 2.0, FLAG_RAY)
        assert p.start_a == pytest.approx(1e-4)

    def test_standard_params_rejects_flat_stop_factor(self):
        with pytest.raises(DomainError):
            standard_params(KAPPA_SAW, 0.0, FLAG_RAY, stop_factor=1.0)

    def test_n_steps_rounds_to_grid(self):
        assert _params(dt=1e-3, max_time=1.0).n_steps == 1000

    def test_invariants_rejected(self):
        with pytest.raises(DomainError):
            _params(kappa=0.0)
        with pytest.raises(DomainError):
            _params(rho=-2.0, start_a=0.1)
        with pytest.raises(DomainError):
            _params(rho=2.0)  # a force with nothing to act on
        with pytest.raises(DomainError):
            _params(dt=0.1)  # coarser than 1e-3 * max_time


class TestDriving:
    def test_deterministic_in_seed(self):
        p = _params(seed=13)
        a = sample_driving(p)
        b = sample_driving(p)
        assert np.array_equal(a.W, b.W)
        c = sample_driving(dataclasses.replace(p, seed=14))
        assert not np.array_equal(a.W, c.W)

    def test_brownian_increment_statistics(self):
        p = _params(kappa=2.0, dt=1e-3, max_time=1000.0, seed=1)
        d = sample_driving(p)
        inc = np.diff(d.W)
        n = len(inc)
        var = p.kappa * p.dt
        assert abs(inc.mean()) < 5.0 * math.sqrt(var / n)
        assert abs(inc.var() / var - 1.0) < 5.0 * math.sqrt(2.0 / n)
        assert np.all(d.O == 0.0)
        assert d.truncated_at is None

    def test_zero_kappa_limit_freezes_driving(self):
        p = _params(kappa=1e-20, start_a=3.0, seed=2)
        d = sample_driving(p)
        assert np.abs(d.W - 3.0).max() < 1e-8

    def test_bessel_second_moment(self):
        # E[X_t^2] = a^2 + (2(rho+2) + kappa) t for the rho-process gap.
        # Start well away from the origin: the Euler drift step (rho+2)/X dt
        # overshoots badly when X ~ sqrt(kappa dt), so a near-degenerate
        # start would measure scheme error, not the moment identity.
        kappa, rho, a = KAPPA_SAW, 2.0, 2.0
        p = _params(kappa=kappa, rho=rho, start_a=a, dt=1e-3, max_time=1.0)
        trials = 4000
        sq = 0.0
        for s in range(trials):
            d = sample_driving(dataclasses.replace(p, seed=s))
            sq += d.X[-1] ** 2
        sq /= trials
        exact = a * a + (2.0 * (rho + 2.0) + kappa) * 1.0
        assert abs(sq / exact - 1.0) < 0.05

    def test_force_point_stays_left_of_curve(self):
        p = _params(rho=2.0, start_a=0.1, dt=1e-4, max_time=10.0, seed=3)
        d = sample_driving(p)
        assert np.all(np.diff(d.O) <= 0.0)
        assert np.all(d.X[1:] > 0.0)


class TestTrace:
    def test_zero_driving_grows_vertical_slit(self):
        p = _params(dt=1e-3, max_time=1.0)
        tr = trace_from_driving(_zero_driving(p))
        exact = 2j * np.sqrt(tr.times)
        assert np.abs(tr.points - exact).max() < 1e-9
        assert tr.terminated_by is Terminated.TIME

    def test_constant_driving_translates_slit(self):
        p = _params(dt=1e-3, max_time=1.0)
        base = trace_from_driving(_zero_driving(p))
        c = 3.7
        n = p.n_steps
        shifted = DrivingPath(times=np.arange(n + 1) * p.dt,
                              W=np.full(n + 1, c), O=np.zeros(n + 1), params=p)
        tr = trace_from_driving(shifted)
        assert np.abs(tr.points - (base.points + c)).max() < 1e-12

    def test_trace_stays_in_closed_half_plane(self):
        p = _params(dt=1e-3, max_time=1.0, seed=5)
        tr = trace_from_driving(sample_driving(p))
        assert tr.points.imag.min() > -1e-9

    def test_radius_termination_truncates(self):
        p = _params(dt=1e-3, max_time=4.0, stop_radius=0.5, seed=6)
        tr = trace_from_driving(_zero_driving(p))
        # 2 sqrt(t) crosses 0.5 at t = 1/16, one step past the boundary
        assert tr.terminated_by is Terminated.RADIUS
        assert len(tr.points) < p.n_steps + 1
        assert abs(tr.points[-1]) > 0.5

    def test_stop_radius_override(self):
        p = _params(dt=1e-3, max_time=1.0, seed=6)
        d = _zero_driving(p)
        full = trace_from_driving(d)
        short = trace_from_driving(d, stop_radius=0.3)
        assert short.terminated_by is Terminated.RADIUS
        assert len(short.points) < len(full.points)
        with pytest.raises(DomainError):
            trace_from_driving(d, stop_radius=0.0)


class TestAvoidRay:
    def test_far_vertical_trace_avoids(self):
        tr = _manual_trace([0.0, 0.5j, 1.0j, 2.0j])
        assert avoid_ray(tr, FLAG_RAY)

    def test_crossing_segment_hits(self):
        # one long chord through the middle of the arm [1, 1 + 0.5i]
        tr = _manual_trace([0.5 + 0.0j, 1.5 + 0.5j])
        assert not avoid_ray(tr, FLAG_RAY)

    def test_touching_base_point_hits(self):
        tr = _manual_trace([0.5 + 0.0j, 1.5 + 0.0j])
        assert not avoid_ray(tr, FLAG_RAY)

    def test_collinear_overlap_hits(self):
        ray = WedgeRay(1.0, 2.0)  # arm along the real axis, [1, 3]
        tr = _manual_trace([2.5 + 0.0j, 4.0 + 0.0j])
        assert not avoid_ray(tr, ray)
        assert avoid_ray(_manual_trace([3.5 + 0.0j, 4.0 + 0.0j]), ray)

    def test_eps_margin(self):
        tr = _manual_trace([0.9 + 0.0j, 0.9 + 1.0j])  # passes 0.1 left of arm
        assert avoid_ray(tr, FLAG_RAY)
        assert avoid_ray(tr, FLAG_RAY, eps=0.05)
        assert not avoid_ray(tr, FLAG_RAY, eps=0.2)
        with pytest.raises(DomainError):
            avoid_ray(tr, FLAG_RAY, eps=-0.1)

    def test_single_point_trace_avoids(self):
        assert avoid_ray(_manual_trace([0.0j]), FLAG_RAY)


class TestMonteCarlo:
    # small geometry so the O(n^2) trace engine stays affordable
    SMALL = dict(kappa=KAPPA_SAW, rho=0.0, dt=2e-3, max_time=4.5,
                 stop_radius=3.0)

    def test_estimate_arithmetic(self):
        est = AvoidanceEstimate(params=_params(), ray=FLAG_RAY,
                                engine="welded", trials=100, hits=25,
                                n_radius=70, n_time=5, elapsed_seconds=0.0)
        assert est.p_hat == 0.75
        assert est.std_err == pytest.approx(math.sqrt(0.75 * 0.25 / 100))
        assert not est.time_truncation_warning

    def test_engines_agree_per_trial(self):
        # same trial index => same driving path, so the two engines should
        # classify all but the knife-edge trials identically
        disagree = 0
        hits_w = hits_t = 0
        for s in range(120):
            p = SleParams(seed=s, **self.SMALL)
            w = mc_wedge_avoidance(p, FLAG_RAY, trials=1, engine="welded")
            t = mc_wedge_avoidance(p, FLAG_RAY, trials=1, engine="trace")
            disagree += w.hits != t.hits
            hits_w += w.hits
            hits_t += t.hits
        assert disagree <= 6
        assert 0 < hits_w < 120  # both outcomes actually exercised
        assert abs(hits_w - hits_t) <= disagree

    def test_workers_partition_invariance(self):
        p = SleParams(seed=21, **self.SMALL)
        one = mc_wedge_avoidance(p, FLAG_RAY, trials=60, workers=1)
        three = mc_wedge_avoidance(p, FLAG_RAY, trials=60, workers=3)
        assert (one.hits, one.n_radius, one.n_time) == \
               (three.hits, three.n_radius, three.n_time)

    def test_time_truncation_warning_set(self):
        p = _params(dt=1e-5, max_time=0.01, stop_radius=50.0, seed=4)
        est = mc_wedge_avoidance(p, FLAG_RAY, trials=50)
        assert est.n_time == 50 and est.n_radius == 0
        assert est.time_truncation_warning
        assert est.p_hat == 1.0  # hull never grows anywhere near the arm

    def test_rejects_bad_arguments(self):
        p = SleParams(seed=0, **self.SMALL)
        with pytest.raises(DomainError):
            mc_wedge_avoidance(p, FLAG_RAY, trials=0)
        with pytest.raises(DomainError):
            mc_wedge_avoidance(p, FLAG_RAY, trials=10, engine="exact")
        with pytest.raises(DomainError):
            mc_wedge_avoidance(p, FLAG_RAY, trials=10, workers=0)

    def test_disjoint_seeds_statistically_consistent(self):
        p1 = SleParams(seed=100, **self.SMALL)
        p2 = SleParams(seed=101, **self.SMALL)
        a = mc_wedge_avoidance(p1, FLAG_RAY, trials=300)
        b = mc_wedge_avoidance(p2, FLAG_RAY, trials=300)
        gap = abs(a.p_hat - b.p_hat)
        assert gap <= 3.0 * math.hypot(a.std_err, b.std_err)


@pytest.mark.slow
class TestConvergenceToExact:
    def test_coarse_flagship_run_brackets_prediction(self):
        # resolution 5x coarser than production: the bias budget is wider,
        # but 2000 trials already pin the first two digits
        p = standard_params(KAPPA_SAW, 0.0, FLAG_RAY, seed=2027,
                            resolution=0.05)
        est = mc_wedge_avoidance(p, FLAG_RAY, trials=2000)
        exact = ray_avoid_probability(5.0 / 8.0, FLAG_RAY.theta,
                                      FLAG_RAY.length)
        assert not est.time_truncation_warning
        assert abs(est.p_hat - exact) < 3.0 * est.std_err + 0.02
