"""Chordal Loewner simulation of SLE(kappa, rho) and Monte Carlo ray avoidance.

The driving process W solves

    dW = sqrt(kappa) dB + (rho / (W - O)) dt,     dO = -2 / (W - O) dt,

started from W_0 = a >= 0, O_0 = 0; X = W - O is sqrt(kappa) times a Bessel
process of dimension 1 + 2(rho+2)/kappa (rho = 0 collapses to W = a +
sqrt(kappa) B with O frozen at 0). The hull grows with capacity
parametrization: in each step of size dt it gains a vertical slit of
half-plane capacity dt at the current driving value.

Two engines answer "did the curve hit the ray before leaving the stop disk":

* ``trace``  -- build the discrete trace gamma(t_k) by composing inverse
  elementary maps (O(n^2)) and intersect it with the ray segment. Exact for
  the discrete curve, but too slow for production trial counts.
* ``welded`` -- flow the ray and the stop circle forward through the same
  elementary maps and test each step's slit against the flowed polylines
  (O(n * M)). This detects exactly the same discrete-curve crossings, up to
  polyline chord resolution, at a per-trial cost independent of history.

Both engines consume identical driving arrays, so they are interchangeable
in mc_wedge_avoidance and cross-validate each other.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import backend
from .conformal import WedgeRay
from .errors import require

__all__ = [
    "Terminated",
    "SleParams",
    "DrivingPath",
    "Trace",
    "AvoidanceEstimate",
    "standard_params",
    "sample_driving",
    "trace_from_driving",
    "avoid_ray",
    "mc_wedge_avoidance",
]


class Terminated(Enum):
    TIME = "time"
    RADIUS = "radius"


@dataclass(frozen=True)
class SleParams:
    """Parameters of one simulated SLE(kappa, rho) run.

    dt is the capacity step; the driving-scale rule of thumb is
    sqrt(kappa dt) <= 0.01 * (geometric scale of the obstacle), which
    standard_params applies. max_time bounds the run; stop_radius ends it
    early once the trace leaves that disk. rho != 0 requires start_a > 0
    (the Euler scheme cannot start the Bessel part at its boundary point).
    """

    kappa: float
    rho: float = 0.0
    start_a: float = 0.0
    dt: float = 1e-4
    max_time: float = 1.0
    stop_radius: float = 10.0
    seed: int = 0

    def __post_init__(self):
        require(self.kappa > 0, f"kappa must be positive, got {self.kappa}")
        require(self.rho > -2, f"rho must exceed -2, got {self.rho}")
        require(self.start_a >= 0, f"start_a must be >= 0, got {self.start_a}")
        require(self.dt > 0, f"dt must be positive, got {self.dt}")
        require(self.max_time > 0, f"max_time must be positive, got {self.max_time}")
        require(self.stop_radius > 0,
                f"stop_radius must be positive, got {self.stop_radius}")
        require(self.dt <= 1e-3 * self.max_time,
                f"dt = {self.dt} too coarse for max_time = {self.max_time} "
                "(need dt <= max_time / 1000)")
        if self.rho != 0.0:
            require(self.start_a > 0,
                    "rho != 0 needs start_a > 0: the force point starts at 0 "
                    "and the scheme divides by W - O")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.max_time / self.dt)))


@dataclass
class DrivingPath:
    """Sampled driving pair on the uniform grid times[k] = k dt.

    truncated_at is None unless the Bessel part hit exactly zero (possible
    only in the low-dimension regime rho < kappa/2 - 2); from there on the
    pair is frozen.
    """

    times: np.ndarray
    W: np.ndarray
    O: np.ndarray
    params: SleParams
    truncated_at: int | None = None

    @property
    def X(self) -> np.ndarray:
        return self.W - self.O


@dataclass
class Trace:
    """Discrete trace points gamma(t_k), k = 0 .. len(points)-1."""

    points: np.ndarray
    params: SleParams
    terminated_by: Terminated

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.points)) * self.params.dt


@dataclass
class AvoidanceEstimate:
    """Monte Carlo estimate of P[curve avoids the ray up to the stop disk].

    p_hat = 1 - hits/trials; std_err is the binomial standard error.
    time_truncation_warning is set when no trial reached the stop radius but
    some ran out of time, which means max_time (not geometry) decided the
    outcome and p_hat is suspect.
    """

    params: SleParams
    ray: WedgeRay
    engine: str
    trials: int
    hits: int
    n_radius: int
    n_time: int
    elapsed_seconds: float
    p_hat: float = field(init=False)
    std_err: float = field(init=False)
    time_truncation_warning: bool = field(init=False)

    def __post_init__(self):
        self.p_hat = 1.0 - self.hits / self.trials
        self.std_err = math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)
        self.time_truncation_warning = self.n_radius == 0 and self.n_time > 0


def standard_params(kappa: float, rho: float, ray: WedgeRay, seed: int = 0,
                    resolution: float = 0.01, stop_factor: float = 10.0,
                    start_a: float | None = None) -> SleParams:
    """Production parameters for a ray-avoidance run, scaled to the ray.

    scale = max(1, ray length); dt solves sqrt(kappa dt) = resolution * scale
    (driving increments resolve the obstacle to 1% by default), the stop disk
    has radius stop_factor * scale, and max_time = stop_radius^2 / 2 (a hull
    of capacity t has radius at least sqrt(2t), so the disk must be left
    before that time; TIME terminations then indicate a numerical miss, not
    a short budget).
    """
    require(resolution > 0, "resolution must be positive")
    require(stop_factor > 1, "stop disk must enclose the obstacle")
    scale = max(1.0, ray.length)
    dt = (resolution * scale) ** 2 / kappa
    stop_radius = stop_factor * scale
    if start_a is None:
        start_a = 0.0 if rho == 0.0 else 1e-4 * scale
    return SleParams(kappa=kappa, rho=rho, start_a=start_a, dt=dt,
                     max_time=stop_radius ** 2 / 2.0, stop_radius=stop_radius,
                     seed=seed)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    # one independent, reproducible stream per trial, regardless of how
    # trials are partitioned across workers
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(seed, spawn_key=(trial,))))


def _driving_arrays(p: SleParams, rng: np.random.Generator):
    """(W, O, truncated_at) on the full grid of p.n_steps steps."""
    n = p.n_steps
    if p.rho == 0.0:
        W = np.empty(n + 1)
        W[0] = p.start_a
        rng.standard_normal(n, out=W[1:])
        W[1:] *= math.sqrt(p.kappa * p.dt)
        np.cumsum(W[1:], out=W[1:])
        if p.start_a != 0.0:
            W[1:] += p.start_a
        return W, np.zeros(n + 1), None
    dB = rng.normal(0.0, math.sqrt(p.dt), size=n)
    W, O, truncated = backend.bessel_driving(dB, p.start_a, p.kappa, p.rho, p.dt)
    return W, O, (None if truncated < 0 else int(truncated))


def sample_driving(p: SleParams) -> DrivingPath:
    """Sample the driving pair for params p (deterministic in p.seed)."""
    W, O, truncated = _driving_arrays(p, _trial_rng(p.seed, 0))
    times = np.arange(p.n_steps + 1) * p.dt
    return DrivingPath(times=times, W=W, O=O, params=p, truncated_at=truncated)


def trace_from_driving(d: DrivingPath, stop_radius: float | None = None) -> Trace:
    """Discrete trace of the driving path (O(n^2) map composition).

    Truncated after the first point outside the stop disk (params.stop_radius
    unless overridden).
    """
    stop = d.params.stop_radius if stop_radius is None else stop_radius
    require(stop > 0, "stop_radius must be positive")
    pts, status = backend.loewner_trace(np.ascontiguousarray(d.W, dtype=float),
                                        d.params.dt, stop)
    term = Terminated.RADIUS if status == backend.TERM_RADIUS else Terminated.TIME
    return Trace(points=pts, params=d.params, terminated_by=term)


def _seg_point_dist2(px, py, ax, ay, bx, by):
    # squared distance from point(s) P to segment(s) AB, broadcasting freely
    vx, vy = bx - ax, by - ay
    wx, wy = px - ax, py - ay
    vv = vx * vx + vy * vy
    vv = np.where(vv > 0, vv, 1.0)  # degenerate segment: distance to A
    t = np.clip((wx * vx + wy * vy) / vv, 0.0, 1.0)
    dx = wx - t * vx
    dy = wy - t * vy
    return dx * dx + dy * dy


def avoid_ray(trace: Trace, ray: WedgeRay, eps: float = 0.0) -> bool:
    """True iff no trace segment meets the ray segment (within eps).

    eps = 0 is an exact segment-intersection test (touching counts as a
    hit); eps > 0 additionally treats any approach closer than eps as a hit.
    """
    require(eps >= 0.0, "eps must be >= 0")
    z = trace.points
    if len(z) < 2:
        return True
    ax, ay = ray.base.real, ray.base.imag
    bx, by = ray.tip.real, ray.tip.imag
    px, py = z.real[:-1], z.imag[:-1]
    qx, qy = z.real[1:], z.imag[1:]

    # orientation straddle test, vectorized over trace segments
    def orient(ox, oy, ux, uy, vx, vy):
        return (ux - ox) * (vy - oy) - (uy - oy) * (vx - ox)

    d1 = orient(ax, ay, bx, by, px, py)
    d2 = orient(ax, ay, bx, by, qx, qy)
    d3 = orient(px, py, qx, qy, ax, ay)
    d4 = orient(px, py, qx, qy, bx, by)
    crossing = (d1 * d2 <= 0) & (d3 * d4 <= 0)
    degenerate = (d1 == 0) & (d2 == 0)
    if (crossing & ~degenerate).any():
        return False
    if degenerate.any():
        # collinear cases: overlap iff 1-d projections overlap
        ex, ey = bx - ax, by - ay
        tp = (px[degenerate] - ax) * ex + (py[degenerate] - ay) * ey
        tq = (qx[degenerate] - ax) * ex + (qy[degenerate] - ay) * ey
        lo = np.minimum(tp, tq)
        hi = np.maximum(tp, tq)
        if ((hi >= 0) & (lo <= ex * ex + ey * ey)).any():
            return False
    if eps > 0.0:
        e2 = eps * eps
        # no crossing, so the minimum distance is attained endpoint-to-segment
        if (_seg_point_dist2(z.real, z.imag, ax, ay, bx, by) < e2).any():
            return False
        for cx, cy in ((ax, ay), (bx, by)):
            if (_seg_point_dist2(cx, cy, px, py, qx, qy) < e2).any():
                return False
    return True


def _ray_polyline(ray: WedgeRay, spacing: float) -> np.ndarray:
    m = max(2, int(math.ceil(ray.arm / spacing)) + 1)
    ts = np.linspace(0.0, ray.arm, m)
    return ray.base + ts * ray.direction


def _circle_polyline(radius: float, arc_step: float = 0.01) -> np.ndarray:
    # 0.01 rad chords: coarser circles let grazing radius exits slip through
    # whole chords and the trial runs to the time cap instead
    m = max(8, int(math.ceil(math.pi / arc_step)) + 1)
    ang = np.linspace(0.0, math.pi, m)
    return radius * np.exp(1j * ang)


def _weld_constants(p: SleParams, ray: WedgeRay):
    rt = math.sqrt(p.dt)
    spacing = math.sqrt(p.kappa * p.dt)  # driving scale == obstacle resolution
    near = 20.0 * rt
    lazy = max(0.4 * max(1.0, ray.length), 40.0 * rt)
    return spacing, near, lazy, spacing / 8.0


def _run_trial_welded(p: SleParams, ray_pts, circ_pts, near, lazy, merge_eps,
                      rng) -> tuple[int, int]:
    W, _, _ = _driving_arrays(p, rng)
    return backend.welded_avoidance(W, p.dt, ray_pts, circ_pts, near, lazy,
                                    8, merge_eps, 64)


def _run_trial_trace(p: SleParams, ray: WedgeRay, rng) -> tuple[int, int]:
    W, O, truncated = _driving_arrays(p, rng)
    times = np.arange(p.n_steps + 1) * p.dt
    d = DrivingPath(times=times, W=W, O=O, params=p, truncated_at=truncated)
    tr = trace_from_driving(d)
    if not avoid_ray(tr, ray):
        return backend.TERM_HIT, len(tr.points) - 1
    if tr.terminated_by is Terminated.RADIUS:
        return backend.TERM_RADIUS, len(tr.points) - 1
    return backend.TERM_TIME, len(tr.points) - 1


def _mc_range(p: SleParams, ray: WedgeRay, engine: str, lo: int, hi: int):
    """Tallies (hits, radius, time) over the trial index range [lo, hi)."""
    hits = n_radius = n_time = 0
    if engine == "welded":
        spacing, near, lazy, merge_eps = _weld_constants(p, ray)
        ray_pts = _ray_polyline(ray, spacing)
        circ_pts = _circle_polyline(p.stop_radius)
        for trial in range(lo, hi):
            status, _ = _run_trial_welded(p, ray_pts, circ_pts, near, lazy,
                                          merge_eps, _trial_rng(p.seed, trial))
            if status == backend.TERM_HIT:
                hits += 1
            elif status == backend.TERM_RADIUS:
                n_radius += 1
            else:
                n_time += 1
    else:
        for trial in range(lo, hi):
            status, _ = _run_trial_trace(p, ray, _trial_rng(p.seed, trial))
            if status == backend.TERM_HIT:
                hits += 1
            elif status == backend.TERM_RADIUS:
                n_radius += 1
            else:
                n_time += 1
    return hits, n_radius, n_time


def mc_wedge_avoidance(p: SleParams, ray: WedgeRay, trials: int,
                       engine: str = "welded", workers: int = 1) -> AvoidanceEstimate:
    """Monte Carlo probability that the curve avoids the ray before leaving
    the stop disk.

    Trial k draws its own RNG stream from (p.seed, k), so the estimate is
    invariant under the worker count and under restarts. engine is "welded"
    (production) or "trace" (O(n^2) cross-validation).
    """
    require(trials > 0, "trials must be positive")
    require(engine in ("welded", "trace"), f"unknown engine {engine!r}")
    require(workers >= 1, "workers must be >= 1")
    t0 = time.perf_counter()
    if workers == 1:
        hits, n_radius, n_time = _mc_range(p, ray, engine, 0, trials)
    else:
        from concurrent.futures import ProcessPoolExecutor
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        hits = n_radius = n_time = 0
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_mc_range, p, ray, engine, int(a), int(b))
                    for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            for f in futs:
                h, r, t = f.result()
                hits += h
                n_radius += r
                n_time += t
    return AvoidanceEstimate(params=p, ray=ray, engine=engine, trials=trials,
                             hits=hits, n_radius=n_radius, n_time=n_time,
                             elapsed_seconds=time.perf_counter() - t0)
