"""Fitting helpers for extracting power laws from simulation output.

Small, dependency-light routines shared by the Monte Carlo drivers and the
walk-counting experiments: ordinary least squares in log-log coordinates,
finite-size extrapolation of successive slopes, binomial confidence
intervals, and blocked standard errors for correlated series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import require

__all__ = [
    "FitResult",
    "loglog_fit",
    "successive_slopes",
    "proportion_interval",
    "blocked_std_err",
]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    slope_std_err: float
    residual_rms: float
    n_points: int


def loglog_fit(xs, ys) -> FitResult:
    """Least-squares line through (log x, log y).

    Both inputs must be positive. slope_std_err is the usual OLS standard
    error; with only two points (zero residual degrees of freedom) it is
    reported as 0.0.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    require(xs.shape == ys.shape and xs.ndim == 1, "xs and ys must be equal-length 1-d")
    require(len(xs) >= 2, "need at least two points to fit a line")
    require(np.all(xs > 0) and np.all(ys > 0), "log-log fit needs positive data")
    lx = np.log(xs)
    ly = np.log(ys)
    n = len(lx)
    dx = lx - lx.mean()
    sxx = float(dx @ dx)
    require(sxx > 0, "degenerate fit: all x equal")
    slope = float(dx @ (ly - ly.mean())) / sxx
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    rss = float(resid @ resid)
    if n > 2:
        slope_se = math.sqrt(rss / (n - 2) / sxx)
    else:
        slope_se = 0.0
    return FitResult(slope, intercept, slope_se, math.sqrt(rss / n), n)


def _pairwise_slopes(ns, vs):
    ns = np.asarray(ns, dtype=float)
    vs = np.asarray(vs, dtype=float)
    return (np.log(vs[1:]) - np.log(vs[:-1])) / (np.log(ns[1:]) - np.log(ns[:-1]))


def successive_slopes(ns, vs) -> tuple[np.ndarray, float]:
    """Pairwise log-log slopes plus a finite-size extrapolation of the limit.

    For v_N = c N^p (1 + q/N) the slope between consecutive N drifts like a
    1/N correction. The extrapolation fits that three-parameter form exactly
    through the last three points (solving the one nonlinear equation for q
    by bracketing + bisection), so it recovers p to machine precision on
    model data. If the model does not bracket a root there (data far from a
    1/N correction), it falls back to linear elimination of the correction
    term from the last two slopes.

    Returns (slopes, extrapolated) where slopes[i] is the slope between
    (ns[i], ns[i+1]).
    """
    ns = np.asarray(ns, dtype=float)
    vs = np.asarray(vs, dtype=float)
    require(ns.ndim == 1 and ns.shape == vs.shape, "ns and vs must be equal-length 1-d")
    require(len(ns) >= 3, "need at least three points")
    require(np.all(np.diff(ns) > 0), "ns must be strictly increasing")
    require(np.all(vs > 0), "values must be positive")
    slopes = _pairwise_slopes(ns, vs)

    n0, n1, n2 = ns[-3:]
    v0, v1, v2 = np.log(vs[-3:])
    l01 = math.log(n1 / n0)
    l12 = math.log(n2 / n1)

    def slope_gap(q):
        # slope difference implied by v = c N^p (1 + q/N); zero at the true q
        w0 = v0 - math.log1p(q / n0)
        w1 = v1 - math.log1p(q / n1)
        w2 = v2 - math.log1p(q / n2)
        return (w2 - w1) / l12 - (w1 - w0) / l01

    def extrapolate_at(q):
        return ((v2 - math.log1p(q / n2)) - (v1 - math.log1p(q / n1))) / l12

    # Bracket a sign change of slope_gap around q = 0, staying inside
    # q > -n0 so the logs exist.
    lo, hi = None, None
    g_prev, q_prev = slope_gap(0.0), 0.0
    if g_prev == 0.0:
        return slopes, extrapolate_at(0.0)
    step = 0.25 * n0
    for direction in (+1.0, -1.0):
        q, g = q_prev, g_prev
        trial = direction * step
        while abs(trial) < 64.0 * n2:
            qt = trial
            if qt <= -0.96 * n0:
                break
            gt = slope_gap(qt)
            if gt == 0.0:
                return slopes, extrapolate_at(qt)
            if (gt > 0) != (g > 0):
                lo, hi = (q, qt) if q < qt else (qt, q)
                break
            q, g = qt, gt
            trial *= 2.0
        if lo is not None:
            break

    if lo is None:
        # no 1/N-model root: eliminate the correction linearly instead
        u = (1.0 / ns[1:] - 1.0 / ns[:-1]) / np.log(ns[1:] / ns[:-1])
        if len(slopes) >= 2 and not math.isclose(u[-1], u[-2]):
            p = (slopes[-1] * u[-2] - slopes[-2] * u[-1]) / (u[-2] - u[-1])
        else:
            p = float(slopes[-1])
        return slopes, float(p)

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = slope_gap(mid)
        if gm == 0.0:
            lo = hi = mid
            break
        if (gm > 0) == (slope_gap(lo) > 0):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo)):
            break
    return slopes, extrapolate_at(0.5 * (lo + hi))


def proportion_interval(hits: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion hits/trials."""
    require(trials > 0, "trials must be positive")
    require(0 <= hits <= trials, "hits must lie in [0, trials]")
    p = hits / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def blocked_std_err(series) -> float:
    """Standard error of the mean of a correlated series, by blocking.

    Averages the series over blocks of doubling length and takes the largest
    naive standard error across block levels (a conservative plateau
    estimate). Falls back to the naive standard error for very short series.
    """
    x = np.asarray(series, dtype=float)
    require(x.ndim == 1 and len(x) >= 2, "need a 1-d series of length >= 2")
    best = float(x.std(ddof=1) / math.sqrt(len(x)))
    while len(x) >= 32:
        x = 0.5 * (x[: len(x) // 2 * 2 : 2] + x[1 : len(x) // 2 * 2 : 2])
        se = float(x.std(ddof=1) / math.sqrt(len(x)))
        best = max(best, se)
    return best
