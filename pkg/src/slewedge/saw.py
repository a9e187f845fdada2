"""Self-avoiding walks on the square lattice restricted to wedge masks.

The lattice side of the wedge-exponent story: the number C_N of N-step
self-avoiding walks from the apex of a wedge of opening angle theta*pi grows
like mu^N N^{gamma-1}, with the same mu for every mask and a gamma that
depends only on theta. Ratios of counts between masks therefore follow a
pure power of N, and comparing the fitted power against the continuum
exponent algebra is a parameter-free consistency test. The module offers
exact counts (depth-first enumeration), the ratio-slope estimator, and a
pivot Monte Carlo sampler for the walk's end-to-end scaling.

Masks are closed (walks may touch the boundary lines) with the apex at the
origin. Only the four lattice-representable angles are provided; arbitrary
theta would need staircase boundaries. The absolute single-mask exponent is
deliberately not exposed: it is contaminated by the nonuniversal mu^N
factor, so every supported experiment is a between-mask ratio.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import backend
from .errors import DomainError, require
from .estimate import blocked_std_err

__all__ = [
    "WedgeMask",
    "LatticeWalk",
    "CountTable",
    "RatioSlopes",
    "PivotStats",
    "enumerate_walks",
    "ratio_exponent_series",
    "pivot_sample",
]

ENUMERATION_GUARD = 28  # full enumeration beyond this takes hours, not minutes


class WedgeMask(Enum):
    """Lattice wedges with apex at the origin, as site predicates.

    The value is the mask id shared with the counting/pivot kernels. theta
    is the continuum opening angle over pi, for prediction lookup (the full
    plane has opening 2*pi, hence theta = 2).
    """

    FULL_PLANE = backend.MASK_FULL
    HALF_PLANE = backend.MASK_HALF
    QUARTER = backend.MASK_QUARTER
    DIAGONAL_WEDGE = backend.MASK_DIAGONAL
    OCTANT = backend.MASK_OCTANT

    @property
    def theta(self) -> float:
        return _THETA[self]

    def allows(self, x, y):
        """Vectorized predicate: may a walk occupy lattice site (x, y)?"""
        return backend.mask_allows(self.value, x, y)

    @property
    def straight_direction(self) -> tuple[int, int]:
        """Axis direction along which a straight walk stays inside the mask."""
        return (-1, 0) if self is WedgeMask.DIAGONAL_WEDGE else (1, 0)


_THETA = {
    WedgeMask.FULL_PLANE: 2.0,
    WedgeMask.HALF_PLANE: 1.0,
    WedgeMask.QUARTER: 0.5,
    WedgeMask.DIAGONAL_WEDGE: 0.75,
    WedgeMask.OCTANT: 0.25,
}


@dataclass(frozen=True)
class LatticeWalk:
    """A self-avoiding walk: integer sites, unit steps, origin start."""

    points: np.ndarray  # (N+1) x 2 int array
    mask: WedgeMask = WedgeMask.FULL_PLANE

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64)
        object.__setattr__(self, "points", pts)
        require(pts.ndim == 2 and pts.shape[1] == 2 and len(pts) >= 1,
                "points must be an (N+1) x 2 integer array")
        require(bool((pts[0] == 0).all()), "walks start at the origin")
        if len(pts) > 1:
            d = np.abs(np.diff(pts, axis=0)).sum(axis=1)
            require(bool((d == 1).all()), "consecutive sites must be unit steps")
        require(len(np.unique(pts, axis=0)) == len(pts),
                "walk revisits a site")
        require(bool(np.all(self.mask.allows(pts[:, 0], pts[:, 1]))),
                f"walk leaves the {self.mask.name} mask")

    @property
    def n_steps(self) -> int:
        return len(self.points) - 1

    def end_to_end_sq(self) -> int:
        d = self.points[-1] - self.points[0]
        return int(d[0] * d[0] + d[1] * d[1])


@dataclass(frozen=True)
class CountTable:
    """Exact walk counts per length: counts[N] self-avoiding N-step walks."""

    mask: WedgeMask
    counts: tuple[int, ...]  # python ints: exact at any depth

    def __post_init__(self):
        require(len(self.counts) >= 1 and self.counts[0] == 1,
                "counts must start with the single empty walk")
        require(all(c > 0 for c in self.counts), "every count must be positive")

    @property
    def n_max(self) -> int:
        return len(self.counts) - 1

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N", "count"])
            for n, c in enumerate(self.counts):
                w.writerow([n, c])

    @classmethod
    def from_csv(cls, path, mask: WedgeMask) -> "CountTable":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        require(len(rows) >= 2 and rows[0] == ["N", "count"],
                f"{path} is not a count table")
        counts = []
        for i, row in enumerate(rows[1:]):
            require(int(row[0]) == i, f"{path}: lengths must be 0..n contiguous")
            counts.append(int(row[1]))
        return cls(mask=mask, counts=tuple(counts))


def enumerate_walks(mask: WedgeMask, n_max: int,
                    override_guard: bool = False) -> CountTable:
    """Exact C_N for N = 0..n_max by depth-first search with an occupancy
    grid. Deterministic; cost grows like mu^N (mu ~ 2.64), so lengths past
    the guard need an explicit override."""
    require(n_max >= 1, "n_max must be >= 1")
    if n_max > ENUMERATION_GUARD and not override_guard:
        raise DomainError(
            f"n_max = {n_max} exceeds the enumeration guard "
            f"({ENUMERATION_GUARD}); pass override_guard=True to run anyway")
    counts = backend.saw_counts(mask.value, n_max)
    return CountTable(mask=mask, counts=tuple(int(c) for c in counts))


@dataclass(frozen=True)
class RatioSlopes:
    """Successive power-law slopes of a count ratio, with its N -> inf limit.

    slope_at[i] estimates the exponent of N in C_N(a)/C_N(b) from lengths
    (ns[i], ns[i+1]); extrapolated removes the leading 1/N correction. The
    continuum prediction for the limit is gamma(a) - gamma(b); the shared
    growth factor mu^N cancels in the ratio, which is the whole point.
    """

    numerator: WedgeMask
    denominator: WedgeMask
    ns: tuple[int, ...]
    slope_at: tuple[float, ...]
    extrapolated: float


def ratio_exponent_series(a: CountTable, b: CountTable) -> RatioSlopes:
    """Successive slopes of log(C_N(a)/C_N(b)) against log N.

    Both tables must reach the same n_max >= 8. Starts at N = 1: the ratio
    at N = 0 is always 1 and carries no slope information.

    The raw slopes alternate around their trend (wedge boundary corrections
    carry a (-1)^N component on the square lattice), so the terminal estimate
    first averages adjacent slopes to cancel the alternating part and then
    removes the remaining 1/N drift by two-point Richardson extrapolation.
    """
    require(a.n_max == b.n_max, "count tables must share n_max")
    require(a.n_max >= 8, "need n_max >= 8 for a stable slope series")
    ns = np.arange(1, a.n_max + 1, dtype=float)
    ratios = np.array([a.counts[n] / b.counts[n] for n in range(1, a.n_max + 1)])
    slopes = np.diff(np.log(ratios)) / np.diff(np.log(ns))
    mid = 0.5 * (ns[:-1] + ns[1:])
    m = 0.5 * (slopes[:-1] + slopes[1:])
    nm = 0.5 * (mid[:-1] + mid[1:])
    n1, n2 = nm[-3], nm[-1]
    extrapolated = (n2 * m[-1] - n1 * m[-3]) / (n2 - n1)
    return RatioSlopes(numerator=a.mask, denominator=b.mask,
                       ns=tuple(int(n) for n in ns),
                       slope_at=tuple(float(s) for s in slopes),
                       extrapolated=float(extrapolated))


@dataclass(frozen=True)
class PivotStats:
    """Pivot-chain estimate of the mean squared end-to-end distance."""

    mask: WedgeMask
    n_steps: int
    sweeps: int
    seed: int
    mean_r2: float
    std_err_r2: float  # blocked: robust to pivot autocorrelation
    acceptance_rate: float
    burn_in_accepts: int


def _straight_walk(mask: WedgeMask, n: int) -> np.ndarray:
    dx, dy = mask.straight_direction
    pts = np.zeros((n + 1, 2), dtype=np.int64)
    pts[:, 0] = dx * np.arange(n + 1)
    pts[:, 1] = dy * np.arange(n + 1)
    if not bool(np.all(mask.allows(pts[:, 0], pts[:, 1]))):
        raise DomainError(f"no straight initial walk fits inside {mask.name}")
    return pts


def pivot_sample(mask: WedgeMask, n: int, sweeps: int, seed: int = 0,
                 debug: bool = False) -> PivotStats:
    """Pivot Monte Carlo for an n-step walk in the mask.

    Starts from a straight walk along the mask's axis direction; burns in
    until 10 n pivot moves were accepted (standard practice, generous for
    end-to-end observables), then runs `sweeps` measurement sweeps of n
    attempts each, recording R^2 once per sweep. The error bar is a blocked
    standard error, so pivot-to-pivot correlation is priced in. Acceptance
    counts only the measurement phase. With debug=True every recorded state
    is revalidated against the walk invariants.

    Note the chain is only known to be ergodic on the full and half plane;
    in narrower masks pivots through the apex region can be locally frozen.
    The supported experiments (end-to-end scaling on FULL_PLANE) do not
    rely on wedge-mask ergodicity.
    """
    require(n >= 1, "n must be >= 1")
    require(n <= 10_000, "n > 10^4 is past the desk-scale guard")
    require(sweeps >= 8, "need at least 8 sweeps for a blocked error bar")
    xy = _straight_walk(mask, n)
    grid = backend.pivot_grid(xy)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    # burn-in: accepted-move budget, with an attempt cap so a frozen chain
    # fails loudly instead of spinning
    target = 10 * n
    burn_accepts = 0
    cap = 4000 * n + 40_000
    empty = np.empty(0, dtype=float)
    while burn_accepts < target and cap > 0:
        chunk = min(cap, max(4 * n, 4096))
        js = rng.integers(0, n, size=chunk)
        gs = rng.integers(1, 8, size=chunk)
        acc, used, _ = backend.pivot_run(xy, grid, mask.value, js, gs, 0,
                                         empty, target - burn_accepts)
        burn_accepts += acc
        cap -= used
    if burn_accepts < target:
        raise DomainError(
            f"pivot burn-in stalled in {mask.name} at n = {n}: "
            f"{burn_accepts}/{target} accepts within the attempt budget")

    r2 = np.empty(sweeps, dtype=float)
    accepts = 0
    for sweep in range(sweeps):
        js = rng.integers(0, n, size=n)
        gs = rng.integers(1, 8, size=n)
        out = np.empty(1, dtype=float)
        acc, _, measured = backend.pivot_run(xy, grid, mask.value, js, gs, n,
                                             out, 0)
        accepts += acc
        require(measured == 1, "pivot sweep must record exactly one sample")
        r2[sweep] = out[0]
        if debug:
            LatticeWalk(points=xy.copy(), mask=mask)

    return PivotStats(mask=mask, n_steps=n, sweeps=sweeps, seed=seed,
                      mean_r2=float(r2.mean()),
                      std_err_r2=blocked_std_err(r2),
                      acceptance_rate=accepts / (sweeps * n),
                      burn_in_accepts=burn_accepts)
