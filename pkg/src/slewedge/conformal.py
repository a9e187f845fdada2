"""Exact evaluation of the wedge slit map and the avoidance probability it predicts.

Geometry: a straight ray attached to the point 1 on the real axis, tilted
by angle theta*pi measured from the positive real direction (theta = 1/2 is
a vertical slit, theta = 1 lies flat on the axis). The half-plane with that
slit removed is mapped back to the half-plane by a conformal map Phi fixing
0 and infinity with Phi(z) ~ z at infinity. Its inverse has the closed form

    Phi^(-1)(z) = 1 + (z - z_minus)^theta (z - z_plus)^(1-theta),
    z_minus = 1 - R theta,   z_plus = 1 + R (1 - theta),

where the scale parameter R is the gap z_plus - z_minus between the branch
points, not the physical arm of the slit: the image of [z_minus, z_plus] is
the segment from 1 of length theta^theta (1-theta)^(1-theta) R, equal to R
only at theta = 1 and to R/2 for the vertical slit. Every R in this module
means the branch-point gap, and WedgeRay realizes the matching physical
geometry so that map and Monte Carlo agree about which slit they discuss.

The preimage z0 = Phi(0) < z_minus is the root of Phi^(-1) on the left
real axis. The probability that a one-sided restriction sample of exponent
alpha avoids the ray is exactly Phi'(0)^alpha = (d/dz Phi^(-1))(z0)^(-alpha).

Numerical care: for small theta and large R the root sits within 1e-18 of
z_minus, far below double resolution of z_minus itself. All root work is
therefore done in the offset variable s = z_minus - z0 > 0 (solved in log
space), and downstream quantities are computed from s, never from the lossy
difference z_minus - z0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, require
from .estimate import loglog_fit

__all__ = [
    "WedgeRay",
    "SlitMap",
    "ray_geometry",
    "phi_inverse_at_offset",
    "phi_inverse_on_left_axis",
    "find_root_offset",
    "find_z0",
    "phi_inverse_derivative_at_root",
    "phi_inverse_derivative_via_ratios",
    "phi_prime_zero",
    "ray_avoid_probability",
    "fit_c",
]


@dataclass(frozen=True)
class WedgeRay:
    """A straight ray attached to the base point 1, tilted at angle theta*pi
    from the positive real direction.

    theta in (0, 1]: the ray stays in the closed upper half-plane, and the
    curve-avoids-ray event is the curve-stays-in-the-wedge event for the
    wedge of opening angle theta*pi with apex at the base point.

    length is the slit map's scale parameter (the branch-point gap of
    SlitMap), shared with the exact side so predictions and simulations
    always describe the same slit. The physical arm drawn in the plane is
    theta^theta (1-theta)^(1-theta) * length; at theta = 1/2 a ray of
    length 1 reaches from 1 to 1 + 0.5i.
    """

    theta: float
    length: float

    def __post_init__(self):
        require(0.0 < self.theta <= 1.0, f"theta must lie in (0, 1], got {self.theta}")
        require(self.length > 0.0, f"length must be positive, got {self.length}")

    @property
    def base(self) -> complex:
        return 1.0 + 0.0j

    @property
    def direction(self) -> complex:
        ang = math.pi * (1.0 - self.theta)
        return complex(math.cos(ang), math.sin(ang))

    @property
    def arm(self) -> float:
        """Physical length of the drawn slit (0^0 = 1 keeps theta=1 exact)."""
        t = self.theta
        return self.length * t ** t * (1.0 - t) ** (1.0 - t)

    @property
    def tip(self) -> complex:
        return self.base + self.arm * self.direction


def ray_geometry(ray: WedgeRay) -> tuple[complex, complex]:
    """(base, tip) endpoints of the ray in the upper half-plane."""
    return ray.base, ray.tip


@dataclass(frozen=True)
class SlitMap:
    """The conformal data of the ray of angle theta*pi and scale R at base 1."""

    theta: float
    R: float

    def __post_init__(self):
        require(0.0 < self.theta < 1.0,
                f"theta must lie in (0, 1) for a genuine slit, got {self.theta}")
        require(self.R > 0.0, f"R must be positive, got {self.R}")

    @property
    def z_minus(self) -> float:
        return 1.0 - self.R * self.theta

    @property
    def z_plus(self) -> float:
        return 1.0 + self.R * (1.0 - self.theta)


def phi_inverse_at_offset(m: SlitMap, s: float) -> float:
    """Phi^(-1) evaluated at x = z_minus - s, parametrized by the offset s > 0.

    Equals 1 - s^theta (s + R)^(1-theta), computed in log space so it stays
    fully accurate for offsets far below the double-precision resolution of
    z_minus itself (the regime of small theta and large R).
    """
    require(s > 0.0, f"offset must be positive, got {s}")
    log_sum = math.log(m.R) + math.log1p(s / m.R) if s < m.R else math.log(s + m.R)
    return -math.expm1(m.theta * math.log(s) + (1.0 - m.theta) * log_sum)


def phi_inverse_on_left_axis(m: SlitMap, x: float) -> float:
    """Phi^(-1)(x) = 1 - (z_minus - x)^theta (z_plus - x)^(1-theta) for real
    x < z_minus (both branch factors positive there).

    Strictly increasing in x; crosses zero at x = z0.
    """
    require(x < m.z_minus, f"x must lie left of z_minus = {m.z_minus}, got {x}")
    return phi_inverse_at_offset(m, m.z_minus - x)


def _offset_log_residual(m: SlitMap, log_s: float) -> float:
    """F(log s) = theta log s + (1-theta) log(s + R); the root condition is F = 0."""
    s = math.exp(log_s)
    if s >= m.R * 1e-8:
        log_sum = math.log(s + m.R)
    else:
        log_sum = math.log(m.R) + math.log1p(s / m.R)
    return m.theta * log_s + (1.0 - m.theta) * log_sum


@lru_cache(maxsize=512)
def _root_offset_cached(theta: float, R: float) -> float:
    m = SlitMap(theta, R)
    # F is strictly increasing in log s: bracket, bisect, then polish with
    # Newton (F' = theta + (1-theta) s/(s+R) is within [theta, 1]).
    guess = -(1.0 - m.theta) / m.theta * math.log(m.R) if m.R > 1.0 else 0.0
    lo = hi = guess
    step = 1.0
    while _offset_log_residual(m, lo) > 0.0:
        lo -= step
        step *= 2.0
    step = 1.0
    while _offset_log_residual(m, hi) < 0.0:
        hi += step
        step *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _offset_log_residual(m, mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12:
            break
    log_s = 0.5 * (lo + hi)
    for _ in range(4):
        s = math.exp(log_s)
        f = _offset_log_residual(m, log_s)
        fp = m.theta + (1.0 - m.theta) * s / (s + m.R)
        log_s -= f / fp
    return math.exp(log_s)


def find_root_offset(m: SlitMap) -> float:
    """Offset s = z_minus - z0 > 0 of the root of Phi^(-1), solved to full
    double precision in log space (safe even when s underflows z_minus)."""
    return _root_offset_cached(m.theta, m.R)


def find_z0(m: SlitMap, tol: float = 1e-12) -> float:
    """The root z0 < z_minus of Phi^(-1) on the real axis, i.e. Phi(0).

    The residual |phi_inverse_on_left_axis(m, z0)| is at most tol whenever z0
    is representable to that accuracy; tol below the double-precision
    resolution of z_minus is satisfied as closely as the format allows (the
    root itself is always solved to machine precision internally; use
    find_root_offset for the exact offset).
    """
    require(tol > 0.0, f"tol must be positive, got {tol}")
    s = find_root_offset(m)
    z0 = m.z_minus - s
    if z0 < m.z_minus:
        resid = abs(phi_inverse_on_left_axis(m, z0))
        # Quantizing z0 to a double perturbs the residual by about
        # (Phi^-1)'(z0) * ulp(z_minus); only a residual above both tol and
        # that floor indicates an actual solver failure.
        deriv = (1.0 - m.theta) / (s + m.R) + m.theta / s
        floor = 8.0 * np.finfo(float).eps * deriv * max(1.0, abs(m.z_minus))
        if resid > max(tol, floor):
            raise DomainError(
                f"root not resolved to tol={tol}: residual {resid} (offset s={s})")
    return z0


def _validated_offset(m: SlitMap, z0: float) -> float:
    s = find_root_offset(m)
    slack = 64.0 * np.finfo(float).eps * max(1.0, abs(m.z_minus)) + 1e-9 * s
    if not (abs((m.z_minus - s) - z0) <= slack):
        raise DomainError(
            f"z0={z0} is not the root of this slit map "
            f"(expected {m.z_minus - s} within {slack})")
    return s


def phi_inverse_derivative_at_root(m: SlitMap, z0: float) -> float:
    """(Phi^(-1))'(z0) = (1-theta)/(s+R) + theta/s with s = z_minus - z0.

    z0 must be the root produced by find_z0 for this map (checked); the
    derivative is evaluated from the internally re-solved offset, so it keeps
    full precision even when z0 - z_minus has none left.
    """
    s = _validated_offset(m, z0)
    return (1.0 - m.theta) / (s + m.R) + m.theta / s


def phi_inverse_derivative_via_ratios(m: SlitMap, z0: float) -> float:
    """Same derivative written with the branch factors kept as ratios:

        (1-theta) (s/(s+R))^theta + theta ((s+R)/s)^(1-theta)

    Used as an independent cross-check of phi_inverse_derivative_at_root;
    the two agree because s^theta (s+R)^(1-theta) = 1 at the root.
    """
    s = _validated_offset(m, z0)
    log_ratio = math.log(s + m.R) - math.log(s)
    return ((1.0 - m.theta) * math.exp(-m.theta * log_ratio)
            + m.theta * math.exp((1.0 - m.theta) * log_ratio))


def phi_prime_zero(m_or_theta, R: float | None = None) -> float:
    """Phi'(0) = 1 / (Phi^(-1))'(z0), in (0, 1].

    Accepts a SlitMap or (theta, R). theta = 1 is allowed and returns 1.0
    exactly (the ray lies on the axis; the map is the identity).
    """
    if isinstance(m_or_theta, SlitMap):
        m = m_or_theta
    else:
        theta = float(m_or_theta)
        require(R is not None, "R is required")
        if theta == 1.0:
            require(R > 0.0, f"R must be positive, got {R}")
            return 1.0
        m = SlitMap(theta, R)
    s = find_root_offset(m)
    return 1.0 / ((1.0 - m.theta) / (s + m.R) + m.theta / s)


def ray_avoid_probability(alpha: float, m_or_theta, R: float | None = None) -> float:
    """Exact probability Phi'(0)^alpha that a one-sided restriction sample of
    exponent alpha (anchored at 0, growing to the right) avoids the ray.

    Exact at every finite R, not just asymptotically."""
    require(alpha > 0, f"alpha must be positive, got {alpha}")
    return phi_prime_zero(m_or_theta, R) ** alpha


def fit_c(theta: float, R_grid) -> tuple[float, float]:
    """Fit (Phi^(-1))'(z0) ~ (theta/k) R^c over a grid of R values.

    Returns (c_hat, k_hat): c_hat is the log-log slope of the derivative
    against R (the large-R growth rate, analytically (1-theta)/theta), and
    k_hat = theta / exp(intercept) is the prefactor of the root offset
    s ~ k R^(-c), reported for inspection but carrying no accuracy claim.

    The grid must have at least 4 points spanning at least 3 decades.
    """
    require(0.0 < theta < 1.0, f"theta must lie in (0, 1), got {theta}")
    R_grid = np.asarray(R_grid, dtype=float)
    require(R_grid.ndim == 1 and len(R_grid) >= 4, "need at least 4 grid points")
    require(np.all(R_grid > 0) and np.all(np.diff(R_grid) > 0),
            "R grid must be positive and strictly increasing")
    require(R_grid[-1] / R_grid[0] >= 1e3, "R grid must span at least 3 decades")
    derivs = []
    for R in R_grid:
        m = SlitMap(theta, float(R))
        s = find_root_offset(m)
        derivs.append((1.0 - theta) / (s + R) + theta / s)
    fit = loglog_fit(R_grid, derivs)
    k_hat = theta / math.exp(fit.intercept)
    return fit.slope, k_hat
