"""Exponent algebra for chordal SLE(kappa, rho) in half-plane and wedge geometries.

Everything here is closed-form arithmetic on the parameters (kappa, rho),
restriction exponents alpha, and wedge opening fractions theta (the wedge of
opening angle theta*pi, theta in (0, 1], with theta = 1 the half-plane).

Conventions for the decay exponents, recorded on every returned
:class:`DecayExponent`:

* ``IN_A``  -- probability decays like a^sigma as the anchor separation a -> 0,
* ``IN_R``  -- probability decays like R^(-lam) as the obstacle size R -> infinity,
* ``IN_N``  -- a walk-count correction N^gamma as the walk length N -> infinity.

Mixing conventions in arithmetic is a bug, so DecayExponent refuses to add or
subtract across them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, require

__all__ = [
    "Convention",
    "DecayExponent",
    "SleParameterPair",
    "ChainRow",
    "sle_fractal_dimension",
    "bessel_dimension",
    "alpha_from_rho",
    "rho_from_alpha",
    "conditioned_rho",
    "intersection_sigma",
    "hiding_sigma",
    "avoiding_chain",
    "mutual_avoidance_sigma",
    "halfplane_counting_exponent",
    "saw_mutual_avoidance_N_exponent",
    "wedge_ray_exponent",
    "wedge_confinement_N_exponent",
    "wedge_gamma",
    "hiding_tilde",
    "wedge_hiding_exponent",
]


class Convention(Enum):
    """What the exponent is an exponent *of*."""

    IN_A = "a->0"
    IN_R = "R->inf"
    IN_N = "N->inf"


@dataclass(frozen=True)
class DecayExponent:
    """A decay exponent tagged with the limit it refers to.

    Supports float(), ordering against plain numbers via .value, and +/- with
    exponents of the same convention (combining decay rates of independent
    events in the same limit). Cross-convention arithmetic raises TypeError.
    """

    value: float
    convention: Convention

    def __float__(self) -> float:
        return self.value

    def _check(self, other: "DecayExponent") -> None:
        if not isinstance(other, DecayExponent):
            raise TypeError("can only combine DecayExponent with DecayExponent")
        if other.convention is not self.convention:
            raise TypeError(
                f"convention mismatch: {self.convention.name} vs "
                f"{other.convention.name}")

    def __add__(self, other: "DecayExponent") -> "DecayExponent":
        self._check(other)
        return DecayExponent(self.value + other.value, self.convention)

    def __sub__(self, other: "DecayExponent") -> "DecayExponent":
        self._check(other)
        return DecayExponent(self.value - other.value, self.convention)


@dataclass(frozen=True)
class SleParameterPair:
    """A (kappa, rho) parameter pair for SLE(kappa, rho).

    kappa must be positive; rho > -2 keeps the driving force point repulsion
    subcritical (the associated Bessel dimension above 1).
    """

    kappa: float
    rho: float = 0.0

    def __post_init__(self):
        require(self.kappa > 0, f"kappa must be positive, got {self.kappa}")
        require(self.rho > -2, f"rho must exceed -2, got {self.rho}")


def _as_pair(pair_or_kappa, rho=None) -> SleParameterPair:
    if isinstance(pair_or_kappa, SleParameterPair):
        if rho is not None:
            raise TypeError("rho given twice")
        return pair_or_kappa
    return SleParameterPair(float(pair_or_kappa), 0.0 if rho is None else float(rho))


def _pair_and_alpha(pair_or_kappa, rho, alpha) -> tuple[SleParameterPair, float]:
    # Accept either (kappa, rho, alpha) or (SleParameterPair, alpha).
    if isinstance(pair_or_kappa, SleParameterPair):
        if alpha is None:
            alpha = rho
        elif rho is not None:
            raise TypeError("rho given twice")
        p = pair_or_kappa
    else:
        p = SleParameterPair(float(pair_or_kappa), 0.0 if rho is None else float(rho))
    if alpha is None:
        raise TypeError("alpha is required")
    return p, float(alpha)


def sle_fractal_dimension(kappa: float) -> float:
    """Hausdorff dimension of the SLE(kappa) trace: min(2, 1 + kappa/8)."""
    require(kappa > 0, f"kappa must be positive, got {kappa}")
    return min(2.0, 1.0 + kappa / 8.0)


def bessel_dimension(pair_or_kappa, rho=None) -> float:
    """Dimension d of the Bessel process driving X = W - O for SLE(kappa, rho).

    X/sqrt(kappa) is a Bessel process of dimension d = 1 + 2(rho + 2)/kappa.
    d > 1 for every admissible pair; d >= 2 (rho >= kappa/2 - 2) is the regime
    where X never hits zero and the force point is never swallowed.
    """
    p = _as_pair(pair_or_kappa, rho)
    return 1.0 + 2.0 * (p.rho + 2.0) / p.kappa


def alpha_from_rho(rho: float) -> float:
    """Restriction exponent of the right boundary of SLE(8/3, rho).

    alpha = (rho + 2)(3 rho + 10) / 32. Increasing in rho on rho > -2, with
    alpha(0) = 5/8 (plain SLE(8/3), the self-avoiding-walk candidate).
    """
    require(rho > -2, f"rho must exceed -2, got {rho}")
    return (rho + 2.0) * (3.0 * rho + 10.0) / 32.0


def rho_from_alpha(alpha: float) -> float:
    """Inverse of alpha_from_rho on the increasing branch.

    rho = (-8 + 2 sqrt(1 + 24 alpha)) / 3, valid for alpha > 0 (any exponent
    a one-sided restriction measure can have).
    """
    require(alpha > 0, f"alpha must be positive, got {alpha}")
    return (-8.0 + 2.0 * math.sqrt(1.0 + 24.0 * alpha)) / 3.0


def conditioned_rho(pair_or_kappa, rho=None, alpha=None) -> float:
    """Parameter rho_bar of SLE(kappa, rho) conditioned to avoid a sample of an
    independent one-sided restriction measure of exponent alpha attached to its
    right side.

    rho_bar = kappa/2 - 2 + kappa sqrt(4 alpha / kappa + ((rho+2)/kappa - 1/2)^2)

    Callable as conditioned_rho(kappa, rho, alpha) or
    conditioned_rho(pair, alpha). The result is always >= kappa/2 - 2, i.e.
    conditioning pushes the pair into the regime where the curve avoids the
    positive real axis.
    """
    p, alpha = _pair_and_alpha(pair_or_kappa, rho, alpha)
    require(alpha > 0, f"alpha must be positive, got {alpha}")
    half = (p.rho + 2.0) / p.kappa - 0.5
    return p.kappa / 2.0 - 2.0 + p.kappa * math.sqrt(4.0 * alpha / p.kappa + half * half)


def intersection_sigma(pair_or_kappa, rho=None, alpha=None) -> DecayExponent:
    """Decay exponent sigma of the non-intersection probability, in the anchor
    separation a -> 0, between SLE(kappa, rho) started at a and an independent
    restriction sample of exponent alpha anchored at 0.

    sigma = -((rho+2)/kappa - 1/2) + sqrt(4 alpha / kappa + ((rho+2)/kappa - 1/2)^2)

    Callable as intersection_sigma(kappa, rho, alpha) or
    intersection_sigma(pair, alpha).
    """
    p, alpha = _pair_and_alpha(pair_or_kappa, rho, alpha)
    require(alpha > 0, f"alpha must be positive, got {alpha}")
    half = (p.rho + 2.0) / p.kappa - 0.5
    return DecayExponent(-half + math.sqrt(4.0 * alpha / p.kappa + half * half),
                         Convention.IN_A)


def hiding_sigma(alpha: float, beta: float,
                 convention: Convention = Convention.IN_A) -> DecayExponent:
    """Exponent for one restriction sample (exponent beta) hiding behind
    another (exponent alpha) as their anchor separation a -> 0.

    sigma = (1/4) (3 - sqrt(1 + 24 alpha) + sqrt(24 beta + (sqrt(1 + 24 alpha) - 3)^2))

    The same exponent governs the R -> infinity decay when the two samples are
    anchored at unit separation and asked to stay disjoint up to scale R, so
    either IN_A (default) or IN_R is an accepted convention tag.
    """
    require(alpha >= 1.0 / 3.0,
            f"alpha must be at least 1/3 (a restriction hull with a boundary "
            f"touching both sides), got {alpha}")
    require(beta > 0, f"beta must be positive, got {beta}")
    if convention is Convention.IN_N:
        raise TypeError("hiding exponent is an a->0 / R->inf exponent, not IN_N")
    u = math.sqrt(1.0 + 24.0 * alpha)
    sigma = 0.25 * (3.0 - u + math.sqrt(24.0 * beta + (u - 3.0) ** 2))
    return DecayExponent(sigma, convention)


@dataclass(frozen=True)
class ChainRow:
    """One level of the mutually avoiding chain: rho_n and its alpha_n."""

    n: int
    rho_n: float
    alpha_n: float


def avoiding_chain(n_max: int, kappa: float = 8.0 / 3.0) -> list[ChainRow]:
    """Iterate the conditioning recursion for n mutually avoiding curves.

    Start from plain SLE(kappa) (rho_1 = 0). At each level, adding one more
    curve to the right means conditioning SLE(kappa, 0) to avoid the previous
    level's right-boundary restriction sample:

        rho_(k+1) = conditioned_rho(kappa, 0, alpha=alpha_k)
        alpha_(k+1) = alpha_from_rho(rho_(k+1))        (kappa = 8/3 only)

    For kappa = 8/3 this gives rho_n = 2(n-1) and alpha_n = n(3n+2)/8.
    For other kappa the alpha_from_rho step has no closed form here, so the
    chain is only available at kappa = 8/3.
    """
    require(n_max >= 1, f"n_max must be at least 1, got {n_max}")
    if abs(kappa - 8.0 / 3.0) > 1e-12:
        raise DomainError(
            "avoiding_chain needs the restriction exponent of the right "
            "boundary, known in closed form only at kappa = 8/3")
    rows = []
    rho_k = 0.0
    alpha_k = alpha_from_rho(rho_k)
    rows.append(ChainRow(1, rho_k, alpha_k))
    for k in range(2, n_max + 1):
        rho_k = conditioned_rho(kappa, 0.0, alpha=alpha_k)
        alpha_k = alpha_from_rho(rho_k)
        rows.append(ChainRow(k, rho_k, alpha_k))
    return rows


def mutual_avoidance_sigma(n: int) -> DecayExponent:
    """Exponent (in the anchor spread a -> 0) for n independent SLE(8/3)
    curves started at n points within distance a to be mutually avoiding:
    sigma_n = 3 n (n - 1) / 8.
    """
    require(n >= 1, f"n must be at least 1, got {n}")
    return DecayExponent(3.0 * n * (n - 1.0) / 8.0, Convention.IN_A)


def halfplane_counting_exponent(n: int) -> DecayExponent:
    """Power-law correction gamma(n) - 1 in the count of n mutually avoiding
    half-plane self-avoiding walks of common length N out of nearby anchors:
    the count grows like mu^(nN) * N^g with g = 3 n (5 - 6 n) / 64.
    """
    require(n >= 1, f"n must be at least 1, got {n}")
    return DecayExponent(3.0 * n * (5.0 - 6.0 * n) / 64.0, Convention.IN_N)


def saw_mutual_avoidance_N_exponent(n: int) -> DecayExponent:
    """N -> infinity decay of the probability that n independent half-plane
    self-avoiding walks of length N from nearby anchors are mutually avoiding:
    N^e with e = 9 n (1 - n) / 32 (zero at n = 1 by construction).
    """
    require(n >= 1, f"n must be at least 1, got {n}")
    return DecayExponent(9.0 * n * (1.0 - n) / 32.0, Convention.IN_N)


def wedge_ray_exponent(alpha: float, theta: float) -> DecayExponent:
    """R -> infinity decay, R^(-lam), of the probability that a restriction
    sample of exponent alpha avoids a radius-R ray tilted at angle theta*pi
    (equivalently: stays inside the wedge of opening theta*pi up to scale R).

    lam = alpha (1 - theta) / theta. Zero at theta = 1: the ray lies on the
    real axis and is avoided automatically.
    """
    require(alpha > 0, f"alpha must be positive, got {alpha}")
    require(0.0 < theta <= 1.0, f"theta must lie in (0, 1], got {theta}")
    return DecayExponent(alpha * (1.0 - theta) / theta, Convention.IN_R)


def wedge_confinement_N_exponent(n: int, theta: float) -> DecayExponent:
    """N -> infinity decay of the probability that n mutually avoiding
    half-plane self-avoiding walks of length N stay inside the wedge of
    opening theta*pi:  N^e with e = -(3 n (3n + 2) / 32) (1/theta - 1).
    """
    require(n >= 1, f"n must be at least 1, got {n}")
    require(0.0 < theta <= 1.0, f"theta must lie in (0, 1], got {theta}")
    return DecayExponent(-(3.0 * n * (3.0 * n + 2.0) / 32.0) * (1.0 / theta - 1.0),
                         Convention.IN_N)


def wedge_gamma(n: int, theta: float) -> DecayExponent:
    """Power-law correction in the count of n mutually avoiding self-avoiding
    walks confined to the wedge of opening theta*pi:

        gamma(n, theta) = 27 n / 64 - 3 n (3 n + 2) / (32 theta)

    At theta = 1 this reduces exactly to halfplane_counting_exponent(n).
    """
    require(n >= 1, f"n must be at least 1, got {n}")
    require(0.0 < theta <= 1.0, f"theta must lie in (0, 1], got {theta}")
    return DecayExponent(27.0 * n / 64.0 - 3.0 * n * (3.0 * n + 2.0) / (32.0 * theta),
                         Convention.IN_N)


def hiding_tilde(alpha: float, beta: float) -> tuple[float, float]:
    """Parameters of the conditioned pair when a restriction sample of exponent
    beta is conditioned to hide behind one of exponent alpha.

    Returns (rho_tilde, alpha_tilde):

        rho_tilde  = -2/3 + (8/3) sqrt(3 beta / 2 + ((sqrt(1+24 alpha) - 3)/4)^2)
        alpha_tilde = beta + 1/3 + (sqrt(1+24 alpha) - 3)^2 / 24
                      + sqrt(3 beta / 2 + (sqrt(1+24 alpha) - 3)^2 / 16)

    alpha_tilde equals alpha_from_rho(rho_tilde): the hidden pair is again a
    one-sided restriction sample, of exponent alpha_tilde.
    """
    require(alpha >= 1.0 / 3.0,
            f"alpha must be at least 1/3, got {alpha}")
    require(beta > 0, f"beta must be positive, got {beta}")
    u = math.sqrt(1.0 + 24.0 * alpha)
    q = (u - 3.0) ** 2 / 16.0
    root = math.sqrt(1.5 * beta + q)
    rho_tilde = -2.0 / 3.0 + (8.0 / 3.0) * root
    alpha_tilde = beta + 1.0 / 3.0 + (u - 3.0) ** 2 / 24.0 + root
    return rho_tilde, alpha_tilde


def wedge_hiding_exponent(alpha: float, beta: float, theta: float) -> DecayExponent:
    """R -> infinity decay for a beta-sample hiding behind an alpha-sample
    inside the wedge of opening theta*pi, up to scale R.

    Hiding in the wedge costs the half-plane hiding exponent plus the wedge
    confinement of the conditioned (hidden) pair, whose restriction exponent
    is alpha_tilde: lam = hiding_sigma(alpha, beta) + alpha_tilde (1/theta - 1).
    """
    require(0.0 < theta <= 1.0, f"theta must lie in (0, 1], got {theta}")
    sigma = hiding_sigma(alpha, beta, Convention.IN_R)
    _, alpha_tilde = hiding_tilde(alpha, beta)
    return DecayExponent(sigma.value + alpha_tilde * (1.0 / theta - 1.0),
                         Convention.IN_R)
