"""Release-gating verification: ten numbered checks, runnable at two depths.

quick (checks 1-4) covers the algebraic identities, the exact slit map and
the deterministic Loewner facts in under a minute. full adds the Monte
Carlo and enumeration campaigns (5-9, budgeted to fit an hour together
with quick) plus the documentation-only item 10. Every check returns a
CriterionResult so callers -- the command line and the acceptance tests --
can render exactly one pass/fail line per criterion.

All stochastic checks pin their seed here. The seeds are part of the
release contract: measured values in the report are reproducible runs,
not lucky draws that vanish on re-execution.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import conformal, loewner, saw
from .estimate import loglog_fit
from .exponents import (
    alpha_from_rho,
    avoiding_chain,
    hiding_sigma,
    hiding_tilde,
    intersection_sigma,
    mutual_avoidance_sigma,
    rho_from_alpha,
    wedge_gamma,
    wedge_hiding_exponent,
)

__all__ = [
    "CriterionResult",
    "brute_force_saw_counts",
    "run_criterion",
    "run",
    "QUICK_CRITERIA",
    "FULL_CRITERIA",
    "FLAGSHIP_SEED",
    "FLAGSHIP_TRIALS",
    "FLAGSHIP_TOL",
    "WEDGE_SEED",
    "WEDGE_TRIALS",
    "WEDGE_R_GRID",
    "WEDGE_SLOPE_TOL",
    "RATIO_NMAX",
    "RATIO_TOL",
    "PIVOT_NS",
    "PIVOT_SWEEPS",
    "PIVOT_SEED",
    "PIVOT_TOL",
]

QUICK_CRITERIA = (1, 2, 3, 4)
FULL_CRITERIA = tuple(range(1, 11))

# Monte Carlo contract knobs, pinned. Tolerances combine the pure binomial
# width at these trial counts with the measured discretization allowance of
# the production step size; the ledger next to the repository records the
# calibration runs behind each number.
FLAGSHIP_SEED = 2026
FLAGSHIP_TRIALS = 10_000
FLAGSHIP_TOL = 0.01

WEDGE_SEED = 2028
WEDGE_TRIALS = 4_000
WEDGE_R_GRID = (1.0, 2.0, 4.0, 8.0)
WEDGE_SLOPE_TOL = 0.05

RATIO_NMAX = 24
RATIO_TOL = 0.15

PIVOT_NS = (250, 500, 1000, 2000)
PIVOT_SWEEPS = 6000
PIVOT_SEED = 11
PIVOT_TOL = 0.04


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one numbered verification check."""

    number: int
    title: str
    passed: bool
    measured: str
    target: str
    seconds: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (f"[{mark}] {self.number:>2}. {self.title}: {self.measured}"
                f" | target: {self.target} | {self.seconds:.1f}s")


def _result(number, title, passed, measured, target, t0) -> CriterionResult:
    return CriterionResult(number=number, title=title, passed=bool(passed),
                           measured=measured, target=target,
                           seconds=time.perf_counter() - t0)


def _criterion_1() -> CriterionResult:
    t0 = time.perf_counter()
    worst = 0.0

    for rho in np.linspace(-1.9, 6.0, 80):
        worst = max(worst, abs(rho_from_alpha(alpha_from_rho(rho)) - rho))
    for alpha in np.linspace(0.05, 10.0, 80):
        worst = max(worst, abs(alpha_from_rho(rho_from_alpha(alpha)) - alpha))
    round_trip_ok = worst <= 1e-12

    chain = avoiding_chain(50)
    chain_err = max(max(abs(r.rho_n - 2.0 * (r.n - 1)),
                        abs(r.alpha_n - r.n * (3.0 * r.n + 2.0) / 8.0))
                    for r in chain)
    chain_ok = chain_err <= 1e-9

    # hiding exponent must equal conditioning composed with intersection,
    # and the hidden pair's exponent must close under alpha_from_rho
    comp_err = 0.0
    for alpha in np.linspace(1.0 / 3.0, 4.0, 20):
        for beta in np.linspace(0.05, 4.0, 20):
            direct = hiding_sigma(alpha, beta).value
            composed = intersection_sigma(8.0 / 3.0, rho_from_alpha(alpha),
                                          beta).value
            comp_err = max(comp_err, abs(direct - composed))
            rho_t, alpha_t = hiding_tilde(alpha, beta)
            comp_err = max(comp_err, abs(alpha_t - alpha_from_rho(rho_t)))
    comp_ok = comp_err <= 1e-12

    gamma_err = max(abs(wedge_gamma(n, 1.0).value - 3.0 * n * (5.0 - 6.0 * n) / 64.0)
                    for n in range(1, 11))
    gamma_ok = gamma_err == 0.0 and wedge_gamma(1, 1.0).value == -3.0 / 64.0

    passed = round_trip_ok and chain_ok and comp_ok and gamma_ok
    measured = (f"round-trip {worst:.1e}, chain(50) {chain_err:.1e}, "
                f"composition {comp_err:.1e}, gamma(n,1) {gamma_err:.1e}")
    return _result(1, "exponent algebra", passed, measured,
                   "1e-12 / 1e-9 / 1e-12 / exact", t0)


def _criterion_2() -> CriterionResult:
    t0 = time.perf_counter()
    vals = {
        "alpha(rho=0)": (alpha_from_rho(0.0), 5.0 / 8.0),
        "sigma_2": (mutual_avoidance_sigma(2).value, 3.0 / 4.0),
        "sigma_3": (mutual_avoidance_sigma(3).value, 9.0 / 4.0),
        "wedge hiding": (wedge_hiding_exponent(5.0 / 8.0, 5.0 / 8.0, 0.5).value,
                         11.0 / 4.0),
    }
    rho_t, alpha_t = hiding_tilde(5.0 / 8.0, 5.0 / 8.0)
    vals["rho_tilde"] = (rho_t, 2.0)
    vals["alpha_tilde"] = (alpha_t, 2.0)
    worst = max(abs(got - want) for got, want in vals.values())
    measured = ", ".join(f"{k}={got:.6g}" for k, (got, _) in vals.items())
    return _result(2, "special values", worst <= 1e-12, measured,
                   "5/8, 3/4, 9/4, 11/4, (2, 2) to 1e-12", t0)


def _criterion_3() -> CriterionResult:
    t0 = time.perf_counter()
    thetas = (0.25, 1.0 / 3.0, 0.5, 0.75)
    r_grid = np.logspace(0.0, 6.0, 10)

    worst_resid = 0.0
    for theta in thetas:
        for R in r_grid:
            m = conformal.SlitMap(theta, float(R))
            s = conformal.find_root_offset(m)
            worst_resid = max(worst_resid,
                              abs(conformal.phi_inverse_at_offset(m, s)))
    resid_ok = worst_resid <= 1e-10

    z0 = conformal.find_z0(conformal.SlitMap(0.5, 1.0), 1e-12)
    phi0 = conformal.phi_prime_zero(0.5, 1.0)
    closed_ok = (abs(z0 - (1.0 - math.sqrt(5.0)) / 2.0 - 0.5 + 0.5) <= 1e-6
                 and abs(z0 + 0.118034) <= 1e-6
                 and abs(phi0 - 2.0 / math.sqrt(5.0)) <= 1e-6)

    fit_grid = np.logspace(2.0, 6.0, 9)
    worst_c = 0.0
    worst_slope = 0.0
    for theta in thetas:
        want = (1.0 - theta) / theta
        c_hat, _ = conformal.fit_c(theta, fit_grid)
        worst_c = max(worst_c, abs(c_hat - want) / want)
        phis = [conformal.phi_prime_zero(theta, float(R)) for R in fit_grid]
        slope = loglog_fit(fit_grid, phis).slope
        worst_slope = max(worst_slope, abs(slope + want) / want)
    fits_ok = worst_c <= 0.01 and worst_slope <= 0.01

    measured = (f"residual {worst_resid:.1e}, z0={z0:.6f}, phi'(0)={phi0:.6f}, "
                f"c rel err {worst_c:.2e}, slope rel err {worst_slope:.2e}")
    return _result(3, "slit map exactness", resid_ok and closed_ok and fits_ok,
                   measured, "1e-10 residual; closed forms 1e-6; fits 1%", t0)


def _synthetic_params(dt: float, n: int) -> loewner.SleParams:
    # max_time chosen only to satisfy the dt <= 1e-3 max_time contract
    return loewner.SleParams(kappa=8.0 / 3.0, rho=0.0, start_a=0.0, dt=dt,
                             max_time=1000.0 * dt, stop_radius=1e9, seed=0)


def _trace_endpoint(W: np.ndarray, dt: float) -> complex:
    p = _synthetic_params(dt, len(W) - 1)
    times = np.arange(len(W)) * dt
    d = loewner.DrivingPath(times=times, W=W, O=np.zeros(len(W)), params=p)
    return complex(loewner.trace_from_driving(d).points[-1])


def _criterion_4() -> CriterionResult:
    t0 = time.perf_counter()

    n = 1000
    dt = 1e-3
    p = _synthetic_params(dt, n)
    times = np.arange(n + 1) * dt
    zero = loewner.DrivingPath(times=times, W=np.zeros(n + 1),
                               O=np.zeros(n + 1), params=p)
    tr = loewner.trace_from_driving(zero)
    exact = 2j * np.sqrt(times)
    zero_err = float(np.abs(tr.points - exact).max())

    c = 3.7
    shifted = loewner.DrivingPath(times=times, W=np.full(n + 1, c),
                                  O=np.zeros(n + 1), params=p)
    trc = loewner.trace_from_driving(shifted)
    const_err = float(np.abs(trc.points - (c + exact)).max())

    # shared-noise self-convergence: one Brownian path sampled on a dyadic
    # grid, traced at five nested resolutions; endpoint gaps shrink ~sqrt(2)
    # per halving, so consecutive RMS ratios land in a band around 1.41
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(7)))
    levels = 5
    n_fine = 1 << 10
    dt_fine = 1.0 / n_fine
    kappa = 8.0 / 3.0
    gaps = np.zeros((levels - 1, 32))
    for path in range(gaps.shape[1]):
        B = np.concatenate(([0.0], np.cumsum(
            rng.standard_normal(n_fine) * math.sqrt(dt_fine))))
        ends = []
        for lev in range(levels):
            stride = 1 << (levels - 1 - lev)
            W = math.sqrt(kappa) * B[::stride]
            ends.append(_trace_endpoint(W, stride * dt_fine))
        for lev in range(levels - 1):
            gaps[lev, path] = abs(ends[lev] - ends[lev + 1])
    rms = np.sqrt((gaps ** 2).mean(axis=1))
    ratios = rms[:-1] / rms[1:]
    ratios_ok = bool(np.all((ratios >= 1.2) & (ratios <= 1.7)))

    passed = zero_err <= 1e-9 and const_err <= 1e-9 and ratios_ok
    measured = (f"|trace - 2i sqrt(t)| {zero_err:.1e}, shift err {const_err:.1e}, "
                f"halving ratios {np.round(ratios, 3).tolist()}")
    return _result(4, "loewner determinism", passed, measured,
                   "1e-9 exactness; ratios in [1.2, 1.7]", t0)


def _criterion_5() -> CriterionResult:
    t0 = time.perf_counter()
    ray = conformal.WedgeRay(theta=0.5, length=1.0)
    exact = conformal.ray_avoid_probability(5.0 / 8.0, ray.theta, ray.length)
    p = loewner.standard_params(kappa=8.0 / 3.0, rho=0.0, ray=ray,
                                seed=FLAGSHIP_SEED)
    est = loewner.mc_wedge_avoidance(p, ray, FLAGSHIP_TRIALS, engine="welded")
    err = abs(est.p_hat - exact)
    passed = err <= FLAGSHIP_TOL and not est.time_truncation_warning
    measured = (f"p_hat={est.p_hat:.5f}+-{est.std_err:.5f} vs {exact:.5f} "
                f"(|diff|={err:.5f}; {est.hits} hit / {est.n_radius} escaped / "
                f"{est.n_time} time-capped)")
    return _result(5, "flagship avoidance", passed, measured,
                   f"|p_hat - 0.93264| <= {FLAGSHIP_TOL}", t0)


def _criterion_6() -> CriterionResult:
    t0 = time.perf_counter()
    alpha = 5.0 / 8.0
    p_hats = []
    zs = []
    for R in WEDGE_R_GRID:
        ray = conformal.WedgeRay(theta=0.5, length=R)
        exact = conformal.ray_avoid_probability(alpha, ray.theta, ray.length)
        p = loewner.standard_params(kappa=8.0 / 3.0, rho=0.0, ray=ray,
                                    seed=WEDGE_SEED)
        est = loewner.mc_wedge_avoidance(p, ray, WEDGE_TRIALS, engine="welded")
        p_hats.append(est.p_hat)
        zs.append((est.p_hat - exact) / est.std_err)

    lp = np.log(p_hats)
    slopes = np.diff(lp) / math.log(2.0)
    # the exact map's ln Phi'(0) = -(1/2) ln(1 + R^2/4) carries an R^-2
    # correction to the pure power law, so the eliminant uses 1/R^2 between
    # the two largest slope pairs (geometric midpoints R^2 = 8 and 32)
    extrapolated = (4.0 * slopes[2] - slopes[1]) / 3.0
    err = abs(extrapolated + alpha)
    passed = err <= WEDGE_SLOPE_TOL
    measured = (f"slopes {np.round(slopes, 4).tolist()}, extrapolated "
                f"{extrapolated:.4f}, per-R z {np.round(zs, 2).tolist()}")
    return _result(6, "wedge scaling", passed, measured,
                   f"extrapolated slope -5/8 +- {WEDGE_SLOPE_TOL}", t0)


_BRUTE_STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))

# independent mask predicates for the brute-force oracle: the point of the
# oracle is to share no code with the enumerator it judges
_BRUTE_MASKS = {
    saw.WedgeMask.FULL_PLANE: lambda x, y: True,
    saw.WedgeMask.HALF_PLANE: lambda x, y: y >= 0,
    saw.WedgeMask.QUARTER: lambda x, y: x >= 0 and y >= 0,
    saw.WedgeMask.DIAGONAL_WEDGE: lambda x, y: y >= 0 and y >= x,
    saw.WedgeMask.OCTANT: lambda x, y: 0 <= y <= x,
}


def brute_force_saw_counts(mask: saw.WedgeMask, n_max: int) -> tuple[int, ...]:
    """Count self-avoiding walks by trying all 4^N raw step sequences.

    Exponential on purpose: this is the reference the fast enumerator is
    checked against, kept too simple to be wrong. n_max <= 10 or so.
    """
    allowed = _BRUTE_MASKS[mask]
    counts = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        good = 0
        for seq in itertools.product(_BRUTE_STEPS, repeat=n):
            x = y = 0
            pts = {(0, 0)}
            for dx, dy in seq:
                x += dx
                y += dy
                if (x, y) in pts or not allowed(x, y):
                    break
                pts.add((x, y))
            else:
                good += 1
        counts[n] = good
    return tuple(counts)


def _criterion_7() -> CriterionResult:
    t0 = time.perf_counter()
    n_max = 8
    mismatches = []
    for mask in saw.WedgeMask:
        fast = saw.enumerate_walks(mask, n_max).counts
        slow = brute_force_saw_counts(mask, n_max)
        if fast != slow:
            mismatches.append(mask.name)
    full = saw.enumerate_walks(saw.WedgeMask.FULL_PLANE, 4).counts
    known_ok = full[1:] == (4, 12, 36, 100)
    passed = not mismatches and known_ok
    measured = (f"all masks N<={n_max} "
                + ("agree" if not mismatches else f"DISAGREE: {mismatches}")
                + f"; full-plane C_1..C_4 = {full[1:]}")
    return _result(7, "saw oracle", passed, measured,
                   "exact match; 4, 12, 36, 100", t0)


def _criterion_8() -> CriterionResult:
    t0 = time.perf_counter()
    quarter = saw.enumerate_walks(saw.WedgeMask.QUARTER, RATIO_NMAX)
    half = saw.enumerate_walks(saw.WedgeMask.HALF_PLANE, RATIO_NMAX)
    rs = saw.ratio_exponent_series(quarter, half)
    target = -15.0 / 32.0
    err = abs(rs.extrapolated - target)

    # raw slopes alternate by lattice parity; convergence is monotone for
    # the parity-averaged sequence, which is what "converges" means here
    sl = np.asarray(rs.slope_at)
    averaged = 0.5 * (sl[:-1] + sl[1:])
    monotone = bool(np.all(np.diff(averaged[-8:]) < 0.0))

    passed = rs.extrapolated < 0.0 and err <= RATIO_TOL and monotone
    measured = (f"extrapolated {rs.extrapolated:.4f} (|err| {err:.4f}), "
                f"averaged tail {np.round(averaged[-3:], 4).tolist()}, "
                f"monotone {monotone}")
    return _result(8, "wedge count ratio", passed, measured,
                   f"-15/32 +- {RATIO_TOL}, negative, monotone tail", t0)


def _criterion_9() -> CriterionResult:
    t0 = time.perf_counter()
    stats = [saw.pivot_sample(saw.WedgeMask.FULL_PLANE, n, PIVOT_SWEEPS,
                              seed=PIVOT_SEED) for n in PIVOT_NS]
    fit = loglog_fit(PIVOT_NS, [s.mean_r2 for s in stats])
    err = abs(fit.slope - 1.5)
    passed = err <= PIVOT_TOL
    rels = [s.std_err_r2 / s.mean_r2 for s in stats]
    measured = (f"2nu={fit.slope:.4f}+-{fit.slope_std_err:.4f} "
                f"(rel errs {np.round(rels, 3).tolist()}, acc "
                f"{[round(s.acceptance_rate, 2) for s in stats]})")
    return _result(9, "saw dimension", passed, measured,
                   f"1.5 +- {PIVOT_TOL}", t0)


def _criterion_10() -> CriterionResult:
    t0 = time.perf_counter()
    measured = ("documented exclusion, nothing simulated: multi-walk (n >= 2) "
                "wedge counting and a -> 0 intersection sampling are beyond "
                "desk scale; their algebra is exercised by checks 1 and 2")
    return _result(10, "desk-scale exclusions", True, measured,
                   "documentation only", t0)


_RUNNERS = {
    1: _criterion_1,
    2: _criterion_2,
    3: _criterion_3,
    4: _criterion_4,
    5: _criterion_5,
    6: _criterion_6,
    7: _criterion_7,
    8: _criterion_8,
    9: _criterion_9,
    10: _criterion_10,
}


def run_criterion(number: int) -> CriterionResult:
    """Run one numbered check and return its result."""
    if number not in _RUNNERS:
        raise ValueError(f"no criterion {number}; valid: 1..10")
    return _RUNNERS[number]()


def run(level: str = "quick", echo=None) -> list[CriterionResult]:
    """Run the quick or full suite; echo (if given) receives each line."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    numbers = QUICK_CRITERIA if level == "quick" else FULL_CRITERIA
    results = []
    for n in numbers:
        r = run_criterion(n)
        results.append(r)
        if echo is not None:
            echo(r.line())
    return results
