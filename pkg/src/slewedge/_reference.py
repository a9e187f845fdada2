"""Pure numpy/Python kernels: the fallback backend and the semantic reference.

The compiled extension (_speedups) mirrors these signatures exactly; backend
selection happens in :mod:`slewedge.backend`. Keep algorithmic changes here
and in the .pyx in lockstep.

Status codes shared by both backends (module constants, not an enum, so the
Cython side can use bare ints):

    TERM_TIME = 0    ran out of driving samples
    TERM_RADIUS = 1  left the stop disk (crossed the flowed stop circle)
    TERM_HIT = 2     crossed the flowed ray polyline
"""

from __future__ import annotations

import math

import numpy as np

TERM_TIME = 0
TERM_RADIUS = 1
TERM_HIT = 2

# dihedral symmetries of the square lattice, indexed 1..7 (0 is the identity
# and is never proposed). Row g is the matrix ((a, b), (c, d)) acting as
# (x, y) -> (a x + b y, c x + d y).
SYMMETRIES = np.array([
    [1, 0, 0, 1],     # 0: identity (unused)
    [0, -1, 1, 0],    # 1: rotate 90
    [-1, 0, 0, -1],   # 2: rotate 180
    [0, 1, -1, 0],    # 3: rotate 270
    [1, 0, 0, -1],    # 4: reflect in x-axis
    [-1, 0, 0, 1],    # 5: reflect in y-axis
    [0, 1, 1, 0],     # 6: reflect in y = x
    [0, -1, -1, 0],   # 7: reflect in y = -x
], dtype=np.int64)

MASK_FULL = 0
MASK_HALF = 1
MASK_QUARTER = 2
MASK_DIAGONAL = 3
MASK_OCTANT = 4


def mask_allows(mask_id: int, x, y):
    """Vectorized site predicate for each lattice wedge."""
    if mask_id == MASK_FULL:
        return np.full(np.broadcast(x, y).shape, True) if np.ndim(x) else True
    if mask_id == MASK_HALF:
        return y >= 0
    if mask_id == MASK_QUARTER:
        return (x >= 0) & (y >= 0)
    if mask_id == MASK_DIAGONAL:
        return (y >= 0) & (y >= x)
    if mask_id == MASK_OCTANT:
        return (y >= 0) & (y <= x)
    raise ValueError(f"unknown mask id {mask_id}")


def loewner_trace(W: np.ndarray, dt: float, stop_radius: float):
    """Trace points of the piecewise-constant-driving Loewner chain.

    W[0..n] are driving samples on the uniform grid t_k = k dt; step k grows
    a vertical slit of capacity dt at the held value W[k]. The trace point at
    t_k is the inverse elementary maps composed innermost-first:

        gamma_k = f_1(f_2(... f_k(W[k] + 2i sqrt(dt)) ...)),
        f_j(z) = W[j] + sqrt((z - W[j])^2 - 4 dt),

    with the square-root branch chosen by the sign of Re(z - W[j]) (+0 maps
    up). Returns (points, status): points[0] = W[0], truncated after the
    first point with |gamma_k| > stop_radius (status TERM_RADIUS) or at the
    end of the driving (TERM_TIME). Cost is O(n^2).
    """
    W = np.asarray(W, dtype=float)
    n = len(W) - 1
    two_rt = 2.0 * math.sqrt(dt)
    z = np.empty(n + 1, dtype=complex)
    z[0] = W[0]
    z[1:] = W[1:] + 1j * two_rt
    # the j-th inverse map applies to every later point; sweeping j downward
    # applies maps to each point in the required innermost-first order
    for j in range(n - 1, 0, -1):
        u = z[j + 1:] - W[j]
        s = np.sqrt(u * u - 4.0 * dt)
        z[j + 1:] = W[j] + np.where(u.real < 0.0, -s, s)
    beyond = np.abs(z) > stop_radius
    if beyond.any():
        k = int(np.argmax(beyond))
        return z[: k + 1].copy(), TERM_RADIUS
    return z, TERM_TIME


def bessel_driving(dB: np.ndarray, a: float, kappa: float, rho: float, dt: float):
    """Euler scheme for the SLE(kappa, rho) driving pair (W, O).

    X = W - O is sqrt(kappa) times a Bessel process of dimension
    1 + 2(rho+2)/kappa; the scheme steps

        X' = |X + ((rho + 2)/X) dt + sqrt(kappa) dB|
        O' = O - (2/X) dt

    (reflection at 0 guards the rare sub-step overshoot). Returns
    (W, O, truncated_at) with truncated_at = -1, or the first index where X
    reached exactly 0 (evolution frozen from there on).
    """
    n = len(dB)
    sk = math.sqrt(kappa)
    W = np.empty(n + 1)
    O = np.empty(n + 1)
    X = a
    O_cur = 0.0
    W[0] = a
    O[0] = 0.0
    truncated = -1
    drift = rho + 2.0
    for k in range(n):
        if X == 0.0:
            truncated = k
            W[k + 1:] = W[k]
            O[k + 1:] = O[k]
            break
        O_cur = O_cur - (2.0 / X) * dt
        X = abs(X + (drift / X) * dt + sk * dB[k])
        O[k + 1] = O_cur
        W[k + 1] = O_cur + X
    return W, O, truncated


def _cross_slit(z: np.ndarray, v: float, h: float) -> bool:
    """Does any chord of the polyline z cross the vertical slit [v, v+ih]?

    Chord endpoints live in the closed upper half-plane. A chord crosses iff
    its endpoints straddle the line Re = v and the linear interpolation of
    Im at the crossing is <= h. Vertical chords on the line itself count if
    they dip to height <= h.
    """
    da = z.real[:-1] - v
    db = z.real[1:] - v
    straddle = (da <= 0.0) != (db <= 0.0)
    if straddle.any():
        ia = z.imag[:-1][straddle]
        ib = z.imag[1:][straddle]
        t = da[straddle] / (da[straddle] - db[straddle])
        eta = ia + t * (ib - ia)
        if (eta <= h).any():
            return True
    both = (da == 0.0) & (db == 0.0)
    if both.any():
        if (np.minimum(z.imag[:-1][both], z.imag[1:][both]) <= h).any():
            return True
    return False


def welded_avoidance(W: np.ndarray, dt: float, ray: np.ndarray, circle: np.ndarray,
                     near_dist: float, lazy_dist: float, lazy_stride: int,
                     merge_eps: float, merge_stride: int):
    """Track ray and stop-circle polylines through the elementary-map flow and
    report which one the growing curve crosses first.

    Instead of building the trace (O(n^2)), the obstacle polylines are pushed
    forward through the same elementary slit maps that define the discrete
    curve; the curve crosses the physical ray exactly when some step's slit
    [W[k], W[k] + 2i sqrt(dt)] crosses the flowed ray polyline (and likewise
    for the stop circle). This is O(n * M).

    Far points (|z - W[k]| > near_dist) advance by the 2-term asymptotic
    update 2h/u - 2h^2/u^3; very far points (> lazy_dist) update only every
    lazy_stride steps with the accumulated elapsed time. Ray vertices closer
    than merge_eps to their predecessor are merged away every merge_stride
    steps once they are far from the active region (the fjord squeeze makes
    most of the polyline collapse after the curve passes), keeping M small.

    Each polyline also carries a scan gate. A full scan measures the exact
    min distance from the slit base to any chord; no chord can touch the
    slit while that distance stays above h. The base moves by
    |W[k] - W[k-1]| per step and every chord point by at most 2 dt / dv
    (dv = the measured min distance itself), so draining the slack by
    |dW| + 2 dt / dv per step is a safe certificate, and scans are skipped
    until it runs out. While the gate holds and the certified distance is large, the
    per-step flow is replaced by batch catch-ups whose stride grows with
    the distance (bounded by the expansion tail ~ el^2/d^3 and the driving
    wander ~ el^{3/2}/d^2), so a far polyline costs O(M) only every few
    hundred steps instead of every step.

    Returns (status, steps_used): TERM_HIT if the ray was crossed,
    TERM_RADIUS if the circle was crossed, else TERM_TIME.
    """
    n = len(W) - 1
    h = 2.0 * math.sqrt(dt)
    rz = np.array(ray, dtype=complex)
    cz = np.array(circle, dtype=complex)
    r_last = np.zeros(len(rz), dtype=np.int64)
    c_last = np.zeros(len(cz), dtype=np.int64)
    r_due = np.zeros(len(rz), dtype=np.int64)
    c_due = np.zeros(len(cz), dtype=np.int64)
    near2 = near_dist * near_dist
    lazy2 = lazy_dist * lazy_dist
    # gate slack margin: stride-stale far points plus accumulated flow error
    pad = 2.0 * lazy_stride * 2.0 * dt / lazy_dist + 0.0625 * h
    floor = 4.0 * h
    # the ray polyline decides hits, so its batch error budget is tight; the
    # circle only times the radius exit and tolerates h-scale displacement
    tol_ray = 1e-3 * h
    tol_circ = 0.25 * h
    r_slack = 0.0
    r_dv = h
    r_next = 0  # next scheduled batch flow; 0 = per-step mode
    r_wake = 0  # earliest step any ray point is due for a visit
    c_slack = 0.0
    c_dv = h
    c_next = 0
    c_wake = 0

    def flow(z, last, due, k, v):
        """Advance every point whose due step has arrived; points inside
        lazy_dist stay due every step, the rest every lazy_stride steps
        (anchored to their own last update). Returns the next wake step."""
        vis = np.nonzero(due <= k)[0]
        if len(vis) == 0:
            return int(due.min())
        u = z[vis] - v
        r2 = u.real * u.real + u.imag * u.imag
        nearm = r2 <= lazy2
        upd = nearm | ((k - last[vis]) >= lazy_stride)
        iu = vis[upd]
        if len(iu):
            uu = u[upd]
            el = (k - last[iu]) * dt
            exact = r2[upd] <= near2
            zn = np.empty(uu.shape, dtype=complex)
            if exact.any():
                ue = uu[exact]
                s = np.sqrt(ue * ue + 4.0 * el[exact])
                s = np.where(ue.real < 0.0, -s, s)
                zn[exact] = v + s
            far = ~exact
            if far.any():
                uf = uu[far]
                ef = el[far]
                inv = 1.0 / r2[upd][far]
                iur = uf.real * inv
                iui = -uf.imag * inv
                iu2r = iur * iur - iui * iui
                iu2i = 2.0 * iur * iui
                iu3r = iu2r * iur - iu2i * iui
                iu3i = iu2r * iui + iu2i * iur
                c1 = 2.0 * ef
                c2 = 2.0 * ef * ef
                zf = z[iu][far]
                zn[far] = ((zf.real + c1 * iur - c2 * iu3r)
                           + 1j * (zf.imag + c1 * iui - c2 * iu3i))
            z[iu] = zn
            last[iu] = k
        due[vis[nearm]] = k + 1
        ifar = vis[~nearm]
        due[ifar] = last[ifar] + lazy_stride
        return int(due.min())

    def force(z, last, upto, v):
        # catch every point up to step `upto` in one batch
        stale = last < upto
        if not stale.any():
            return
        u = z[stale] - v
        el = (upto - last[stale]) * dt
        r2 = u.real * u.real + u.imag * u.imag
        exact = r2 <= near2
        zn = np.empty(u.shape, dtype=complex)
        if exact.any():
            ue = u[exact]
            s = np.sqrt(ue * ue + 4.0 * el[exact])
            s = np.where(ue.real < 0.0, -s, s)
            zn[exact] = v + s
        far = ~exact
        if far.any():
            uf = u[far]
            ef = el[far]
            inv = 1.0 / r2[far]
            iur = uf.real * inv
            iui = -uf.imag * inv
            iu2r = iur * iur - iui * iui
            iu2i = 2.0 * iur * iui
            iu3r = iu2r * iur - iu2i * iui
            iu3i = iu2r * iui + iu2i * iur
            c1 = 2.0 * ef
            c2 = 2.0 * ef * ef
            zf = z[stale][far]
            zn[far] = ((zf.real + c1 * iur - c2 * iu3r)
                       + 1j * (zf.imag + c1 * iui - c2 * iu3i))
        z[stale] = zn
        last[stale] = upto

    def stride_for(d, tol):
        if d <= 0.0:  # a big dW step can overshoot the drained distance
            return 0
        el = min(math.sqrt(0.5 * tol * d * d * d),
                 (tol * d * d / 6.0) ** (2.0 / 3.0))
        s = int(el / dt)
        if s > 8192:
            s = 8192
        return s

    def measure(z, v):
        # the segment minimum bounds the whole image curve, including points
        # between vertices, so it is the distance the drain rate must honour
        a = z[:-1]
        e = z[1:] - a
        w = v - a
        ee = e.real * e.real + e.imag * e.imag
        safe = np.where(ee > 0.0, ee, 1.0)
        t = np.clip((w.real * e.real + w.imag * e.imag) / safe, 0.0, 1.0)
        t = np.where(ee > 0.0, t, 0.0)
        dx = w - t * e
        minseg = float(np.sqrt((dx.real * dx.real + dx.imag * dx.imag).min()))
        return minseg - h - pad, minseg

    status = TERM_TIME
    steps = n
    batch_min = 2 * lazy_stride
    for k in range(1, n + 1):
        v = W[k]
        dW = abs(W[k] - W[k - 1])

        # crossing needs a chord within h of the slit base, i.e. slack < 0;
        # while the drained certificate stays positive no test can fire
        if r_slack > 0.0:
            dec = dW + 2.0 * dt / r_dv
            r_slack -= dec
            r_dv -= dec
            if r_next and k >= r_next:
                force(rz, r_last, k, v)
                s = stride_for(r_dv, tol_ray)
                r_next = k + s if s >= batch_min else 0
        else:
            if r_next:
                force(rz, r_last, k - 1, v)
                r_next = 0
            if _cross_slit(rz, v, h):
                return TERM_HIT, k
            r_slack, r_dv = measure(rz, v)
            if r_slack > floor:
                s = stride_for(r_dv, tol_ray)
                if s >= batch_min:
                    r_next = k + s

        if c_slack > 0.0:
            dec = dW + 2.0 * dt / c_dv
            c_slack -= dec
            c_dv -= dec
            if c_next and k >= c_next:
                force(cz, c_last, k, v)
                s = stride_for(c_dv, tol_circ)
                c_next = k + s if s >= batch_min else 0
        else:
            if c_next:
                force(cz, c_last, k - 1, v)
                c_next = 0
            if _cross_slit(cz, v, h):
                return TERM_RADIUS, k
            c_slack, c_dv = measure(cz, v)
            if c_slack > floor:
                s = stride_for(c_dv, tol_circ)
                if s >= batch_min:
                    c_next = k + s

        if r_next == 0 and k >= r_wake:
            r_wake = flow(rz, r_last, r_due, k, v)
        if c_next == 0 and k >= c_wake:
            c_wake = flow(cz, c_last, c_due, k, v)

        if (merge_stride > 0 and k % merge_stride == 0 and len(rz) > 8
                and r_next == 0):
            # force everything current before measuring distances
            stale = r_last < k
            if stale.any():
                u = rz[stale] - v
                el = (k - r_last[stale]) * dt
                r2 = u.real * u.real + u.imag * u.imag
                inv = 1.0 / r2
                iur = u.real * inv
                iui = -u.imag * inv
                iu2r = iur * iur - iui * iui
                iu2i = 2.0 * iur * iui
                iu3r = iu2r * iur - iu2i * iui
                iu3i = iu2r * iui + iu2i * iur
                c1 = 2.0 * el
                c2 = 2.0 * el * el
                zs = rz[stale]
                rz[stale] = ((zs.real + c1 * iur - c2 * iu3r)
                             + 1j * (zs.imag + c1 * iui - c2 * iu3i))
                r_last[stale] = k
            keep = np.ones(len(rz), dtype=bool)
            last_kept = rz[0]
            for i in range(1, len(rz) - 1):
                d = rz[i] - last_kept
                act = rz[i] - v
                if (d.real * d.real + d.imag * d.imag < merge_eps * merge_eps
                        and act.real * act.real + act.imag * act.imag
                        > 100.0 * near2):
                    keep[i] = False
                else:
                    last_kept = rz[i]
            if not keep.all():
                rz = rz[keep]
                r_last = r_last[keep]
                r_due = r_due[keep]
                r_slack = 0.0  # polyline changed, rescan next step
                r_wake = int(r_due.min())
    return status, steps


def saw_counts(mask_id: int, n_max: int) -> np.ndarray:
    """Exact counts of self-avoiding walks from the origin inside the mask,
    by depth-first search; counts[L] is the number of L-step walks."""
    counts = np.zeros(n_max + 1, dtype=np.int64)
    counts[0] = 1
    occupied = {(0, 0)}
    steps = ((1, 0), (0, 1), (-1, 0), (0, -1))

    def extend(x, y, depth):
        for ddx, ddy in steps:
            nx, ny = x + ddx, y + ddy
            if (nx, ny) in occupied or not bool(mask_allows(mask_id, nx, ny)):
                continue
            counts[depth] += 1
            if depth < n_max:
                occupied.add((nx, ny))
                extend(nx, ny, depth + 1)
                occupied.remove((nx, ny))

    if n_max >= 1:
        extend(0, 0, 1)
    return counts


def pivot_grid(xy: np.ndarray) -> np.ndarray:
    """Site-index grid for pivot_run: flat int32 of side (2N+1), -1 = empty.

    The walk is anchored at the origin (site 0 never moves), so every site of
    every reachable configuration fits in |x|, |y| <= N.
    """
    n = xy.shape[0] - 1
    side = 2 * n + 1
    grid = np.full(side * side, -1, dtype=np.int32)
    for i in range(xy.shape[0]):
        grid[(int(xy[i, 0]) + n) * side + (int(xy[i, 1]) + n)] = i
    return grid


def pivot_run(xy: np.ndarray, grid: np.ndarray, mask_id: int, js: np.ndarray,
              gs: np.ndarray, stride: int, r2_out: np.ndarray,
              target_accepts: int):
    """Run pivot-move attempts on the walk xy ((N+1) x 2 int64, modified in
    place, with its matching pivot_grid, kept in sync).

    Attempt t pivots the suffix after site js[t] by lattice symmetry gs[t]
    (1..7); the move is accepted iff every transformed site stays inside the
    mask and avoids the untouched prefix (the suffix cannot collide with
    itself: it moves rigidly). With target_accepts > 0 the run stops after
    that many acceptances (burn-in mode, nothing measured). Otherwise every
    stride-th attempt records the end-to-end R^2 into r2_out.

    Returns (accepts, attempts_used, n_measured).
    """
    npts = xy.shape[0]
    n = npts - 1
    side = 2 * n + 1
    accepts = 0
    measured = 0
    attempts = 0
    for t in range(len(js)):
        attempts += 1
        j = int(js[t])
        g = int(gs[t])
        a, b, c, d = (int(v) for v in SYMMETRIES[g])
        px, py = int(xy[j, 0]), int(xy[j, 1])
        ok = True
        for i in range(j + 1, npts):
            rx = int(xy[i, 0]) - px
            ry = int(xy[i, 1]) - py
            qx = px + a * rx + b * ry
            qy = py + c * rx + d * ry
            if not bool(mask_allows(mask_id, qx, qy)):
                ok = False
                break
            hit = grid[(qx + n) * side + (qy + n)]
            if hit >= 0 and hit <= j:
                ok = False
                break
        if ok:
            for i in range(j + 1, npts):
                grid[(int(xy[i, 0]) + n) * side + (int(xy[i, 1]) + n)] = -1
            for i in range(j + 1, npts):
                rx = int(xy[i, 0]) - px
                ry = int(xy[i, 1]) - py
                xy[i, 0] = px + a * rx + b * ry
                xy[i, 1] = py + c * rx + d * ry
                grid[(int(xy[i, 0]) + n) * side + (int(xy[i, 1]) + n)] = i
            accepts += 1
            if target_accepts > 0 and accepts >= target_accepts:
                break
        if target_accepts == 0 and stride > 0 and attempts % stride == 0:
            ex = float(xy[npts - 1, 0] - xy[0, 0])
            ey = float(xy[npts - 1, 1] - xy[0, 1])
            r2_out[measured] = ex * ex + ey * ey
            measured += 1
    return accepts, attempts, measured
