# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Loewner trace composition, welded obstacle flow, Bessel
driving, self-avoiding-walk enumeration and pivot moves.

Semantics mirror slewedge._reference exactly; see the docstrings there.
"""

import numpy as np

from libc.math cimport INFINITY, fabs, pow, sqrt

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double creal(double complex)
    double cimag(double complex)
    double cabs(double complex)

TERM_TIME = 0
TERM_RADIUS = 1
TERM_HIT = 2

# dihedral symmetries (x, y) -> (a x + b y, c x + d y), index 1..7
cdef long _SYM_A[8]
cdef long _SYM_B[8]
cdef long _SYM_C[8]
cdef long _SYM_D[8]
_SYM_A[0] = 1;  _SYM_B[0] = 0;  _SYM_C[0] = 0;  _SYM_D[0] = 1
_SYM_A[1] = 0;  _SYM_B[1] = -1; _SYM_C[1] = 1;  _SYM_D[1] = 0
_SYM_A[2] = -1; _SYM_B[2] = 0;  _SYM_C[2] = 0;  _SYM_D[2] = -1
_SYM_A[3] = 0;  _SYM_B[3] = 1;  _SYM_C[3] = -1; _SYM_D[3] = 0
_SYM_A[4] = 1;  _SYM_B[4] = 0;  _SYM_C[4] = 0;  _SYM_D[4] = -1
_SYM_A[5] = -1; _SYM_B[5] = 0;  _SYM_C[5] = 0;  _SYM_D[5] = 1
_SYM_A[6] = 0;  _SYM_B[6] = 1;  _SYM_C[6] = 1;  _SYM_D[6] = 0
_SYM_A[7] = 0;  _SYM_B[7] = -1; _SYM_C[7] = -1; _SYM_D[7] = 0

cdef int DX[4]
cdef int DY[4]
DX[0] = 1;  DY[0] = 0
DX[1] = 0;  DY[1] = 1
DX[2] = -1; DY[2] = 0
DX[3] = 0;  DY[3] = -1


cdef inline bint _mask_ok(int mask_id, long x, long y) nogil:
    if mask_id == 0:       # full plane
        return True
    if mask_id == 1:       # half plane
        return y >= 0
    if mask_id == 2:       # quarter plane
        return x >= 0 and y >= 0
    if mask_id == 3:       # diagonal wedge, opening 3 pi / 4
        return y >= 0 and y >= x
    return y >= 0 and y <= x  # octant


def loewner_trace(double[:] W, double dt, double stop_radius):
    cdef Py_ssize_t n = W.shape[0] - 1
    cdef Py_ssize_t k, j
    cdef double two_rt = 2.0 * sqrt(dt)
    cdef double four_dt = 4.0 * dt
    cdef double stop2 = stop_radius * stop_radius
    cdef double complex z, u, s
    cdef int status = TERM_TIME
    out = np.empty(n + 1, dtype=np.complex128)
    cdef double complex[:] vz = out
    vz[0] = W[0]
    cdef Py_ssize_t written = 0
    for k in range(1, n + 1):
        z = W[k] + two_rt * 1j
        for j in range(k - 1, 0, -1):
            u = z - W[j]
            s = csqrt(u * u - four_dt)
            if creal(u) < 0.0:
                s = -s
            z = W[j] + s
        vz[k] = z
        written = k
        if creal(z) * creal(z) + cimag(z) * cimag(z) > stop2:
            status = TERM_RADIUS
            break
    if status == TERM_RADIUS:
        return out[: written + 1], status
    return out, status


def bessel_driving(double[:] dB, double a, double kappa, double rho, double dt):
    cdef Py_ssize_t n = dB.shape[0]
    cdef Py_ssize_t k, j
    cdef double sk = sqrt(kappa)
    cdef double drift = rho + 2.0
    cdef double X = a, O_cur = 0.0
    cdef long truncated = -1
    W_arr = np.empty(n + 1)
    O_arr = np.empty(n + 1)
    cdef double[:] W = W_arr
    cdef double[:] O = O_arr
    W[0] = a
    O[0] = 0.0
    for k in range(n):
        if X == 0.0:
            truncated = k
            break
        O_cur = O_cur - (2.0 / X) * dt
        X = fabs(X + (drift / X) * dt + sk * dB[k])
        O[k + 1] = O_cur
        W[k + 1] = O_cur + X
    if truncated >= 0:
        for j in range(truncated + 1, n + 1):
            W[j] = W[truncated]
            O[j] = O[truncated]
    return W_arr, O_arr, truncated


cdef inline int _cross(double complex* z, Py_ssize_t m, double v, double h) nogil:
    cdef Py_ssize_t i
    cdef double da, db, ia, ib, t, eta
    for i in range(m - 1):
        da = creal(z[i]) - v
        db = creal(z[i + 1]) - v
        if (da <= 0.0) != (db <= 0.0):
            ia = cimag(z[i])
            ib = cimag(z[i + 1])
            t = da / (da - db)
            eta = ia + t * (ib - ia)
            if eta <= h:
                return 1
        elif da == 0.0 and db == 0.0:
            ia = cimag(z[i])
            ib = cimag(z[i + 1])
            if (ia if ia < ib else ib) <= h:
                return 1
    return 0


cdef inline void _measure(double complex* z, Py_ssize_t m, double v, double h,
                          double pad, double* slack, double* dv) noexcept nogil:
    # the segment minimum bounds the whole image curve, including points
    # between vertices, so it is the distance the drain rate must honour
    cdef Py_ssize_t i
    cdef double seg2 = INFINITY
    cdef double d, ee, t, d2
    cdef double complex e, w, dx
    for i in range(m - 1):
        e = z[i + 1] - z[i]
        w = v - z[i]
        ee = creal(e) * creal(e) + cimag(e) * cimag(e)
        if ee > 0.0:
            t = (creal(w) * creal(e) + cimag(w) * cimag(e)) / ee
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        else:
            t = 0.0
        dx = w - t * e
        d2 = creal(dx) * creal(dx) + cimag(dx) * cimag(dx)
        if d2 < seg2:
            seg2 = d2
    d = sqrt(seg2)
    slack[0] = d - h - pad
    dv[0] = d


cdef inline void _far_step(double complex* z, Py_ssize_t i, double ur,
                           double ui, double r2, double el) noexcept nogil:
    # 2-term asymptotic update in components (complex div/mul are calls)
    cdef double inv = 1.0 / r2
    cdef double iur = ur * inv
    cdef double iui = -ui * inv
    cdef double iu2r = iur * iur - iui * iui
    cdef double iu2i = 2.0 * iur * iui
    cdef double iu3r = iu2r * iur - iu2i * iui
    cdef double iu3i = iu2r * iui + iu2i * iur
    cdef double c1 = 2.0 * el
    cdef double c2 = 2.0 * el * el
    z[i] = ((creal(z[i]) + c1 * iur - c2 * iu3r)
            + 1j * (cimag(z[i]) + c1 * iui - c2 * iu3i))


cdef inline long _flow(double complex* z, long* last, long* due, Py_ssize_t m,
                       Py_ssize_t k, double v, double dt, double near2,
                       double lazy2, long lazy_stride) nogil:
    # visit points whose due step arrived; near points stay due every step,
    # far ones every lazy_stride steps past their own last update. Returns
    # the earliest due step left, so whole calls can be skipped.
    cdef Py_ssize_t i
    cdef double r2, el, ur, ui
    cdef double complex u, s
    cdef long mn = k + lazy_stride + 1
    for i in range(m):
        if due[i] > k:
            if due[i] < mn:
                mn = due[i]
            continue
        ur = creal(z[i]) - v
        ui = cimag(z[i])
        r2 = ur * ur + ui * ui
        if r2 <= lazy2:
            el = (k - last[i]) * dt
            if r2 <= near2:
                u = ur + 1j * ui
                s = csqrt(u * u + 4.0 * el)
                if ur < 0.0:
                    s = -s
                z[i] = v + s
            else:
                _far_step(z, i, ur, ui, r2, el)
            last[i] = k
            due[i] = k + 1
            if k + 1 < mn:
                mn = k + 1
        else:
            if (k - last[i]) >= lazy_stride:
                el = (k - last[i]) * dt
                _far_step(z, i, ur, ui, r2, el)
                last[i] = k
            due[i] = last[i] + lazy_stride
            if due[i] < mn:
                mn = due[i]
    return mn


cdef inline void _force(double complex* z, long* last, Py_ssize_t m,
                        Py_ssize_t upto, double v, double dt,
                        double near2) noexcept nogil:
    # catch every point up to step `upto` in one batch
    cdef Py_ssize_t i
    cdef double r2, el, ur, ui
    cdef double complex u, s
    for i in range(m):
        if last[i] >= upto:
            continue
        ur = creal(z[i]) - v
        ui = cimag(z[i])
        r2 = ur * ur + ui * ui
        el = (upto - last[i]) * dt
        if r2 <= near2:
            u = ur + 1j * ui
            s = csqrt(u * u + 4.0 * el)
            if ur < 0.0:
                s = -s
            z[i] = v + s
        else:
            _far_step(z, i, ur, ui, r2, el)
        last[i] = upto


cdef inline long _stride_for(double d, double tol, double dt) nogil:
    if d <= 0.0:  # a big dW step can overshoot the drained distance
        return 0
    cdef double el1 = sqrt(0.5 * tol * d * d * d)
    cdef double el2 = pow(tol * d * d / 6.0, 2.0 / 3.0)
    cdef double el = el1 if el1 < el2 else el2
    cdef long s = <long> (el / dt)
    if s > 8192:
        s = 8192
    return s


def welded_avoidance(double[:] W, double dt, double complex[:] ray,
                     double complex[:] circle, double near_dist,
                     double lazy_dist, long lazy_stride, double merge_eps,
                     long merge_stride):
    cdef Py_ssize_t n = W.shape[0] - 1
    cdef Py_ssize_t mr = ray.shape[0]
    cdef Py_ssize_t mc = circle.shape[0]
    cdef double h = 2.0 * sqrt(dt)
    cdef double near2 = near_dist * near_dist
    cdef double lazy2 = lazy_dist * lazy_dist
    cdef double eps2 = merge_eps * merge_eps
    cdef double act_guard = 100.0 * near2

    rz_arr = np.array(ray, dtype=np.complex128)
    cz_arr = np.array(circle, dtype=np.complex128)
    rl_arr = np.zeros(mr, dtype=np.int64)
    cl_arr = np.zeros(mc, dtype=np.int64)
    rd_arr = np.zeros(mr, dtype=np.int64)
    cd_arr = np.zeros(mc, dtype=np.int64)
    cdef double complex[:] rz = rz_arr
    cdef double complex[:] cz = cz_arr
    cdef long[:] rl = rl_arr
    cdef long[:] cl = cl_arr
    cdef long[:] rd = rd_arr
    cdef long[:] cd = cd_arr

    cdef Py_ssize_t k, i, w
    cdef double v, el, dW, r2, ur, ui
    cdef double complex d, act, last_kept
    cdef int status = TERM_TIME
    cdef Py_ssize_t steps = n

    # scan gate state, see the reference docstring
    cdef double pad = 2.0 * lazy_stride * 2.0 * dt / lazy_dist + 0.0625 * h
    cdef double gate_floor = 4.0 * h
    cdef double tol_ray = 1e-3 * h
    cdef double tol_circ = 0.25 * h
    cdef long batch_min = 2 * lazy_stride
    cdef long s
    cdef double dec
    cdef double r_slack = 0.0
    cdef double r_dv = h
    cdef Py_ssize_t r_next = 0
    cdef long r_wake = 0
    cdef double c_slack = 0.0
    cdef double c_dv = h
    cdef Py_ssize_t c_next = 0
    cdef long c_wake = 0
    cdef long merge_ctr = merge_stride  # countdown avoids a per-step modulo

    for k in range(1, n + 1):
        v = W[k]
        dW = fabs(W[k] - W[k - 1])

        # crossing needs a chord within h of the slit base, i.e. slack < 0;
        # while the drained certificate stays positive no test can fire
        if r_slack > 0.0:
            dec = dW + 2.0 * dt / r_dv
            r_slack = r_slack - dec
            r_dv = r_dv - dec
            if r_next and k >= r_next:
                _force(&rz[0], &rl[0], mr, k, v, dt, near2)
                s = _stride_for(r_dv, tol_ray, dt)
                r_next = k + s if s >= batch_min else 0
        else:
            if r_next:
                _force(&rz[0], &rl[0], mr, k - 1, v, dt, near2)
                r_next = 0
            if _cross(&rz[0], mr, v, h):
                return TERM_HIT, k
            _measure(&rz[0], mr, v, h, pad, &r_slack, &r_dv)
            if r_slack > gate_floor:
                s = _stride_for(r_dv, tol_ray, dt)
                if s >= batch_min:
                    r_next = k + s

        if c_slack > 0.0:
            dec = dW + 2.0 * dt / c_dv
            c_slack = c_slack - dec
            c_dv = c_dv - dec
            if c_next and k >= c_next:
                _force(&cz[0], &cl[0], mc, k, v, dt, near2)
                s = _stride_for(c_dv, tol_circ, dt)
                c_next = k + s if s >= batch_min else 0
        else:
            if c_next:
                _force(&cz[0], &cl[0], mc, k - 1, v, dt, near2)
                c_next = 0
            if _cross(&cz[0], mc, v, h):
                return TERM_RADIUS, k
            _measure(&cz[0], mc, v, h, pad, &c_slack, &c_dv)
            if c_slack > gate_floor:
                s = _stride_for(c_dv, tol_circ, dt)
                if s >= batch_min:
                    c_next = k + s

        if r_next == 0 and k >= r_wake:
            r_wake = _flow(&rz[0], &rl[0], &rd[0], mr, k, v, dt, near2,
                           lazy2, lazy_stride)
        if c_next == 0 and k >= c_wake:
            c_wake = _flow(&cz[0], &cl[0], &cd[0], mc, k, v, dt, near2,
                           lazy2, lazy_stride)

        merge_ctr -= 1
        if merge_ctr != 0:
            continue
        merge_ctr = merge_stride
        if mr > 8 and r_next == 0:
            # bring lazy stragglers current so merge distances are real
            for i in range(mr):
                if rl[i] < k:
                    ur = creal(rz[i]) - v
                    ui = cimag(rz[i])
                    r2 = ur * ur + ui * ui
                    el = (k - rl[i]) * dt
                    _far_step(&rz[0], i, ur, ui, r2, el)
                    rl[i] = k
            w = 1
            last_kept = rz[0]
            for i in range(1, mr - 1):
                d = rz[i] - last_kept
                act = rz[i] - v
                if (creal(d) * creal(d) + cimag(d) * cimag(d) < eps2
                        and creal(act) * creal(act) + cimag(act) * cimag(act)
                        > act_guard):
                    continue
                rz[w] = rz[i]
                rl[w] = rl[i]
                rd[w] = rd[i]
                w += 1
                last_kept = rz[i]
            rz[w] = rz[mr - 1]
            rl[w] = rl[mr - 1]
            rd[w] = rd[mr - 1]
            if w + 1 < mr:
                r_slack = 0.0  # polyline changed, rescan next step
                r_wake = rd[0]
                for i in range(1, w + 1):
                    if rd[i] < r_wake:
                        r_wake = rd[i]
            mr = w + 1
    return status, steps


cdef void _saw_dfs(long long* counts, unsigned char* occ, int side, int n_max,
                   int mask_id, int x, int y, int depth) noexcept nogil:
    cdef int d, nx, ny
    cdef Py_ssize_t idx
    for d in range(4):
        nx = x + DX[d]
        ny = y + DY[d]
        if not _mask_ok(mask_id, nx, ny):
            continue
        idx = (<Py_ssize_t> (nx + n_max)) * side + (ny + n_max)
        if occ[idx]:
            continue
        counts[depth + 1] += 1
        if depth + 1 < n_max:
            occ[idx] = 1
            _saw_dfs(counts, occ, side, n_max, mask_id, nx, ny, depth + 1)
            occ[idx] = 0


def saw_counts(int mask_id, int n_max):
    cdef int side = 2 * n_max + 1
    counts_arr = np.zeros(n_max + 1, dtype=np.int64)
    occ_arr = np.zeros(side * side, dtype=np.uint8)
    cdef long long[:] counts = counts_arr
    cdef unsigned char[:] occ = occ_arr
    counts[0] = 1
    if n_max >= 1:
        occ[(<Py_ssize_t> n_max) * side + n_max] = 1
        with nogil:
            _saw_dfs(&counts[0], &occ[0], side, n_max, mask_id, 0, 0, 0)
    return counts_arr


def pivot_run(long[:, ::1] xy, int[:] grid, int mask_id, long[:] js,
              long[:] gs, long stride, double[:] r2_out, long target_accepts):
    cdef Py_ssize_t npts = xy.shape[0]
    cdef long n = npts - 1
    cdef long side = 2 * n + 1
    cdef long accepts = 0, measured = 0, attempts = 0
    cdef Py_ssize_t t, i
    cdef long j, g, a, b, c, d, px, py, rx, ry, qx, qy
    cdef int hit
    cdef bint ok
    cdef double ex, ey
    for t in range(js.shape[0]):
        attempts += 1
        j = js[t]
        g = gs[t]
        a = _SYM_A[g]; b = _SYM_B[g]; c = _SYM_C[g]; d = _SYM_D[g]
        px = xy[j, 0]
        py = xy[j, 1]
        ok = True
        for i in range(j + 1, npts):
            rx = xy[i, 0] - px
            ry = xy[i, 1] - py
            qx = px + a * rx + b * ry
            qy = py + c * rx + d * ry
            if not _mask_ok(mask_id, qx, qy):
                ok = False
                break
            hit = grid[(qx + n) * side + (qy + n)]
            if hit >= 0 and hit <= j:
                ok = False
                break
        if ok:
            for i in range(j + 1, npts):
                grid[(xy[i, 0] + n) * side + (xy[i, 1] + n)] = -1
            for i in range(j + 1, npts):
                rx = xy[i, 0] - px
                ry = xy[i, 1] - py
                xy[i, 0] = px + a * rx + b * ry
                xy[i, 1] = py + c * rx + d * ry
                grid[(xy[i, 0] + n) * side + (xy[i, 1] + n)] = <int> i
            accepts += 1
            if target_accepts > 0 and accepts >= target_accepts:
                break
        if target_accepts == 0 and stride > 0 and attempts % stride == 0:
            ex = <double> (xy[npts - 1, 0] - xy[0, 0])
            ey = <double> (xy[npts - 1, 1] - xy[0, 1])
            r2_out[measured] = ex * ex + ey * ey
            measured += 1
    return accepts, attempts, measured
