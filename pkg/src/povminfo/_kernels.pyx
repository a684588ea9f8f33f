# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; mirrors ``_kernels_py`` operation for operation.

The pattern search runs without the GIL so restarts and sweep points can be
spread over threads.
"""

import numpy as np

from libc.math cimport INFINITY, acos, cos, exp, log2, sin, sqrt
from libc.stdlib cimport free, malloc

DEF OVERLAP_SLACK = 1e-12
DEF SINGULAR_DET = 1e-14

KIND_PROJECTIVE = 0
KIND_GENERALIZED = 1
KIND_MATRIX = 2

ctypedef double (*objective_t)(double*, int, double*, double*) noexcept nogil


cdef double _mi(double* row_p, double* row_q, int m, double prior_p) noexcept nogil:
    cdef double prior_q = 1.0 - prior_p
    cdef double total = 0.0, jp, jq, mm
    cdef int k
    for k in range(m):
        jp = prior_p * row_p[k]
        jq = prior_q * row_q[k]
        mm = jp + jq
        if jp > 0.0:
            total += jp * log2(row_p[k] / mm)
        if jq > 0.0:
            total += jq * log2(row_q[k] / mm)
    return total


cdef double _projective(double* x, int dim, double* consts, double* work) noexcept nogil:
    cdef double half = 0.5 * consts[0]
    cdef double theta = x[0]
    cdef double a0 = cos(theta - half), a1 = sin(theta - half)
    cdef double b0 = cos(theta + half), b1 = sin(theta + half)
    work[0] = a0 * a0
    work[1] = a1 * a1
    work[2] = b0 * b0
    work[3] = b1 * b1
    return _mi(work, work + 2, 2, consts[1])


cdef void _softmax(double* v, int n, double* out) noexcept nogil:
    cdef double top = v[0], s = 0.0
    cdef int i
    for i in range(1, n):
        if v[i] > top:
            top = v[i]
    for i in range(n):
        out[i] = exp(v[i] - top)
    for i in range(n):
        s += out[i]
    for i in range(n):
        out[i] = out[i] / s


cdef int _generalized_decode(double* x, int n, double cos_alpha,
                             double* wp, double* wq, double* cs) noexcept nogil:
    cdef int i
    cdef double acc = 0.0, root, last
    _softmax(x, n, wp)
    _softmax(x + n, n, wq)
    for i in range(n - 1):
        cs[i] = cos(x[2 * n + i])
    for i in range(n - 1):
        acc += sqrt(wp[i] * wq[i]) * cs[i]
    root = sqrt(wp[n - 1] * wq[n - 1])
    if root <= 0.0:
        return 0
    last = (cos_alpha - acc) / root
    if last > 1.0 + OVERLAP_SLACK or last < -1.0 - OVERLAP_SLACK:
        return 0
    if last > 1.0:
        last = 1.0
    elif last < -1.0:
        last = -1.0
    cs[n - 1] = last
    return 1


cdef double _generalized(double* x, int dim, double* consts, double* work) noexcept nogil:
    cdef int n = <int>consts[2]
    cdef double balance = consts[3]
    cdef double* wp = work
    cdef double* wq = work + n
    cdef double* cs = work + 2 * n
    cdef double* row_p = work + 3 * n
    cdef double* row_q = work + 5 * n
    cdef double bal = 0.0, half, t, a0, a1, b0, b1
    cdef int i
    if not _generalized_decode(x, n, cos(consts[0]), wp, wq, cs):
        return -INFINITY
    for i in range(n):
        half = 0.5 * acos(cs[i])
        t = x[3 * n - 1 + i]
        a0 = cos(t - half)
        a1 = sin(t - half)
        b0 = cos(t + half)
        b1 = sin(t + half)
        row_p[2 * i] = wp[i] * a0 * a0
        row_p[2 * i + 1] = wp[i] * a1 * a1
        row_q[2 * i] = wq[i] * b0 * b0
        row_q[2 * i + 1] = wq[i] * b1 * b1
        bal += sqrt(wp[i] * wq[i])
    return _mi(row_p, row_q, 2 * n, consts[1]) + balance * bal


cdef int _matrix_decode(double* x, int n, double* elems, double* grams) noexcept nogil:
    cdef double s00 = 0.0, s01 = 0.0, s11 = 0.0
    cdef double f00, f01, f10, f11, g00, g01, g11
    cdef double det, tr, sd, t, m00, m01, m11, mdet, r00, r01, r11
    cdef double h00, h01, h10, h11
    cdef int k
    for k in range(n):
        f00 = x[4 * k]
        f01 = x[4 * k + 1]
        f10 = x[4 * k + 2]
        f11 = x[4 * k + 3]
        g00 = f00 * f00 + f10 * f10
        g01 = f00 * f01 + f10 * f11
        g11 = f01 * f01 + f11 * f11
        grams[3 * k] = g00
        grams[3 * k + 1] = g01
        grams[3 * k + 2] = g11
        s00 += g00
        s01 += g01
        s11 += g11
    det = s00 * s11 - s01 * s01
    tr = s00 + s11
    if det <= SINGULAR_DET * tr * tr:
        return 0
    sd = sqrt(det)
    t = sqrt(tr + 2.0 * sd)
    m00 = (s00 + sd) / t
    m01 = s01 / t
    m11 = (s11 + sd) / t
    mdet = m00 * m11 - m01 * m01
    r00 = m11 / mdet
    r01 = -m01 / mdet
    r11 = m00 / mdet
    for k in range(n):
        g00 = grams[3 * k]
        g01 = grams[3 * k + 1]
        g11 = grams[3 * k + 2]
        h00 = r00 * g00 + r01 * g01
        h01 = r00 * g01 + r01 * g11
        h10 = r01 * g00 + r11 * g01
        h11 = r01 * g01 + r11 * g11
        elems[3 * k] = h00 * r00 + h01 * r01
        elems[3 * k + 1] = h00 * r01 + h01 * r11
        elems[3 * k + 2] = h10 * r01 + h11 * r11
    return 1


cdef double _matrix(double* x, int dim, double* consts, double* work) noexcept nogil:
    cdef int n = <int>consts[2]
    cdef double* elems = work
    cdef double* grams = work + 3 * n
    cdef double* row_p = work + 6 * n
    cdef double* row_q = work + 7 * n
    cdef double half = 0.5 * consts[0]
    cdef double c = cos(half), s = sin(half), cc, ss, cross, v
    cdef int k
    if not _matrix_decode(x, n, elems, grams):
        return -INFINITY
    for k in range(n):
        cc = c * c * elems[3 * k]
        ss = s * s * elems[3 * k + 2]
        cross = 2.0 * c * s * elems[3 * k + 1]
        v = cc + cross + ss
        row_p[k] = v if v > 0.0 else 0.0
        v = cc - cross + ss
        row_q[k] = v if v > 0.0 else 0.0
    return _mi(row_p, row_q, n, consts[1])


cdef objective_t _select(int kind):
    if kind == 0:
        return _projective
    if kind == 1:
        return _generalized
    return _matrix


cdef int _work_size(int kind, int n):
    if kind == 0:
        return 4
    if kind == 1:
        return 7 * n
    return 8 * n


cdef double _explore(objective_t f, double* z, double fz, double h, int dim,
                     double* consts, double* work, double* y) noexcept nogil:
    cdef int i
    cdef double old, ft, fy = fz
    for i in range(dim):
        y[i] = z[i]
    for i in range(dim):
        old = y[i]
        y[i] = old + h
        ft = f(y, dim, consts, work)
        if ft > fy:
            fy = ft
            continue
        y[i] = old - h
        ft = f(y, dim, consts, work)
        if ft > fy:
            fy = ft
            continue
        y[i] = old
    return fy


cdef int _hooke_jeeves(objective_t f, double* x, int dim, double* consts, double* work,
                       double step, double min_step, int max_iter,
                       double* fbest, int* iters) noexcept nogil:
    cdef double* y = <double*>malloc(dim * sizeof(double))
    cdef double* z = <double*>malloc(dim * sizeof(double))
    cdef double fx, fy, h = step
    cdef int it = 0, i, converged = 0
    fx = f(x, dim, consts, work)
    while it < max_iter:
        fy = _explore(f, x, fx, h, dim, consts, work, y)
        it += 1
        if fy > fx:
            while True:
                for i in range(dim):
                    z[i] = 2.0 * y[i] - x[i]
                    x[i] = y[i]
                fx = fy
                if it >= max_iter:
                    break
                fy = _explore(f, z, f(z, dim, consts, work), h, dim, consts, work, y)
                it += 1
                if not fy > fx:
                    break
            continue
        h *= 0.5
        if h < min_step:
            converged = 1
            break
    free(y)
    free(z)
    fbest[0] = fx
    iters[0] = it
    return converged


def channel_mi(row_p, row_q, double prior_p):
    cdef double[::1] rp = np.ascontiguousarray(row_p, dtype=np.float64)
    cdef double[::1] rq = np.ascontiguousarray(row_q, dtype=np.float64)
    if rp.shape[0] != rq.shape[0]:
        raise ValueError("rows must have equal length")
    if rp.shape[0] == 0:
        return 0.0
    return _mi(&rp[0], &rq[0], rp.shape[0], prior_p)


def objective(int kind, x, consts):
    cdef double[::1] xv = np.array(x, dtype=np.float64)
    cdef double[::1] cv = np.array(consts, dtype=np.float64)
    cdef int n = <int>cv[2]
    cdef double[::1] work = np.empty(_work_size(kind, n), dtype=np.float64)
    return _select(kind)(&xv[0], xv.shape[0], &cv[0], &work[0])


def pattern_search(int kind, x0, consts, double step, double min_step, int max_iter):
    """Hooke-Jeeves maximization; returns (x, f, iterations, converged)."""
    cdef double[::1] xv = np.array(x0, dtype=np.float64)
    cdef double[::1] cv = np.array(consts, dtype=np.float64)
    cdef int n = <int>cv[2]
    cdef double[::1] work = np.empty(_work_size(kind, n), dtype=np.float64)
    cdef objective_t f = _select(kind)
    cdef int dim = xv.shape[0]
    cdef double fbest = 0.0
    cdef int iters = 0, converged
    with nogil:
        converged = _hooke_jeeves(f, &xv[0], dim, &cv[0], &work[0],
                                  step, min_step, max_iter, &fbest, &iters)
    return list(xv), fbest, iters, bool(converged)
