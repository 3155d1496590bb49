# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled leaf stepper; same contract as ``_leaf_py.step_block``."""

cdef extern from "<complex.h>" nogil:
    double cabs(double complex)

cdef double SANITY_BOUND = 1.0 + 1e-3


cdef Py_ssize_t _run(double complex[::1] v, double complex[::1] d,
                     double complex[::1] vw, const double complex[::1] hist,
                     const double complex[::1] g, double dt,
                     Py_ssize_t lo, Py_ssize_t hi, Py_ssize_t depth) noexcept nogil:
    cdef Py_ssize_t n, j, a
    cdef double complex h, vp, dp, vn, vprev, dprev
    cdef double complex half_g0 = 0.5 * g[0]
    for n in range(lo, hi):
        if n == 0:
            v[0] = 1.0
            d[0] = 0.0
            vw[0] = 0.5
            continue
        a = n - depth
        if a < lo:
            a = lo
        h = hist[n]
        for j in range(a, n):
            h = h + g[n - j] * vw[j]
        vprev = v[n - 1]
        dprev = d[n - 1]
        vp = vprev + dt * dprev
        dp = -dt * (h + half_g0 * vp)
        vn = vprev + 0.5 * dt * (dprev + dp)
        v[n] = vn
        d[n] = -dt * (h + half_g0 * vn)
        vw[n] = vn
        if cabs(vn) > SANITY_BOUND:
            return n
    return -1


def step_block(double complex[::1] v, double complex[::1] d, double complex[::1] vw,
               const double complex[::1] hist, const double complex[::1] g, double dt,
               Py_ssize_t lo, Py_ssize_t hi, Py_ssize_t depth):
    cdef Py_ssize_t out
    with nogil:
        out = _run(v, d, vw, hist, g, dt, lo, hi, depth)
    return out
