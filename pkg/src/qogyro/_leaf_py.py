"""Pure-Python leaf stepper; the fallback for the compiled ``_leaf_ext``.

Both implementations advance the rotating-frame amplitude v(t) = e^{i w t} u(t)
over the steps [lo, hi) with an Euler predictor and one trapezoidal
corrector pass. ``hist[n]`` already holds the history sum from every source
index below ``lo``; the sources inside the block are summed directly.
"""

import numpy as np

SANITY_BOUND = 1.0 + 1e-3


def step_block(v, d, vw, hist, g, dt, lo, hi, depth):
    """Advance steps lo..hi-1 in place; return the first failing step or -1."""
    half_g0 = 0.5 * g[0]
    for n in range(lo, hi):
        if n == 0:
            v[0] = 1.0
            d[0] = 0.0
            vw[0] = 0.5
            continue
        a = max(lo, n - depth)
        h = hist[n]
        if n > a:
            h += np.dot(g[n - a:0:-1], vw[a:n])
        vprev = v[n - 1]
        dprev = d[n - 1]
        vp = vprev + dt * dprev
        dp = -dt * (h + half_g0 * vp)
        vn = vprev + 0.5 * dt * (dprev + dp)
        v[n] = vn
        d[n] = -dt * (h + half_g0 * vn)
        vw[n] = vn
        if abs(vn) > SANITY_BOUND:
            return n
    return -1
