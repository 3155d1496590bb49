"""History convolution for the Volterra stepper.

The trapezoidal memory sum  sum_j w_j g[n-j] v[j]  is split between the leaf
stepper (sources in the current block of ``LEAF`` steps, summed directly) and
FFT block products (every older source), following the divide-and-conquer
scheme for convolution-type Volterra equations: after the left half of a
block is known its contribution to the right half is added in one FFT
product. The result equals the direct sum up to rounding; the cost is
O(T log^2 T) instead of O(T * depth).
"""

import numpy as np

from . import _backend
from .errors import SolverDiagnosticError

LEAF = 128


def _pow2_blocks(count):
    size = LEAF
    while size < count:
        size *= 2
    return size


def solve_rotating(g, dt, n_steps, depth, step_block=None, corr=None):
    """Solve v' = -int_0^t g(t - tau) v(tau) dtau, v(0) = 1, on n_steps + 1 nodes.

    ``g`` holds the quadrature weights on the lag grid, at least
    ``min(depth, n_steps) + 1`` entries; lags beyond ``depth`` are dropped.
    ``corr[n]`` is added to the history sum of step n, which lets product
    rules adjust the weight of the v(0) = 1 endpoint. Returns (v, dv/dt).
    """
    step_block = step_block or _backend.step_block
    total = n_steps + 1
    padded = _pow2_blocks(total)
    chunk = min(padded, _pow2_blocks(depth + 1))

    kern = np.zeros(2 * chunk, dtype=complex)
    keep = min(depth, 2 * chunk - 1, len(g) - 1) + 1
    kern[:keep] = g[:keep]

    v = np.zeros(padded, dtype=complex)
    d = np.zeros(padded, dtype=complex)
    vw = np.zeros(padded, dtype=complex)
    hist = np.zeros(padded, dtype=complex)
    if corr is not None:
        m = min(len(corr), total)
        hist[:m] = corr[:m]
    spectra = {}

    def spread(lo, mid, hi):
        # add sources [lo, mid) to targets [mid, hi); both halves have length L
        L = mid - lo
        spec = spectra.get(L)
        if spec is None:
            spec = spectra[L] = np.fft.fft(kern[: 2 * L], 4 * L)
        prod = np.fft.ifft(np.fft.fft(vw[lo:mid], 4 * L) * spec)
        hist[mid:hi] += prod[L : 2 * L]

    def process(lo, hi):
        if lo >= total:
            return
        if hi - lo <= LEAF:
            bad = step_block(v, d, vw, hist, kern, dt, lo, min(hi, total), depth)
            if bad >= 0:
                raise SolverDiagnosticError(
                    f"|u| exceeded 1 + 1e-3 at step {bad} (t = {bad * dt:.6g}); "
                    "reduce the time step dt"
                )
            return
        mid = (lo + hi) // 2
        process(lo, mid)
        if mid < total:
            spread(lo, mid, hi)
        process(mid, hi)

    try:
        for start in range(0, padded, chunk):
            if start >= total:
                break
            process(start, start + chunk)
            if start + chunk < total:
                spread(start, start + chunk, start + 2 * chunk)
    finally:
        # the recursive closure references itself; break the cycle so the
        # work arrays are freed now rather than at the next gc pass
        process = None
    return v[:total].copy(), d[:total].copy()
