"""Rotation-sensing error delta Omega(t) for the four pipelines.

``ideal``       lossless closed form
``markovian``   closed form with u_l = exp(-(kappa + i w_l) t)
``exact``       Volterra amplitudes fed through the parity signal
``asymptotic``  long-time limit with two bound states
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError
from .probe import ideal_parity, parity_expectation, squeezing_from_photons
from .spectrum import RegimeReport, weight_gradient
from .volterra import KernelTable, ProbeConfig, TimeGrid, solve_mode

ZERO_DERIVATIVE = 1e-14
FD_RTOL = 1e-7
FD_MAX_HALVINGS = 6
EXACT_MAX_HALVINGS = 3
PROVENANCES = ("ideal", "markovian", "exact", "asymptotic")

OK = "ok"
FLAG_ZERO = "zero_derivative"
FLAG_FD = "fd_unconverged"


@dataclass
class SensitivitySeries:
    times: np.ndarray
    delta_omega: np.ndarray
    provenance: str
    flags: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")
        self.times = np.asarray(self.times, dtype=float)
        self.delta_omega = np.asarray(self.delta_omega, dtype=float)
        if self.flags is None:
            self.flags = np.where(np.isinf(self.delta_omega), FLAG_ZERO, OK)
        self.flags = np.asarray(self.flags, dtype=object)

    def __len__(self):
        return self.times.size

    @property
    def finite(self):
        return np.isfinite(self.delta_omega)

    def argmin(self):
        """Index of the smallest finite value, or None."""
        if not self.finite.any():
            return None
        return int(np.nanargmin(np.where(self.finite, self.delta_omega, np.nan)))

    def window(self, t_lo, t_hi):
        keep = (self.times >= t_lo) & (self.times <= t_hi)
        return SensitivitySeries(
            self.times[keep], self.delta_omega[keep], self.provenance, self.flags[keep], dict(self.meta)
        )


@dataclass(frozen=True)
class FitResult:
    prefactor: float
    exponent: float
    residual: float
    n_points: int

    def lines(self):
        return [
            ("prefactor", self.prefactor),
            ("exponent", self.exponent),
            ("residual", self.residual),
            ("n_points", self.n_points),
        ]


def default_step(Omega):
    return max(1e-6, 1e-4 * abs(Omega))


def _propagate(pi_of_Omega, Omega, h=None, rtol=FD_RTOL, max_halvings=FD_MAX_HALVINGS):
    """Error propagation with Richardson-extrapolated central differences.

    ``pi_of_Omega`` may return a scalar or an array (one value per time).
    The step is halved until the extrapolated derivative changes by less than
    ``rtol``. Returns (delta_omega, flags, accepted h).
    """
    h = default_step(Omega) if h is None else h
    if not h > 0:
        raise DomainError(f"finite-difference step must be > 0, got {h}")
    cache = {}

    def pi(k):
        # Pi at Omega + k * h / 2**j is keyed by the exact offset
        if k not in cache:
            cache[k] = np.asarray(pi_of_Omega(Omega + k), dtype=float)
        return cache[k]

    def central(step):
        return (pi(step) - pi(-step)) / (2 * step)

    p0 = pi(0.0)
    d_prev = central(h)
    d_half = central(h / 2)
    est = (4 * d_half - d_prev) / 3
    result = est.copy()
    best = np.full(np.shape(p0), np.inf)
    converged = np.zeros(np.shape(p0), dtype=bool)
    step = h / 2
    # a node keeps the first estimate that survives a halving of h; nodes
    # that never settle keep the estimate with the smallest change
    for _ in range(max_halvings):
        d_next = central(step / 2)
        nxt = (4 * d_next - d_half) / 3
        change = np.abs(nxt - est) / np.maximum(np.abs(nxt), ZERO_DERIVATIVE)
        better = ~converged & (change < best)
        result = np.where(better, est, result)
        best = np.where(better, change, best)
        converged = converged | (change <= rtol)
        est, d_half, step = nxt, d_next, step / 2
        if np.all(converged | (np.abs(est) < ZERO_DERIVATIVE)):
            break
    est = result

    dpi = np.sqrt(np.maximum((1.0 - p0) * (1.0 + p0), 0.0))
    zero = np.abs(est) < ZERO_DERIVATIVE
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(zero, np.inf, dpi / np.abs(est))
    flags = np.where(zero, FLAG_ZERO, np.where(converged, OK, FLAG_FD))
    return delta, flags, step


def error_propagation(pi_of_Omega, Omega, h=None):
    """delta Omega = sqrt(1 - Pi^2) / |d Pi / d Omega|; inf where the derivative vanishes."""
    delta, _, _ = _propagate(pi_of_Omega, Omega, h)
    return float(delta) if np.ndim(delta) == 0 else delta


def ideal_sensitivity(N, Omega, t):
    """Lossless closed form (1 + M c^2) / (2 sqrt(M) t |sin 2 Omega t|), M = N(N + 2).

    At the optimum cos(2 Omega t) = 0 this is [2 t sqrt(N(N + 2))]^(-1).
    """
    if N <= 0:
        raise DomainError(f"photon number must be > 0, got {N}")
    t = np.asarray(t, dtype=float)
    M = N * (N + 2.0)
    c = np.cos(2 * Omega * t)
    s = np.abs(np.sin(2 * Omega * t))
    with np.errstate(divide="ignore"):
        out = np.where(s * t > 0, (1 + M * c * c) / (2 * math.sqrt(M) * t * s), np.inf)
    return float(out) if out.ndim == 0 else out


def ideal_series(N, Omega, times) -> SensitivitySeries:
    return SensitivitySeries(times, ideal_sensitivity(N, Omega, times), "ideal")


def markovian_sensitivity(N, kappa, Omega, t):
    """Born-Markov closed form.

    (2 e^{2 t k} + N C e^{-2 t k}) sqrt(C) / (sqrt(8 N) (N + 2) t |sin 4 Omega t|),
    C = 4 e^{2 t k} + N - 2 + (N + 2) cos(4 Omega t).
    """
    if kappa < 0:
        raise DomainError(f"decay rate must be >= 0, got {kappa}")
    if N <= 0:
        raise DomainError(f"photon number must be > 0, got {N}")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("time must be > 0")
    grow = np.exp(2 * t * kappa)
    C = 4 * grow + N - 2 + (N + 2) * np.cos(4 * Omega * t)
    num = (2 * grow + N * C / grow) * np.sqrt(C)
    den = math.sqrt(8 * N) * (N + 2) * t * np.abs(np.sin(4 * Omega * t))
    with np.errstate(divide="ignore"):
        out = np.where(den > 0, num / den, np.inf)
    return float(out) if out.ndim == 0 else out


def markovian_series(N, kappa, Omega, times) -> SensitivitySeries:
    series = SensitivitySeries(times, markovian_sensitivity(N, kappa, Omega, times), "markovian")
    series.meta.update(N=N, kappa=kappa, Omega=Omega)
    return series


def markovian_propagated(N, kappa, Omega, t, h=None):
    """Error propagation on the parity of u_l = exp(-(kappa + i w_l) t), w_l = 1 +/- Omega."""
    t = np.asarray(t, dtype=float)
    r = squeezing_from_photons(N)
    decay = np.exp(-kappa * t)

    def pi(W):
        u1 = decay * np.exp(-1j * (1 + W) * t)
        u2 = decay * np.exp(-1j * (1 - W) * t)
        return parity_expectation(u1, u2, r)

    return error_propagation(pi, Omega, h)


def ideal_propagated(N, Omega, t, h=None):
    return error_propagation(lambda W: ideal_parity(N, W, t), Omega, h)


def exact_sensitivity(J, cfg: ProbeConfig, grid: TimeGrid, h=None, step_block=None) -> SensitivitySeries:
    """delta Omega(t) from Volterra amplitudes; all Omega shifts share one kernel table."""
    table = KernelTable(J, grid.dt, grid.n_steps)
    r = cfg.r

    def pi(W):
        shifted = ProbeConfig(Omega=W, N=cfg.N)
        u1, _ = solve_mode(J, shifted.omega1, grid, table, step_block)
        u2, _ = solve_mode(J, shifted.omega2, grid, table, step_block)
        return parity_expectation(u1, u2, r)

    # every halving costs two full solves, so the refinement is capped sooner
    delta, flags, step = _propagate(pi, cfg.Omega, h, max_halvings=EXACT_MAX_HALVINGS)
    series = SensitivitySeries(grid.times, delta, "exact", flags)
    series.meta.update(fd_min_step=step, memory_depth_steps=table.depth, memory_truncated=table.truncated)
    return series


def asymptotic_sensitivity(report: RegimeReport, N, Omega, t, dZ=None):
    """Long-time delta Omega with two bound states.

    F sqrt(2F - 4) / (2N(2 + N)) * |d(Z1^2 + Z2^2 - 1)^2 / (4 + 2N)
        + Z1^2 Z2^2 [t (Z1 + Z2) sin(2Gt) - 2 d ln(Z1 Z2) cos^2(Gt)]|^(-1),
    F = 2 + N sum Z^2 (2 - Z^2) + N Z1^2 Z2^2 [N + (2 + N) cos(2Gt)], G = E_b1 - E_b2,
    where d is the derivative in Omega. ``dZ`` overrides the numerical (dZ1, dZ2).
    """
    report.require_two()
    if N <= 0:
        raise DomainError(f"photon number must be > 0, got {N}")
    Z1, Z2 = report.bound1.weight, report.bound2.weight
    G = report.bound1.energy - report.bound2.energy
    dZ1, dZ2 = weight_gradient(report) if dZ is None else dZ
    return _asymptotic_formula(Z1, Z2, G, dZ1, dZ2, N, t)


def _asymptotic_formula(Z1, Z2, G, dZ1, dZ2, N, t):
    # with cos 2Gt = 2 cos^2 Gt - 1 and S = Z1^2 + Z2^2,
    # F - 2 = N S (2 - S) + 2 N (N + 2) Z1^2 Z2^2 cos^2 Gt, which has no
    # cancellation near cos Gt = 0 and vanishes there exactly when Z = 1
    t = np.asarray(t, dtype=float)
    zz = Z1 * Z1 * Z2 * Z2
    S = Z1 * Z1 + Z2 * Z2
    c, s = np.cos(G * t), np.sin(G * t)
    D = N * S * (2 - S) + 2 * N * (N + 2) * zz * c * c
    d_sq = 2 * (S - 1) * (2 * Z1 * dZ1 + 2 * Z2 * dZ2)
    d_log = dZ1 / Z1 + dZ2 / Z2
    denom = np.abs(d_sq / (4 + 2 * N) + zz * c * (2 * t * (Z1 + Z2) * s - 2 * d_log * c))
    pref = (2 + D) * np.sqrt(np.maximum(2 * D, 0.0)) / (2 * N * (2 + N))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, pref / denom, np.inf)
    return float(out) if out.ndim == 0 else out


def asymptotic_series(report, N, Omega, times) -> SensitivitySeries:
    dZ = weight_gradient(report)
    series = SensitivitySeries(times, asymptotic_sensitivity(report, N, Omega, times, dZ), "asymptotic")
    series.meta.update(dZ1=dZ[0], dZ2=dZ[1])
    return series


def local_minima_envelope(series: SensitivitySeries) -> SensitivitySeries:
    """Strict discrete local minima, skipping non-finite nodes."""
    keep = np.flatnonzero(series.finite)
    if keep.size < 3:
        raise DomainError("local-minima envelope needs at least 3 finite nodes")
    y = series.delta_omega[keep]
    inner = np.flatnonzero((y[1:-1] < y[:-2]) & (y[1:-1] < y[2:])) + 1
    idx = keep[inner]
    return SensitivitySeries(
        series.times[idx], series.delta_omega[idx], series.provenance, series.flags[idx], dict(series.meta)
    )


def power_law_fit(points) -> FitResult:
    """Least-squares line through (log x, log y): y = prefactor * x**exponent."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 5:
        raise DomainError("power-law fit needs at least 5 (x, y) points")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise DomainError("power-law fit needs positive finite values")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    return FitResult(
        prefactor=float(np.exp(icpt)),
        exponent=float(slope),
        residual=float(np.sqrt(np.mean(resid**2))),
        n_points=int(pts.shape[0]),
    )
