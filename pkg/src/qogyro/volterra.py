"""Exact amplitude dynamics u_l(t) of the two dissipative optical modes.

Each mode obeys

    du/dt + i w_l u + int_0^t f(t - tau) u(tau) dtau = 0,   u(0) = 1,

with f the bath correlation function of a single spectral density shared by
both modes. The stepper works in the frame rotating at w_l, so the decoupled
limit is reproduced to rounding error.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import _backend
from ._memory import solve_rotating
from .errors import DomainError, NumericalConsistencyError
from .spectral import SpectralDensity

MEMORY_THRESHOLD = 1e-8
GRID_RTOL = 1e-5
MAX_STEPS = 1 << 23  # about 1 GB of solver state


@dataclass(frozen=True)
class ProbeConfig:
    """Gyroscope settings: rotation rate Omega and the photon number N.

    The squeeze parameter is derived, N = 2 sinh^2 r; build from r with
    :meth:`from_squeezing`.
    """

    Omega: float
    N: float = 100.0
    omega0: float = 1.0

    def __post_init__(self):
        if self.omega0 != 1.0:
            raise DomainError("omega0 defines the frequency unit and must be 1")
        if not self.N >= 0:
            raise DomainError(f"photon number must be >= 0, got {self.N}")
        if not abs(self.Omega) < self.omega0:
            raise DomainError(
                f"both mode frequencies 1 +/- Omega must be > 0, got Omega = {self.Omega}"
            )

    @classmethod
    def from_squeezing(cls, Omega, r):
        if r < 0:
            raise DomainError(f"squeeze parameter must be >= 0, got {r}")
        return cls(Omega=Omega, N=2.0 * math.sinh(r) ** 2)

    @property
    def r(self) -> float:
        return math.asinh(math.sqrt(self.N / 2.0))

    @property
    def omega1(self) -> float:
        return self.omega0 + self.Omega

    @property
    def omega2(self) -> float:
        return self.omega0 - self.Omega

    def shifted(self, dOmega):
        return ProbeConfig(Omega=self.Omega + dOmega, N=self.N)


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"time step must be > 0, got {self.dt}")
        if not self.t_max >= self.dt:
            raise DomainError(f"t_max must be >= dt, got t_max={self.t_max}, dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_max / self.dt * (1 + 1e-12)))

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)

    def halved(self):
        return TimeGrid(self.t_max, 0.5 * self.dt)


@dataclass
class Trajectory:
    grid: TimeGrid
    u1: np.ndarray
    u2: np.ndarray
    du1: np.ndarray
    du2: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def times(self):
        return self.grid.times

    def amplitude(self, mode):
        return (self.u1, self.u2)[mode - 1]

    def derivative(self, mode):
        return (self.du1, self.du2)[mode - 1]


class KernelTable:
    """f(k dt) for k = 0..depth, shared by every mode and Omega shift."""

    def __init__(self, J: SpectralDensity, dt: float, n_steps: int):
        self.J = J
        self.dt = dt
        if J.is_decoupled:
            self.depth = 0
        else:
            self.depth = int(math.ceil(J.kernel_modulus_depth(MEMORY_THRESHOLD) / dt))
        self.size = min(self.depth, n_steps) + 1
        self.values = J.kernel(dt * np.arange(self.size)) if not J.is_decoupled else np.zeros(1, complex)
        self.truncated = self.depth < n_steps
        self._nodes = None

    def rotated(self, omega_l):
        # kernel seen in the frame rotating at omega_l: f(x) exp(i omega_l x)
        lags = np.arange(self.values.size)
        return self.values * np.exp(1j * omega_l * self.dt * lags)

    def product_weights(self, omega_l):
        """Product-trapezoid weights for the rotated kernel.

        The memory integral is taken exactly for v interpolated linearly
        between nodes:  I_n = sum_j c_{n-j} v_j + (a_{n-1} - c_n) v_0  with
        a_m, b_m the first moments of g over lag interval m and
        c_k = b_k + a_{k-1}. Returns (K, corr) in the stepper's convention
        I_n = dt [sum_{j<n} K_{n-j} vw_j + K_0 v_n / 2] + dt corr_n, vw_0 = 1/2.
        """
        dt = self.dt
        size = self.size
        if self.J.is_decoupled:
            return np.zeros(size, complex), np.zeros(size, complex)
        nodes, weights, f_nodes = self._node_values()
        intervals = f_nodes.shape[0]
        # exp(i w x) = exp(i w m dt) exp(i w phi dt) on interval m
        local = np.exp(1j * omega_l * dt * nodes)
        outer = np.exp(1j * omega_l * dt * np.arange(intervals))
        a = dt * outer * (f_nodes @ (weights * nodes * local))
        b = dt * outer * (f_nodes @ (weights * (1.0 - nodes) * local))
        c = np.zeros(size, complex)
        c[:intervals] += b
        c[1 : intervals + 1] += a[: size - 1]
        K = c / dt
        K[0] *= 2.0
        corr = np.zeros(size, complex)
        corr[1:] = (a[: size - 1] - 0.5 * c[1:]) / dt
        return K, corr

    def _node_values(self):
        # f at Gauss-Legendre nodes of every lag interval; Omega independent, so cached
        if self._nodes is None:
            order = 4 if self.dt * self.J.omega_c <= 0.05 else 8
            x, w = np.polynomial.legendre.leggauss(order)
            nodes, weights = 0.5 * (x + 1.0), 0.5 * w
            intervals = self.size - 1 if self.truncated else self.size
            lags = np.arange(intervals)[:, None] + nodes[None, :]
            self._nodes = (nodes, weights, self.J.kernel(self.dt * lags))
        return self._nodes


def default_dt(J: SpectralDensity, cfg: ProbeConfig) -> float:
    """min(0.02/omega_c, 0.02/omega_l, 0.05/sqrt(f(0))), bath terms only when coupled."""
    dt = 0.02 / max(cfg.omega1, cfg.omega2)
    if not J.is_decoupled:
        dt = min(dt, 0.02 / J.omega_c, 0.05 / math.sqrt(abs(J.kernel(0.0))))
    return dt


def solve_mode(J, omega_l, grid, table=None, step_block=None):
    """Amplitude u(t) and its derivative for one mode of frequency omega_l."""
    if not omega_l > 0:
        raise DomainError(f"mode frequency must be > 0, got {omega_l}")
    n = grid.n_steps
    if table is None or table.dt != grid.dt or table.size < min(table.depth, n) + 1:
        table = KernelTable(J, grid.dt, n)
    K, corr = table.product_weights(omega_l)
    v, dv = solve_rotating(K, grid.dt, n, table.depth, step_block, corr)
    phase = np.exp(-1j * omega_l * grid.times)
    u = phase * v
    du = phase * (dv - 1j * omega_l * v)
    return u, du


def solve(J: SpectralDensity, cfg: ProbeConfig, grid: TimeGrid, table=None, step_block=None):
    """Solve both modes on ``grid``. The modes share nothing but the kernel table."""
    if grid.n_steps > MAX_STEPS:
        raise DomainError(
            f"{grid.n_steps} steps exceed the limit of {MAX_STEPS}; raise dt or lower t_max"
        )
    table = table or KernelTable(J, grid.dt, grid.n_steps)
    u1, du1 = solve_mode(J, cfg.omega1, grid, table, step_block)
    u2, du2 = solve_mode(J, cfg.omega2, grid, table, step_block)
    info = {
        "backend": _backend.NAME if step_block is None else getattr(step_block, "__module__", "custom"),
        "memory_depth_steps": table.depth,
        "memory_truncated": table.truncated,
    }
    return Trajectory(grid, u1, u2, du1, du2, info)


@dataclass
class ConvergenceReport:
    dt: float
    halvings: int
    rel_change: float
    converged: bool

    def as_dict(self):
        return {
            "accepted_dt": self.dt,
            "halvings": self.halvings,
            "rel_change_u_tmax": self.rel_change,
            "converged": self.converged,
        }


def grid_change(coarse: Trajectory, fine: Trajectory) -> float:
    """Relative change of u_l at the last coarse node, worst mode.

    ``fine`` must use half the coarse step. The scale is floored at 1e-3 so
    fully decayed amplitudes are compared absolutely.
    """
    idx = 2 * coarse.grid.n_steps
    worst = 0.0
    for mode in (1, 2):
        a = coarse.amplitude(mode)[-1]
        b = fine.amplitude(mode)[idx]
        worst = max(worst, abs(a - b) / max(abs(b), 1e-3))
    return worst


def solve_converged(J, cfg, t_max, dt=None, rtol=GRID_RTOL, max_halvings=6):
    """Halve dt until one more halving changes u(t_max) by < rtol.

    Returns the trajectory on the accepted grid (the coarser of the final
    pair) and a report.
    """
    grid = TimeGrid(t_max, dt or default_dt(J, cfg))
    coarse = solve(J, cfg, grid)
    change = math.inf
    for k in range(max_halvings):
        if coarse.grid.halved().n_steps > MAX_STEPS:
            break
        fine = solve(J, cfg, coarse.grid.halved())
        change = grid_change(coarse, fine)
        if change < rtol:
            return coarse, ConvergenceReport(coarse.grid.dt, k, change, True)
        coarse = fine
    return coarse, ConvergenceReport(coarse.grid.dt, k, change, False)


def masteq_coefficients(traj: Trajectory, floor=1e-12):
    """Renormalized frequency and dissipation rate of each mode.

    varpi_l = -Im(du_l/u_l), gamma_l = -Re(du_l/u_l). Nodes with |u_l| below
    ``floor`` are NaN and flagged in the returned mask.
    """
    out = {}
    for mode in (1, 2):
        u = traj.amplitude(mode)
        du = traj.derivative(mode)
        ok = np.abs(u) > floor
        ratio = np.full(u.shape, np.nan + 0j)
        ratio[ok] = du[ok] / u[ok]
        out[mode] = {"varpi": -ratio.imag, "gamma": -ratio.real, "undefined": ~ok}
    return out


def check_trajectory(traj: Trajectory, eps=1e-6):
    """Raise if any |u_l| exceeds 1 + eps."""
    for mode in (1, 2):
        peak = float(np.max(np.abs(traj.amplitude(mode))))
        if peak > 1 + eps:
            raise NumericalConsistencyError(f"|u_{mode}| reached {peak:.9g} > 1 + {eps}")
