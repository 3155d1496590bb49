"""Laplace-domain picture of each mode: bound states and the continuum.

For E < 0 the self-energy Y_l(E) = w_l - int J(w)/(w - E) dw is real and
decreasing, so Y_l(E) = E has exactly one root there when Y_l(0) < 0. That
root E_b and its residue Z give the undamped long-time amplitude
u_l(t) -> Z exp(-i E_b t); the continuum E > 0 dephases away.
"""

from dataclasses import dataclass
import enum
import math

import numpy as np
from scipy.optimize import bisect

from ._quad import integrate, integrate_semi_infinite
from .errors import DomainError, NumericalConsistencyError, RegimeError
from .spectral import SpectralDensity
from .volterra import ProbeConfig

ROOT_XTOL = 1e-12
GRADIENT_STEP = 1e-6


class Regime(enum.Enum):
    NONE = "None"
    ONE_BOUND = "OneBound"
    TWO_BOUND = "TwoBound"


@dataclass(frozen=True)
class BoundState:
    energy: float
    weight: float


@dataclass(frozen=True)
class RegimeReport:
    spectral: SpectralDensity
    omega1: float
    omega2: float
    bound1: BoundState | None
    bound2: BoundState | None

    @property
    def regime(self) -> Regime:
        count = (self.bound1 is not None) + (self.bound2 is not None)
        return (Regime.NONE, Regime.ONE_BOUND, Regime.TWO_BOUND)[count]

    def bound(self, mode):
        return (self.bound1, self.bound2)[mode - 1]

    def require_two(self):
        if self.regime is not Regime.TWO_BOUND:
            raise RegimeError(
                f"two bound states required, regime is {self.regime.value} "
                f"(thresholds omega_c = {threshold_cutoff(self.spectral, self.omega2):.6g}, "
                f"{threshold_cutoff(self.spectral, self.omega1):.6g})"
            )


def self_energy(J: SpectralDensity, omega_l: float, E: float) -> float:
    """Y_l(E) for E < 0 by mapped semi-infinite quadrature."""
    if not E < 0:
        raise DomainError("self_energy needs E < 0; the branch cut E >= 0 is theta_density's domain")
    if J.is_decoupled:
        return float(omega_l)
    return omega_l - J.moment(lambda w: 1.0 / (w - E))


def self_energy_at_zero(J: SpectralDensity, omega_l: float) -> float:
    """Y_l(0-) = w_l - eta omega_c Gamma(s), closed form."""
    return omega_l - J.total_weight()


def threshold_cutoff(J: SpectralDensity, omega_l: float) -> float:
    """Cutoff omega_c above which mode omega_l binds: omega_l / (eta Gamma(s))."""
    if J.is_decoupled:
        return math.inf
    return omega_l / (J.eta * math.gamma(J.s))


def residue_weight(J: SpectralDensity, energy: float) -> float:
    """Z = [1 + int J(w) / (E_b - w)^2 dw]^(-1)."""
    return 1.0 / (1.0 + J.moment(lambda w: 1.0 / (energy - w) ** 2))


def find_bound_state(J: SpectralDensity, omega_l: float):
    """The isolated root of Y_l(E) = E below zero, or None if Y_l(0) >= 0."""
    if not omega_l > 0:
        raise DomainError(f"mode frequency must be > 0, got {omega_l}")
    y0 = self_energy_at_zero(J, omega_l)
    if J.is_decoupled or y0 >= 0:
        return None

    def gap(E):
        return y0 if E == 0 else self_energy(J, omega_l, E) - E

    lo = y0
    g_lo = gap(lo)
    if g_lo < 0:
        raise NumericalConsistencyError(
            f"bound-state bracket [{lo}, 0] inconsistent: g(Y(0)) = {g_lo} < 0"
        )
    root = lo if g_lo == 0 else bisect(gap, lo, 0.0, xtol=ROOT_XTOL, maxiter=200)
    return BoundState(energy=float(root), weight=float(residue_weight(J, root)))


def analyze(J: SpectralDensity, cfg: ProbeConfig) -> RegimeReport:
    return RegimeReport(
        spectral=J,
        omega1=cfg.omega1,
        omega2=cfg.omega2,
        bound1=find_bound_state(J, cfg.omega1),
        bound2=find_bound_state(J, cfg.omega2),
    )


def theta_density(J: SpectralDensity, omega_l: float, E):
    """Continuum density J(E) / ([E - w_l - Delta(E)]^2 + [pi J(E)]^2), E > 0."""
    E_arr = np.atleast_1d(np.asarray(E, dtype=float))
    if np.any(E_arr <= 0):
        raise DomainError("theta_density is defined for E > 0 only")
    if J.is_decoupled:
        out = np.zeros_like(E_arr)
    else:
        shift = np.array([J.lamb_shift(e) for e in E_arr])
        jE = J.evaluate(E_arr)
        out = jE / ((E_arr - omega_l - shift) ** 2 + (math.pi * jE) ** 2)
    return float(out[0]) if np.ndim(E) == 0 else out


def continuum_weight(J: SpectralDensity, omega_l: float, rtol=1e-7) -> float:
    """int_0^inf theta_density dE, with panels of width kappa/4 around w_l."""
    if J.is_decoupled:
        return 0.0
    kappa = J.decay_rate(omega_l)
    step = kappa / 4.0
    seeds = [omega_l + k * step for k in range(-20, 21)]
    seeds = [e for e in seeds if e > 0]
    top = max(omega_l + 6 * kappa, 2.0 * omega_l)
    dens = lambda E: theta_density(J, omega_l, E)
    near = integrate(dens, 0.0, top, rtol=rtol, breakpoints=seeds)
    far = integrate_semi_infinite(dens, top, J.omega_c, rtol=rtol)
    return near + far


def asymptotic_u(report: RegimeReport, t):
    """Long-time amplitudes (u_1, u_2): Z exp(-i E_b t), or 0 without a bound state."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be >= 0")
    out = []
    for b in (report.bound1, report.bound2):
        if b is None:
            out.append(np.zeros_like(t, dtype=complex) if t.ndim else 0j)
        else:
            val = b.weight * np.exp(-1j * b.energy * t)
            out.append(complex(val) if t.ndim == 0 else val)
    return tuple(out)


def bound_state_gradient(J: SpectralDensity, cfg: ProbeConfig):
    """(d E_b1 / d Omega, d E_b2 / d Omega) = (Z_1, -Z_2).

    Differentiating Y_l(E_b) = E_b with w_{1,2} = 1 +/- Omega gives
    dE_b/dw_l = Z_l.
    """
    report = analyze(J, cfg)
    report.require_two()
    return report.bound1.weight, -report.bound2.weight


def weight_gradient(report: RegimeReport, step=GRADIENT_STEP):
    """(d Z_1 / d Omega, d Z_2 / d Omega) by central differences of the residue."""
    report.require_two()
    J = report.spectral
    out = []
    for omega, sign in ((report.omega1, 1.0), (report.omega2, -1.0)):
        plus = find_bound_state(J, omega + sign * step)
        minus = find_bound_state(J, omega - sign * step)
        if plus is None or minus is None:
            raise RegimeError("bound state disappears within the finite-difference step")
        out.append((plus.weight - minus.weight) / (2 * step))
    return tuple(out)


def report_lines(report: RegimeReport) -> list[tuple[str, object]]:
    """Flat key/value view of a regime report."""
    J = report.spectral
    rows = [
        ("regime", report.regime.value),
        ("eta", J.eta),
        ("omega_c", J.omega_c),
        ("s", J.s),
        ("omega1", report.omega1),
        ("omega2", report.omega2),
        ("threshold_omega_c_mode1", threshold_cutoff(J, report.omega1)),
        ("threshold_omega_c_mode2", threshold_cutoff(J, report.omega2)),
        ("Y0_mode1", self_energy_at_zero(J, report.omega1)),
        ("Y0_mode2", self_energy_at_zero(J, report.omega2)),
    ]
    for mode in (1, 2):
        b = report.bound(mode)
        rows.append((f"E_b{mode}", "absent" if b is None else b.energy))
        rows.append((f"Z_{mode}", "absent" if b is None else b.weight))
    return rows
