"""Ohmic-family bath model and every scalar derived from it.

All frequencies are in units of the bare mode frequency omega_0 (so
omega_0 = 1) and times are in units of 1/omega_0.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate as _sp_integrate
from scipy.special import gamma as _gamma

from ._quad import integrate, integrate_semi_infinite
from .errors import DomainError

Frequency = float

QUAD_RTOL = 1e-10
PV_AGREEMENT = 1e-9


@dataclass(frozen=True)
class SpectralDensity:
    """J(w) = eta * w**s * omega_c**(1 - s) * exp(-w / omega_c).

    ``eta = 0`` is allowed and gives the decoupled (ideal) limit.
    """

    eta: float
    omega_c: float
    s: float = 1.0

    def __post_init__(self):
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise DomainError(f"coupling eta must be finite and >= 0, got {self.eta}")
        if not (self.omega_c > 0 and math.isfinite(self.omega_c)):
            raise DomainError(f"cutoff omega_c must be > 0, got {self.omega_c}")
        if not (self.s > 0 and math.isfinite(self.s)):
            raise DomainError(f"ohmicity s must be > 0, got {self.s}")

    @property
    def is_decoupled(self) -> bool:
        return self.eta == 0

    def evaluate(self, omega):
        """J(omega); accepts scalars or arrays, omega >= 0."""
        w = np.asarray(omega, dtype=float)
        if np.any(w < 0):
            raise DomainError("spectral density is defined for omega >= 0 only")
        out = self._j(w)
        return float(out) if out.ndim == 0 else out

    def _j(self, w):
        # unchecked, vectorized J used inside quadratures
        with np.errstate(under="ignore"):
            return self.eta * w**self.s * self.omega_c ** (1.0 - self.s) * np.exp(-w / self.omega_c)

    def kernel(self, x):
        """Bath correlation function f(x) = int_0^inf J(w) exp(-i w x) dw.

        Closed form eta*Gamma(s+1)*omega_c**2 / (1 + i omega_c x)**(s+1),
        principal branch.
        """
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("kernel is defined for x >= 0 only")
        amp = self.eta * _gamma(self.s + 1.0) * self.omega_c**2
        out = amp * (1.0 + 1j * self.omega_c * x) ** (-(self.s + 1.0))
        return complex(out) if out.ndim == 0 else out

    def kernel_modulus_depth(self, threshold: float = 1e-8) -> float:
        """Smallest x with |f(x)| < threshold * |f(0)|."""
        # |f(x)/f(0)| = (1 + omega_c**2 x**2) ** (-(s+1)/2)
        return math.sqrt(threshold ** (-2.0 / (self.s + 1.0)) - 1.0) / self.omega_c

    def decay_rate(self, omega_l: Frequency) -> float:
        """Born-Markov decay rate kappa = pi * J(omega_l)."""
        _require_positive(omega_l)
        return math.pi * self.evaluate(omega_l)

    def total_weight(self) -> float:
        """int_0^inf J(w)/w dw = eta * omega_c * Gamma(s)."""
        if self.s <= 0:
            raise DomainError("int J(w)/w dw diverges for s <= 0")
        return self.eta * self.omega_c * math.gamma(self.s)

    def lamb_shift(self, omega_l: Frequency) -> float:
        """Principal value P int_0^inf J(w) / (omega_l - w) dw.

        The singular part J(omega_l)/(omega_l - w) integrates to zero over a
        window symmetric about omega_l, so only the regular remainder is
        integrated there. The window is halved until two successive
        results agree.
        """
        _require_positive(omega_l)
        if self.is_decoupled:
            return 0.0
        width = 0.5 * min(omega_l, self.omega_c)
        prev = self._pv_with_window(omega_l, width)
        for _ in range(40):
            width *= 0.5
            cur = self._pv_with_window(omega_l, width)
            if abs(cur - prev) <= PV_AGREEMENT * max(1.0, abs(cur)):
                return cur
            prev = cur
        return cur

    def _pv_with_window(self, e, width):
        je = float(self._j(np.float64(e)))
        left = integrate(lambda w: self._j(w) / (e - w), 0.0, e - width, rtol=QUAD_RTOL)
        middle = integrate(
            lambda w: (self._j(w) - je) / (e - w), e - width, e + width, rtol=QUAD_RTOL,
            breakpoints=(e,),
        )
        right = integrate_semi_infinite(
            lambda w: self._j(w) / (e - w), e + width, self.omega_c, rtol=QUAD_RTOL
        )
        return left + middle + right

    def moment(self, fn, breakpoints=()) -> float:
        """int_0^inf fn(w) J(w) dw by mapped adaptive quadrature."""
        return integrate_semi_infinite(
            lambda w: fn(w) * self._j(w), 0.0, self.omega_c, rtol=QUAD_RTOL,
            breakpoints=breakpoints,
        )


def kernel_by_quadrature(J: SpectralDensity, x: float) -> complex:
    """Oscillatory-quadrature evaluation of f(x); a diagnostic, not the hot path.

    Uses QUADPACK's cos/sin-weighted routine for x > 0, which integrates the
    oscillation analytically on each subinterval. J is below exp(-60) of its
    scale beyond 60*omega_c, so the range is truncated there.
    """
    if x < 0:
        raise DomainError("kernel is defined for x >= 0 only")
    if J.is_decoupled:
        return 0j
    g = lambda w: float(J._j(np.float64(w)))
    if x == 0:
        re, _ = _sp_integrate.quad(g, 0, np.inf, epsabs=0, epsrel=1e-13, limit=500)
        return complex(re, 0.0)
    top = 60.0 * J.omega_c
    tol = 1e-14 * abs(J.kernel(0.0))
    opts = dict(wvar=x, epsabs=tol, epsrel=1e-12, limit=2000)
    re, _ = _sp_integrate.quad(g, 0, top, weight="cos", **opts)
    im, _ = _sp_integrate.quad(g, 0, top, weight="sin", **opts)
    return complex(re, -im)


def _require_positive(omega_l):
    if not omega_l > 0:
        raise DomainError(f"mode frequency must be > 0, got {omega_l}")
