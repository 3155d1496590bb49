"""Parity signal of the gyroscope for given mode amplitudes.

The two-mode squeezed vacuum passes a 50:50 beam splitter, each arm evolves
with its amplitude u_l(t), a second beam splitter recombines them, and the
parity of output mode 1 is measured.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, NumericalConsistencyError

IMAG_TOL = 1e-10
AMPLITUDE_TOL = 1e-6


@dataclass(frozen=True)
class ParityIntermediates:
    """Coefficients of the Gaussian output kernel x exp(sum m a^2 + m* a'^2 + p a a')."""

    A1: np.ndarray
    A2: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    x: np.ndarray


def parity_intermediates(u1, u2, r) -> ParityIntermediates:
    """A_l, m_l, p_l and x for amplitudes u_l and squeeze parameter r.

    A_l = 1 - (|u_l|^2 - 1)^2 tanh^2 r
    m_l = -i u_l^2 tanh r / (2 A_l)
    p_l = tanh^2 r |u_l|^2 (1 - |u_l|^2) / A_l
    x   = 1 / (sqrt(A_1 A_2) cosh^2 r)

    p_l is the coefficient produced by the Gaussian integral over the initial
    coherent-state labels; it vanishes without loss and lies in [0, 1).
    """
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    if r < 0:
        raise DomainError(f"squeeze parameter must be >= 0, got {r}")
    for u in (u1, u2):
        if np.any(np.abs(u) > 1 + AMPLITUDE_TOL):
            raise DomainError("mode amplitudes must satisfy |u| <= 1")
    th = math.tanh(r)
    th2 = th * th
    n1 = np.abs(u1) ** 2
    n2 = np.abs(u2) ** 2
    A1 = 1.0 - (n1 - 1.0) ** 2 * th2
    A2 = 1.0 - (n2 - 1.0) ** 2 * th2
    return ParityIntermediates(
        A1=A1,
        A2=A2,
        m1=-0.5j * th * u1**2 / A1,
        m2=-0.5j * th * u2**2 / A2,
        p1=th2 * n1 * (1.0 - n1) / A1,
        p2=th2 * n2 * (1.0 - n2) / A2,
        x=1.0 / (np.sqrt(A1 * A2) * math.cosh(r) ** 2),
    )


def parity_bracket(q: ParityIntermediates):
    """The complex bracket under the inverse square root; real in exact arithmetic."""
    m1, m2, p1, p2 = q.m1, q.m2, q.p1, q.p2
    return (
        4 * m1 * (np.conj(m2) - np.conj(m1) * p2**2)
        + 4 * m2 * (np.conj(m1) - np.conj(m2) * p1**2)
        + (1 - p1 * p2) ** 2
        + 16 * np.abs(m1 * m2) ** 2
    )


def scaled_bracket(u1, u2, r):
    """cosh^4 r times the bracket, rearranged to avoid cancellation.

    With w = u_1^2 conj(u_2)^2 / (A_1 A_2) and q_l = p_l cosh^2 r,
    cosh^4 r [...] = |1 + sinh^2 r (1 + w)|^2 - q_1 q_2 (2 - p_1 p_2)
                     - tanh^2 r (|u_1|^4 q_2^2 / A_1^2 + |u_2|^4 q_1^2 / A_2^2).
    In the lossless case only the first term survives, and 1 + sinh^2 r (1 + w)
    does not suffer the 1 - tanh^2 r cancellation of the raw form.
    """
    q = parity_intermediates(u1, u2, r)
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    sh2 = math.sinh(r) ** 2
    th2 = math.tanh(r) ** 2
    n1 = np.abs(u1) ** 2
    n2 = np.abs(u2) ** 2
    w = u1**2 * np.conj(u2) ** 2 / (q.A1 * q.A2)
    q1 = sh2 * n1 * (1.0 - n1) / q.A1
    q2 = sh2 * n2 * (1.0 - n2) / q.A2
    value = (
        np.abs(1.0 + sh2 * (1.0 + w)) ** 2
        - q1 * q2 * (2.0 - q.p1 * q.p2)
        - th2 * (n1**2 * q2**2 / q.A1**2 + n2**2 * q1**2 / q.A2**2)
    )
    return q, value


def parity_expectation(u1, u2, r):
    """Expected parity of output mode 1, in (0, 1]; scalar or array.

    The raw complex bracket is checked for an imaginary residue; the value
    itself comes from :func:`scaled_bracket`.
    """
    q, scaled = scaled_bracket(u1, u2, r)
    br = parity_bracket(q)
    scale = np.maximum(np.abs(br), 1.0)
    if np.any(np.abs(br.imag) > IMAG_TOL * scale):
        raise NumericalConsistencyError(
            f"parity bracket has imaginary residue {np.max(np.abs(br.imag)):.3g}"
        )
    if np.any(scaled <= 0):
        raise NumericalConsistencyError("parity bracket is not positive")
    out = 1.0 / np.sqrt(q.A1 * q.A2 * scaled)
    return float(out) if np.ndim(out) == 0 else out


def ideal_parity(N, Omega, t):
    """[1 + N(2 + N) cos^2(2 Omega t)]^(-1/2)."""
    if N < 0:
        raise DomainError(f"photon number must be >= 0, got {N}")
    t = np.asarray(t, dtype=float)
    out = (1.0 + N * (2.0 + N) * np.cos(2.0 * Omega * t) ** 2) ** -0.5
    return float(out) if out.ndim == 0 else out


def sagnac_map(n: int, Omega: float) -> float:
    """Mode splitting 2 n Omega for standing-wave index n = kR >= 1."""
    if int(n) != n or n < 1:
        raise DomainError(f"standing-wave index must be an integer >= 1, got {n}")
    return 2.0 * n * Omega


def squeezing_from_photons(N):
    return math.asinh(math.sqrt(N / 2.0))
