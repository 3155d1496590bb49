"""Rotation-sensing precision of a two-mode quantum optical gyroscope.

Exact non-Markovian dynamics, the Born-Markov approximation and the ideal
lossless limit, plus the bound-state analysis that explains when the ideal
sensitivity survives photon loss.
"""

__version__ = "0.1.0"
