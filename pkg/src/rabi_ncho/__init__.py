"""Spectral numerics for two-photon / one-photon Rabi models and non-commutative harmonic oscillators.

Modules
-------
fock          truncated Fock-basis operator matrices and Z4 sector bookkeeping
spectral      Hamiltonian assembly, diagonalisation, truncation escalation, checks
perturbation  small-coupling coefficients, ξ(u), concavity checks
feynman_kac   Monte Carlo semigroup matrix elements
zeta          Hurwitz and spectral zeta functions, parameter limits
fiber         NcHO ↔ Rabi fiber correspondence
cli           batch command-line interface
"""

__version__ = "0.1.0"
