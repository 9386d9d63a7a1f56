"""Truncated harmonic-oscillator (Fock) basis: boson and spin matrices.

Conventions
-----------
* Fock levels ``|0>, ..., |n_max-1>`` with ``a|n> = sqrt(n)|n-1>``.
* Spin-boson states are flattened boson-major with the spin index fastest:
  ``flat(spin, n) = 2*n + (0 if spin is up else 1)``. Spin up is the
  ``sigma_z = +1`` state.
* Every matrix returned here is real. Operators carrying an explicit factor
  of ``-i`` in front of a real antisymmetric Fock matrix (``-i(a^2 - a†^2)``,
  ``-i(a - a†)``, ``(pq+qp)/2``) are returned as that real antisymmetric
  matrix; the ``-i`` is absorbed into the spin factor ``J = -i sigma_y``
  when Hamiltonians are assembled, which keeps every Hamiltonian real
  symmetric.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Spin",
    "BasisIndex",
    "SectorLabel",
    "BOSON_KINDS",
    "SPIN_KINDS",
    "flat_index",
    "basis_index",
    "annihilation",
    "boson_matrix",
    "spin_matrix",
    "kron_assemble",
    "sector_of",
    "sector_indices",
    "sector_permutation",
]


class Spin(enum.Enum):
    UP = 0
    DOWN = 1


@dataclass(frozen=True)
class BasisIndex:
    spin: Spin
    level: int

    def flat(self) -> int:
        return flat_index(self.spin, self.level)


class SectorLabel(enum.Enum):
    """Eigenvalue labels of ``sigma_z ⊗ exp(i pi/2 a†a)``."""

    PLUS1 = "plus1"
    MINUS1 = "minus1"
    PLUS_I = "plusI"
    MINUS_I = "minusI"


BOSON_KINDS = (
    "number",
    "create2_plus_annih2",
    "i_times_diff",
    "create_plus_annih",
    "i_times_diff1",
    "q",
    "q2",
    "p2",
    "pq_sym",
)

SPIN_KINDS = ("sx", "sy_real", "sz", "identity", "diag", "gamma")


def flat_index(spin: Spin, level: int) -> int:
    if level < 0:
        raise ValueError(f"Fock level must be >= 0, got {level}")
    return 2 * level + spin.value


def basis_index(flat: int) -> BasisIndex:
    if flat < 0:
        raise ValueError(f"flat index must be >= 0, got {flat}")
    return BasisIndex(Spin(flat % 2), flat // 2)


def _check_n(n_max: int) -> None:
    if int(n_max) != n_max or n_max < 2:
        raise ValueError(f"n_max must be an integer >= 2, got {n_max!r}")


def annihilation(n_max: int) -> np.ndarray:
    """Matrix of ``a`` on the first ``n_max`` Fock levels."""
    _check_n(n_max)
    return np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), 1)


def _offdiag2(n_max: int) -> np.ndarray:
    # <n|a^2|n+2> = sqrt((n+1)(n+2)), built directly so entries are exact products
    n = np.arange(n_max - 2, dtype=float)
    return np.diag(np.sqrt((n + 1.0) * (n + 2.0)), 2)


def boson_matrix(kind: str, n_max: int) -> np.ndarray:
    """Compression of a boson operator to ``span{|0>, ..., |n_max-1>}``.

    The result is the matrix of exact matrix elements ``<m|O|n>``, not a
    product of truncated ladder matrices, so e.g. ``q2`` is correct in the
    last row as well.

    Parameters
    ----------
    kind : str
        One of :data:`BOSON_KINDS`. ``i_times_diff`` and ``i_times_diff1``
        return the real antisymmetric matrices of ``a^2 - a†^2`` and
        ``a - a†``; ``pq_sym`` returns ``(a^2 - a†^2)/2``, so that
        ``(pq+qp)/2 = -i * boson_matrix("pq_sym")``.
    n_max : int
        Number of Fock levels, at least 2.
    """
    _check_n(n_max)
    n = np.arange(n_max, dtype=float)
    if kind == "number":
        return np.diag(n)
    if kind == "create2_plus_annih2":
        m = _offdiag2(n_max)
        return m + m.T
    if kind == "i_times_diff":
        m = _offdiag2(n_max)
        return m - m.T
    if kind == "create_plus_annih":
        a = annihilation(n_max)
        return a + a.T
    if kind == "i_times_diff1":
        a = annihilation(n_max)
        return a - a.T
    if kind == "q":
        a = annihilation(n_max)
        return (a + a.T) / np.sqrt(2.0)
    if kind == "q2":
        # q^2 = (a^2 + a†^2 + 2N + 1)/2
        m = _offdiag2(n_max)
        return (m + m.T) / 2.0 + np.diag(n + 0.5)
    if kind == "p2":
        m = _offdiag2(n_max)
        return -(m + m.T) / 2.0 + np.diag(n + 0.5)
    if kind == "pq_sym":
        m = _offdiag2(n_max)
        return (m - m.T) / 2.0
    raise ValueError(f"unknown boson operator kind {kind!r}; expected one of {BOSON_KINDS}")


def spin_matrix(kind: str, alpha: float | None = None, beta: float | None = None) -> np.ndarray:
    """Real 2x2 spin matrices. ``sy_real`` is ``J = -i sigma_y``."""
    if kind == "sx":
        return np.array([[0.0, 1.0], [1.0, 0.0]])
    if kind == "sy_real":
        return np.array([[0.0, -1.0], [1.0, 0.0]])
    if kind == "sz":
        return np.array([[1.0, 0.0], [0.0, -1.0]])
    if kind == "identity":
        return np.eye(2)
    if kind in ("diag", "gamma"):
        if alpha is None or beta is None or alpha <= 0 or beta <= 0:
            raise ValueError(f"spin kind {kind!r} needs alpha, beta > 0, got {alpha}, {beta}")
        if kind == "diag":
            return np.diag([float(alpha), float(beta)])
        return np.diag([1.0 / alpha, 1.0 / beta])
    raise ValueError(f"unknown spin operator kind {kind!r}; expected one of {SPIN_KINDS}")


def kron_assemble(spin: np.ndarray, boson: np.ndarray) -> np.ndarray:
    """``spin ⊗ boson`` in the interleaved ordering (spin index fastest)."""
    spin = np.asarray(spin)
    boson = np.asarray(boson)
    if spin.shape != (2, 2):
        raise ValueError(f"spin factor must be 2x2, got {spin.shape}")
    if boson.ndim != 2 or boson.shape[0] != boson.shape[1]:
        raise ValueError(f"boson factor must be square, got {boson.shape}")
    # interleaved ordering means the boson index is the slow one
    return np.kron(boson, spin)


_UP_SECTORS = (SectorLabel.PLUS1, SectorLabel.PLUS_I, SectorLabel.MINUS1, SectorLabel.MINUS_I)
_DOWN_SECTORS = (SectorLabel.MINUS1, SectorLabel.MINUS_I, SectorLabel.PLUS1, SectorLabel.PLUS_I)


def sector_of(index: BasisIndex) -> SectorLabel:
    """Z4 sector of a basis vector: eigenvalue of ``sigma_z ⊗ i^(a†a)``."""
    table = _UP_SECTORS if index.spin is Spin.UP else _DOWN_SECTORS
    return table[index.level % 4]


def sector_indices(n_max: int) -> dict[SectorLabel, np.ndarray]:
    """Flat indices of each Z4 sector for truncation ``n_max``."""
    out: dict[SectorLabel, list[int]] = {label: [] for label in SectorLabel}
    for flat in range(2 * n_max):
        out[sector_of(basis_index(flat))].append(flat)
    return {label: np.array(idx, dtype=int) for label, idx in out.items()}


def sector_permutation(n_max: int) -> tuple[np.ndarray, list[tuple[SectorLabel, slice]]]:
    """Permutation grouping flat indices by sector, plus the block slices."""
    groups = sector_indices(n_max)
    perm = []
    blocks = []
    start = 0
    for label in SectorLabel:
        idx = groups[label]
        perm.extend(idx.tolist())
        blocks.append((label, slice(start, start + len(idx))))
        start += len(idx)
    return np.array(perm, dtype=int), blocks
