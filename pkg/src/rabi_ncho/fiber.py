"""NcHO as a λ-indexed family of Rabi fibers.

For ``αβ > 1`` the NcHO ``Q`` and the two-photon Rabi operator ``H(λ)`` with

    Δ(λ) = (α−β)λ / (2αβ),    g = 1 / (2√(αβ))

are linked by ``Q − λ = I*(H(λ) − sλ)I`` with ``s = (α+β)/(2αβ)`` and the
intertwiner ``I = c ⊗ U``, ``c = diag(√α, √β)·diag(e^{iπ/4}, e^{-iπ/4})``,
``U = e^{-i(π/4)a†a}``. Hence ``λ ∈ σ(Q)`` iff ``sλ ∈ σ(H(λ))``, with equal
multiplicities, and ``I`` is unitary from the plain space onto the space
weighted by ``γ = diag(1/α, 1/β)``. The one-photon pair (``ncho1p``,
``rabi1p``) works the same way with ``U`` replaced by ``e^{-i(π/2)a†a}`` and
needs only ``α, β > 0``.

In the truncated Fock basis the identity above holds exactly at matched
truncation (both sides diagonal in the level index up to the same band),
which is what the checks here rely on. This is the only module that
materialises complex phases.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import OutOfRegimeError
from .spectral import DEGENERACY_RTOL, ModelSpec, converged_spectrum, lowest_eigenpairs, sparse_operator

__all__ = [
    "FiberSpec",
    "WeightedSpace",
    "FiberLevel",
    "FiberReport",
    "CoverageWarning",
    "fiber_model",
    "intertwiner",
    "verify_fiber",
    "reconstruct_ncho_spectrum",
    "weighted_gram_check",
]

FiberFamily = Literal["fiber2p", "fiber1p"]


class CoverageWarning(UserWarning):
    """A fiber branch changes sign in the window but could not be bracketed."""


def _check_regime(alpha: float, beta: float, family: FiberFamily) -> None:
    if alpha <= 0 or beta <= 0:
        raise ValueError(f"alpha, beta must be > 0, got {alpha}, {beta}")
    if family == "fiber2p" and alpha * beta <= 1:
        raise OutOfRegimeError(
            f"NcHO bound: alpha*beta={alpha * beta:g} <= 1, so the fiber coupling "
            "1/(2 sqrt(alpha beta)) >= 1/2 leaves the bounded regime")
    if family not in ("fiber2p", "fiber1p"):
        raise ValueError(f"unknown fiber family {family!r}")


@dataclass(frozen=True)
class FiberSpec:
    alpha: float
    beta: float
    lam: float
    family: FiberFamily = "fiber2p"

    @property
    def induced_delta(self) -> float:
        return (self.alpha - self.beta) * self.lam / (2.0 * self.alpha * self.beta)

    @property
    def induced_g(self) -> float:
        return 1.0 / (2.0 * math.sqrt(self.alpha * self.beta))

    @property
    def scale(self) -> float:
        """``2αβ/(α+β)``: ``I Q I⁻¹`` is this multiple of the fiber sum."""
        return 2.0 * self.alpha * self.beta / (self.alpha + self.beta)

    @property
    def scaled_lambda(self) -> float:
        return self.lam / self.scale


@dataclass(frozen=True)
class WeightedSpace:
    """``L²(ℝ; ℂ²)`` with inner product ``(f, γ g)``, ``γ = diag(1/α, 1/β)``."""

    alpha: float
    beta: float

    @property
    def weight(self) -> np.ndarray:
        return np.diag([1.0 / self.alpha, 1.0 / self.beta])

    def gram(self, vecs: np.ndarray) -> np.ndarray:
        """Weighted Gram matrix of interleaved coefficient vectors (columns)."""
        n = vecs.shape[0] // 2
        w = np.tile([1.0 / self.alpha, 1.0 / self.beta], n)
        return vecs.conj().T @ (w[:, None] * vecs)

    def norm2(self, vec: np.ndarray) -> float:
        return float(np.real(self.gram(vec[:, None])[0, 0]))


def fiber_model(alpha: float, beta: float, lam: float, family: FiberFamily = "fiber2p") -> ModelSpec:
    """Rabi model whose spectrum contains ``sλ`` exactly when ``λ`` is an NcHO eigenvalue."""
    _check_regime(alpha, beta, family)
    spec = FiberSpec(alpha, beta, lam, family)
    fam = "rabi2p" if family == "fiber2p" else "rabi1p"
    return ModelSpec(fam, delta=spec.induced_delta, g=spec.induced_g)


def intertwiner(alpha: float, beta: float, n_max: int, family: FiberFamily = "fiber2p") -> np.ndarray:
    """Matrix of ``I = c ⊗ U`` on the interleaved truncated basis (complex)."""
    quarter = 0.25 if family == "fiber2p" else 0.5
    phases = np.exp(-1j * math.pi * quarter * np.arange(n_max))
    c = np.diag([math.sqrt(alpha), math.sqrt(beta)]) @ np.diag([np.exp(1j * math.pi / 4),
                                                                np.exp(-1j * math.pi / 4)])
    return np.kron(np.diag(phases), c)


def _ncho_model(alpha: float, beta: float, family: FiberFamily) -> ModelSpec:
    return ModelSpec("ncho" if family == "fiber2p" else "ncho1p", alpha=alpha, beta=beta)


def _multiplicity(values: np.ndarray, target: float, rtol: float) -> int:
    return int(np.sum(np.abs(values - target) < rtol * max(1.0, abs(target))))


@dataclass
class FiberLevel:
    index: int
    lam: float
    scaled: float
    distance: float
    multiplicity_ncho: int
    multiplicity_fiber: int
    eigvec_residual: float
    passed: bool


@dataclass
class FiberReport:
    alpha: float
    beta: float
    family: FiberFamily
    n_max: int
    tol: float
    levels: list[FiberLevel] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.levels) and all(lv.passed for lv in self.levels)

    @property
    def max_distance(self) -> float:
        return max(lv.distance for lv in self.levels)


def verify_fiber(alpha: float, beta: float, k_max: int = 8, tol: float = 1e-6, *,
                 family: FiberFamily = "fiber2p", n_max: int | None = None,
                 conv_tol: float = 1e-11, degeneracy_rtol: float = DEGENERACY_RTOL) -> FiberReport:
    """Check ``sλ_n ∈ σ(H(λ_n))`` with matching multiplicity for the lowest ``k_max`` levels.

    Both operators are truncated at the same ``n_max`` (by default the level
    at which the NcHO eigenvalues converged to ``conv_tol``). Since the
    branch functions ``μ_j(H(λ)) − sλ`` are strictly decreasing and their
    roots are ordered in ``j``, ``λ_n`` pairs with the fiber's ``n``-th level;
    the reported distance is nevertheless to the whole computed fiber
    spectrum.
    """
    _check_regime(alpha, beta, family)
    ncho = _ncho_model(alpha, beta, family)
    if n_max is None:
        n_max = converged_spectrum(ncho, k_max + 2, conv_tol).n_max
    vals, vecs = lowest_eigenpairs(sparse_operator(ncho, n_max), k_max + 2, vectors=True)
    I = intertwiner(alpha, beta, n_max, family)
    report = FiberReport(alpha, beta, family, n_max, tol)
    for n in range(k_max):
        lam = float(vals[n])
        spec = FiberSpec(alpha, beta, lam, family)
        fiber = sparse_operator(fiber_model(alpha, beta, lam, family), n_max)
        mu, _ = lowest_eigenpairs(fiber, k_max + 4)
        target = spec.scaled_lambda
        dist = float(np.min(np.abs(mu - target)))
        m_q = _multiplicity(vals, lam, degeneracy_rtol)
        m_h = _multiplicity(mu, target, degeneracy_rtol)
        w = I @ vecs[:, n]
        resid = float(np.linalg.norm(fiber @ w - target * w) / np.linalg.norm(w))
        report.levels.append(FiberLevel(n, lam, target, dist, m_q, m_h, resid,
                                        dist < tol and m_q == m_h))
    return report


def _scan_step(alpha: float, beta: float, family: FiberFamily) -> float:
    # NcHO level spacing is at least about min(α,β)·√(1−1/(αβ)) per pair; halve it twice
    if family == "fiber2p":
        return 0.25 * min(alpha, beta) * math.sqrt(1.0 - 1.0 / (alpha * beta))
    return 0.25 * min(alpha, beta)


def reconstruct_ncho_spectrum(alpha: float, beta: float, lambda_window: tuple[float, float],
                              tol: float = 1e-10, *, family: FiberFamily = "fiber2p",
                              n_max: int = 256, step: float | None = None) -> np.ndarray:
    """NcHO eigenvalues in a window, found from the fiber condition alone.

    Scans ``h_j(λ) = μ_j(H(λ)) − sλ`` on a grid, brackets each sign change and
    refines it with Brent's method. Each branch contributes one root, so
    degenerate NcHO levels appear with their multiplicity. Branches whose
    sign changes across the window but could not be bracketed on the grid
    trigger a :class:`CoverageWarning`.
    """
    _check_regime(alpha, beta, family)
    lo, hi = map(float, lambda_window)
    if not hi > lo:
        raise ValueError(f"empty window {lambda_window}")
    h = step if step is not None else _scan_step(alpha, beta, family)
    grid = np.linspace(lo, hi, max(2, int(math.ceil((hi - lo) / h)) + 1))
    s = (alpha + beta) / (2.0 * alpha * beta)
    k = max(8, int(math.ceil(2.0 * hi / _scan_step(alpha, beta, family))) + 4)
    k = min(k, 2 * n_max)

    def branch_values(lam: float) -> np.ndarray:
        mu, _ = lowest_eigenpairs(sparse_operator(fiber_model(alpha, beta, lam, family), n_max), k)
        return mu - s * lam

    table = np.array([branch_values(x) for x in grid])  # (grid, branch)
    roots: list[float] = []
    missing = []
    for j in range(k):
        col = table[:, j]
        if col[0] == 0.0:
            roots.append(grid[0])
            continue
        changes = np.nonzero(np.sign(col[:-1]) * np.sign(col[1:]) <= 0)[0]
        if len(changes) == 0:
            if np.sign(col[0]) != np.sign(col[-1]):
                missing.append(j)
            continue
        i = changes[0]
        root = scipy.optimize.brentq(lambda x: branch_values(x)[j], grid[i], grid[i + 1],
                                     xtol=tol, rtol=4 * np.finfo(float).eps)
        roots.append(root)
    if table[-1, -1] <= 0.0 and k == 2 * n_max:
        missing.append(k)
    if missing:
        warnings.warn(f"branches {missing} change sign in {lambda_window} but were not bracketed; "
                      "reduce the scan step or raise n_max", CoverageWarning, stacklevel=2)
    return np.sort(np.array(roots, dtype=float))


@dataclass
class GramReport:
    n_max: int
    max_gram_deviation: float
    max_cross_level_overlap: float
    max_norm_error: float
    lambdas: np.ndarray


def weighted_gram_check(alpha: float, beta: float, k_max: int = 6, *, family: FiberFamily = "fiber2p",
                        n_max: int = 128) -> GramReport:
    """Verify ``(If, Ig)_γ = (f, g)`` on NcHO eigenvectors and γ-orthogonality across levels."""
    _check_regime(alpha, beta, family)
    vals, vecs = lowest_eigenpairs(sparse_operator(_ncho_model(alpha, beta, family), n_max), k_max,
                                   vectors=True)
    images = intertwiner(alpha, beta, n_max, family) @ vecs
    space = WeightedSpace(alpha, beta)
    gw = space.gram(images)
    g0 = vecs.T @ vecs
    distinct = np.abs(vals[:, None] - vals[None, :]) >= DEGENERACY_RTOL * np.maximum(1.0, np.abs(vals))[:, None]
    cross = float(np.max(np.abs(gw[distinct]), initial=0.0))
    norms = np.real(np.diag(gw)) - np.diag(g0)
    return GramReport(n_max, float(np.max(np.abs(gw - g0))), cross, float(np.max(np.abs(norms))), vals)


def ncho_eigenspaces(alpha: float, beta: float, n_max: int, k_max: int,
                     family: FiberFamily = "fiber2p") -> list[tuple[float, np.ndarray]]:
    """Lowest NcHO levels as ``(λ, orthonormal basis of the eigenspace)``, grouped by degeneracy."""
    mat = sparse_operator(_ncho_model(alpha, beta, family), n_max).toarray()
    vals, vecs = scipy.linalg.eigh(mat, subset_by_index=(0, min(k_max, mat.shape[0]) - 1))
    out: list[tuple[float, np.ndarray]] = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[start] >= DEGENERACY_RTOL * max(1.0, abs(vals[i])):
            out.append((float(np.mean(vals[start:i])), vecs[:, start:i]))
            start = i
    return out
