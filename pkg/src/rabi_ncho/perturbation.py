"""Small-coupling expansions of lowest eigenvalues and concavity checks.

Coefficients are stored as Taylor coefficients, ``E(g) = e0 + e2 g² + e4 g⁴ + …``
(so ``e2 = E''(0)/2!`` and ``e4 = E''''(0)/4!``).

The NcHO expansion is in ``g = (β−α)/2`` at fixed ``A = (α+β)/2``; its
curvature is expressed through the functional

    ξ(u) = π^{-1/2} ⟨e^{-ux²/2}, (1+(1−u)q²) R (1+(1−u)q²) e^{-ux²/2}⟩,

where ``R`` is the reduced resolvent of ``p²+q²−1`` (its kernel, the
oscillator ground state, projected out).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
import scipy.linalg

from .errors import OutOfRegimeError
from .fock import boson_matrix
from .spectral import ModelSpec, converged_spectrum

__all__ = [
    "SeriesCoeffs",
    "XiEvaluation",
    "NumericalConsistencyWarning",
    "coeffs_2p",
    "coeffs_1p",
    "gaussian_coefficients",
    "xi",
    "xi_alternate",
    "ncho_lambda0_series",
    "evaluate_series",
    "ConcavityReport",
    "concavity_check",
    "second_difference",
    "fourth_difference",
    "curvature_at_zero",
    "quartic_at_zero",
    "lowest_eigenvalue",
]


class NumericalConsistencyWarning(UserWarning):
    """The vector fed to the reduced resolvent has a sizeable kernel component."""


@dataclass(frozen=True)
class SeriesCoeffs:
    e0: float
    e2: float
    e4: float | None
    family: Literal["rabi2p", "rabi1p", "ncho"]
    params: ModelSpec


@dataclass(frozen=True)
class XiEvaluation:
    u: float
    value: float
    n_max: int
    A_plus: float | None = None
    A_minus: float | None = None
    kernel_component: float = 0.0


def _check_delta(delta: float) -> None:
    if not (delta >= 0) or not math.isfinite(delta):
        raise ValueError(f"delta must be a finite number >= 0, got {delta}")


def coeffs_2p(delta: float) -> SeriesCoeffs:
    """Expansion of the lowest ``rabi2p`` eigenvalue in ``g`` at fixed ``Δ ≥ 0``."""
    _check_delta(delta)
    r = 1.0 / (1.0 + delta)
    e4 = -0.5 * r * r * (2.0 + 3.0 * delta) * r
    return SeriesCoeffs(0.5 - delta, -r, e4, "rabi2p", ModelSpec("rabi2p", delta=delta))


def coeffs_1p(delta: float) -> SeriesCoeffs:
    """Expansion of the lowest ``rabi1p`` eigenvalue in ``g`` at fixed ``Δ ≥ 0``."""
    _check_delta(delta)
    d = 1.0 + 2.0 * delta
    return SeriesCoeffs(0.5 - delta, -1.0 / d, -2.0 * delta / d ** 3, "rabi1p",
                        ModelSpec("rabi1p", delta=delta))


def evaluate_series(coeffs: SeriesCoeffs, g: float | np.ndarray) -> float | np.ndarray:
    """``e0 + e2 g² (+ e4 g⁴ when known)``."""
    g2 = np.square(g)
    out = coeffs.e0 + coeffs.e2 * g2
    if coeffs.e4 is not None:
        out = out + coeffs.e4 * g2 * g2
    return out


def gaussian_coefficients(u: float, n_max: int) -> np.ndarray:
    """Fock coefficients of the normalised Gaussian ``(u/π)^{1/4} e^{-ux²/2}``.

    Odd levels vanish; even ones follow the squeezed-vacuum recursion
    ``c_{2k+2} = c_{2k} · τ · √((2k+1)/(2k+2))`` with ``τ = (1−u)/(1+u)`` and
    ``c_0 = √2 u^{1/4} / √(1+u)``.
    """
    if not u > 0:
        raise ValueError(f"u must be > 0 for a normalisable Gaussian, got {u}")
    c = np.zeros(n_max)
    tau = (1.0 - u) / (1.0 + u)
    c[0] = math.sqrt(2.0) * u ** 0.25 / math.sqrt(1.0 + u)
    for k in range(0, (n_max - 1) // 2):
        c[2 * k + 2] = c[2 * k] * tau * math.sqrt((2 * k + 1) / (2 * k + 2))
    return c


def _reduced_resolvent_form(v: np.ndarray) -> tuple[float, float]:
    # p²+q²−1 is diag(2n) in the Fock basis
    levels = 2.0 * np.arange(len(v))
    return float(np.sum(v[1:] ** 2 / levels[1:])), float(v[0])


def xi(u: float, n_max: int = 256, *, warn_tol: float = 1e-8,
       A_plus: float | None = None, A_minus: float | None = None) -> XiEvaluation:
    """Evaluate ``ξ(u)`` in the truncated Fock basis.

    The Gaussian is expanded on ``n_max + 2`` levels so that ``q²`` acts
    without truncation loss on the first ``n_max`` coefficients.

    Warns with :class:`NumericalConsistencyWarning` when the ground-level
    component of ``(1+(1−u)q²)e^{-ux²/2}`` exceeds ``warn_tol``: the reduced
    resolvent silently drops it, which is exactly the situation in which the
    second-order formula stops describing the actual eigenvalue curve.
    """
    if not (u >= 0) or not math.isfinite(u):
        raise ValueError(f"u must be >= 0, got {u}")
    if n_max < 16:
        raise ValueError(f"n_max must be >= 16, got {n_max}")
    if u == 0:
        # e^{0} is not normalisable; the quadratic form diverges
        return XiEvaluation(0.0, math.inf, n_max, A_plus, A_minus, math.inf)
    c = gaussian_coefficients(u, n_max + 2)
    v = c + (1.0 - u) * (boson_matrix("q2", n_max + 2) @ c)
    value, ground = _reduced_resolvent_form(v[:n_max])
    # ‖e^{-ux²/2}‖² = √(π/u), so π^{-1/2} turns the normalised form into u^{-1/2}·(...)
    value /= math.sqrt(u)
    ground_scaled = ground / u ** 0.25
    if abs(ground_scaled) > warn_tol:
        warnings.warn(
            f"xi({u}): ground-level component {ground_scaled:.3g} of the resolvent argument is "
            "projected out; the reduced-resolvent value is not a complete second-order term",
            NumericalConsistencyWarning, stacklevel=2)
    return XiEvaluation(float(u), value, n_max, A_plus, A_minus, float(ground_scaled))


def xi_alternate(u: float, n_max: int = 256) -> float:
    """Cross-check of :func:`xi` through the dilated form of the same quadratic form.

    ``π^{-1/2}⟨e^{-x²/2}, (1+(1/u−1)q²)(p²+q²/u²−1/u)^{-1}_red(1+(1/u−1)q²)e^{-x²/2}⟩``,
    with the reduced inverse taken on the orthogonal complement of the
    lowest eigenvector of the truncated ``p²+q²/u²−1/u``. The substitution
    ``x → x/√u`` that links the two forms carries a Jacobian ``u^{-3/2}``,
    which is applied here so the result is directly comparable.
    """
    if not u > 0:
        raise ValueError(f"u must be > 0, got {u}")
    n = n_max + 2
    w = np.zeros(n)
    w[0] = 1.0
    w = w + (1.0 / u - 1.0) * (boson_matrix("q2", n) @ w)
    op = boson_matrix("p2", n) + boson_matrix("q2", n) / u ** 2 - np.eye(n) / u
    vals, vecs = scipy.linalg.eigh(op)
    coeff = vecs.T @ w
    return float(np.sum(coeff[1:] ** 2 / vals[1:])) / u ** 1.5


def ncho_lambda0_series(alpha: float, beta: float, n_max: int = 512) -> SeriesCoeffs:
    """Second-order expansion of the NcHO ground energy in ``g=(β−α)/2`` at ``A=(α+β)/2``.

    ``e0 = ½√(A²−1)`` and ``e2 = −½(ξ(A₊/A₋)/A₋ + ξ(A₋/A₊)/A₊)`` with ``A± = A±1``.
    No fourth-order coefficient is available (``e4`` is ``None``).

    Notes
    -----
    At ``g=0`` the NcHO ground level is doubly degenerate and, numerically,
    splits linearly in ``|g|``; the formula above therefore does not match
    finite-difference curvature of the computed ``λ₀`` (see ``scripts/ncho_curvature_study.py``).
    """
    A = 0.5 * (alpha + beta)
    if not A > 1:
        raise OutOfRegimeError(f"NcHO expansion needs A=(alpha+beta)/2 > 1, got A={A}")
    ap, am = A + 1.0, A - 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalConsistencyWarning)
        x1 = xi(ap / am, n_max, A_plus=ap, A_minus=am).value
        x2 = xi(am / ap, n_max, A_plus=ap, A_minus=am).value
    e2 = -0.5 * (x1 / am + x2 / ap)
    return SeriesCoeffs(0.5 * math.sqrt(A * A - 1.0), e2, None, "ncho",
                        ModelSpec("ncho", alpha=alpha, beta=beta))


def lowest_eigenvalue(model: ModelSpec, tol: float = 1e-13) -> float:
    """Converged ground energy (escalating truncation)."""
    return float(converged_spectrum(model, 1, tol).values[0])


def second_difference(fn: Callable[[float], float], h: float, x0: float = 0.0) -> float:
    return (fn(x0 + h) - 2.0 * fn(x0) + fn(x0 - h)) / (h * h)


def fourth_difference(fn: Callable[[float], float], h: float, x0: float = 0.0) -> float:
    vals = [fn(x0 + j * h) for j in (-2, -1, 0, 1, 2)]
    return (vals[0] - 4 * vals[1] + 6 * vals[2] - 4 * vals[3] + vals[4]) / h ** 4


def curvature_at_zero(fn: Callable[[float], float], h: float = 1e-2, richardson: bool = True) -> float:
    """Estimate ``fn''(0)``; with Richardson, combines steps ``h`` and ``h/2`` (error O(h⁴))."""
    d_h = second_difference(fn, h)
    if not richardson:
        return d_h
    d_half = second_difference(fn, h / 2)
    return (4.0 * d_half - d_h) / 3.0


def quartic_at_zero(fn: Callable[[float], float], h: float = 1e-2, richardson: bool = True) -> float:
    """Estimate ``fn''''(0)`` from fourth differences at ``h`` and ``2h``."""
    d_h = fourth_difference(fn, h)
    if not richardson:
        return d_h
    d_2h = fourth_difference(fn, 2 * h)
    return (4.0 * d_h - d_2h) / 3.0


@dataclass
class ConcavityReport:
    variable: Literal["g", "g2"]
    max_second_difference: float
    violations: list[tuple[float, float]]
    tol: float

    @property
    def concave(self) -> bool:
        return not self.violations


def _divided_second(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # second divided differences on a nonuniform grid, times 2 so a uniform grid gives y''
    d1 = np.diff(y) / np.diff(x)
    return 2.0 * np.diff(d1) / (x[2:] - x[:-2])


def concavity_check(g: Sequence[float], values: Sequence[float], *, variable: Literal["g", "g2"] = "g",
                    tol: float = 1e-9) -> ConcavityReport:
    """Check that sampled ``E`` is concave in ``g`` (or in ``g²``).

    For ``variable="g2"`` only the points with ``g ≥ 0`` are used (``E`` is
    even for the Rabi families), mapped to ``x = g²``.

    ``tol`` is an absolute allowance on the second divided difference.
    """
    g = np.asarray(g, dtype=float)
    y = np.asarray(values, dtype=float)
    if g.shape != y.shape or g.ndim != 1:
        raise ValueError("g and values must be 1-D arrays of equal length")
    order = np.argsort(g)
    g, y = g[order], y[order]
    if variable == "g2":
        keep = g >= 0
        x, y = g[keep] ** 2, y[keep]
    elif variable == "g":
        x = g
    else:
        raise ValueError(variable)
    if len(x) < 3 or (variable == "g" and len(x) < 5):
        raise ValueError("grid too coarse: need at least 5 points (3 on the g >= 0 side for g2)")
    d2 = _divided_second(x, y)
    viol = [(float(x[i + 1]), float(d)) for i, d in enumerate(d2) if d > tol]
    return ConcavityReport(variable, float(np.max(d2)), viol, tol)
