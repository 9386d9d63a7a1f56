"""Hurwitz zeta, spectral zeta functions and their parameter limits.

Only real ``s > 1`` is handled (no analytic continuation).

Closed forms used as limits
---------------------------
* ``rabi2p`` at ``Δ=0``: ``μ_n = √(1−4g²)(⌊n/2⌋+½)``, so
  ``ζ_2p(s) = 2 (1−4g²)^{−s/2} ζ(s; ½)``.
* ``rabi2p`` at ``g=0`` (``0<Δ<½``): ``ζ(s; ½+Δ) + ζ(s; ½−Δ)``.
* ``ncho`` at ``α=β``: ``λ_n = √(α²−1)(⌊n/2⌋+½)``, so
  ``ζ_NH(s) = 2 (α²−1)^{−s/2} ζ(s; ½)``.

The exponent is ``−s/2``; it follows directly from the eigenvalues above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.special import bernoulli

from .errors import ContractError, OutOfRegimeError
from .spectral import ModelSpec, Spectrum, converged_spectrum

__all__ = [
    "ZetaValue",
    "TailModel",
    "hurwitz_zeta",
    "hurwitz_brute_force",
    "spectral_zeta",
    "zeta_of_model",
    "zeta_2p_delta0",
    "zeta_2p_g0",
    "zeta_ncho_equal",
    "LimitRow",
    "LimitReport",
    "rabi_zeta_limit",
    "ncho_zeta_limit",
    "heat_trace",
    "heat_trace_bound",
]

_B2K = bernoulli(40)[2::2]  # B_2, B_4, ..., B_40


@dataclass(frozen=True)
class ZetaValue:
    s: float
    value: float
    method: Literal["hurwitz_closed", "truncated_plus_tail"]
    tail_terms: int
    tail_bound: float
    details: dict = field(default_factory=dict, compare=False)


def _em_tail(s: float, a: float, terms: int) -> tuple[float, float]:
    """Euler–Maclaurin ``Σ_{n≥0} (n+a)^{-s}`` tail from ``a`` on; returns (value, |next term|)."""
    val = a ** (1.0 - s) / (s - 1.0) + 0.5 * a ** (-s)
    rising = s  # s(s+1)...(s+2k-2)
    fact = 2.0  # (2k)!
    power = a ** (-s - 1.0)
    for k in range(1, terms + 1):
        term = _B2K[k - 1] / fact * rising * power
        val += term
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
        power /= a * a
    nxt = abs(_B2K[terms] / fact * rising * power)
    return val, nxt


def hurwitz_zeta(s: float, tau: float, *, rtol: float = 1e-12) -> ZetaValue:
    """``ζ(s; τ) = Σ_{n≥0} (n+τ)^{-s}`` by Euler–Maclaurin with a remainder bound.

    The direct part sums ``N`` terms; the tail uses 12 correction terms at
    ``a = N+τ``. The first omitted term bounds the remainder (the series is
    asymptotic with alternating, eventually growing terms; ``N`` is chosen
    so this term is far past the decreasing regime's bound).
    """
    if not s > 1:
        raise ValueError(f"hurwitz_zeta needs s > 1 (no continuation), got {s}")
    if not tau > 0:
        raise ValueError(f"hurwitz_zeta needs tau > 0, got {tau}")
    s, tau = float(s), float(tau)
    n_direct = max(10, int(math.ceil(2.0 * s)))
    while True:
        a = n_direct + tau
        direct = math.fsum((np.arange(n_direct, dtype=float) + tau) ** (-float(s)))
        tail, bound = _em_tail(s, a, 12)
        value = direct + tail
        if bound <= rtol * abs(value) or n_direct > 10_000:
            return ZetaValue(s, value, "hurwitz_closed", n_direct, bound)
        n_direct *= 2


def hurwitz_brute_force(s: float, tau: float, n_terms: int = 100_000) -> tuple[float, float]:
    """Independent bracket of ``ζ(s; τ)`` from partial sums and integral tail bounds."""
    part = math.fsum((np.arange(n_terms, dtype=float) + tau) ** (-float(s)))
    a = n_terms + tau
    lower = part + a ** (1 - s) / (s - 1)
    upper = part + a ** (-s) + a ** (1 - s) / (s - 1)
    return lower, upper


@dataclass(frozen=True)
class TailModel:
    """Affine model ``μ_n ≈ c n + d`` fitted on the last ``window`` converged levels.

    The tail ``Σ_{n>K} (c n + d)^{-s} = c^{-s} ζ(s; K+1+d/c)`` is evaluated
    with the smallest and the largest intercept seen in the window; the
    value reported is their midpoint and the bound is half their distance.
    """

    window: int = 40

    def fit(self, values: np.ndarray) -> tuple[float, float, float, int]:
        k = len(values)
        w = min(self.window, k) // 2 * 2
        if w < 4:
            raise ValueError("need at least 4 converged levels for the tail fit")
        n = np.arange(k - w, k, dtype=float)
        win = values[k - w:]
        # slope from the means of the two window halves: exact for linear growth
        # modulated by a period-2 pattern (near-degenerate pairs), unlike least squares
        half = w // 2
        c = (win[half:].mean() - win[:half].mean()) / half
        resid = win - c * n
        return float(c), float(resid.min()), float(resid.max()), k


def spectral_zeta(spec: Spectrum, s: float, tail: TailModel = TailModel()) -> ZetaValue:
    """``Σ_{n<K} μ_n^{-s}`` over the converged levels plus the bracketed affine tail."""
    if not s > 1:
        raise ValueError(f"spectral zeta needs s > 1, got {s}")
    if spec.converged_count <= 0:
        raise ContractError("spectrum has no converged levels; use converged_spectrum first")
    vals = spec.values[: spec.converged_count]
    if np.any(vals <= 0):
        raise ValueError(f"spectral zeta needs positive eigenvalues, smallest is {vals.min():g}")
    head = math.fsum(float(v) for v in vals ** (-s))
    c, d_lo, d_hi, k = tail.fit(vals)
    if c <= 0 or k + d_lo / c <= 0:
        raise ContractError("tail fit is not increasing; spectrum window too small")
    t_hi = c ** (-s) * hurwitz_zeta(s, k + d_lo / c).value   # smaller eigenvalues, larger tail
    t_lo = c ** (-s) * hurwitz_zeta(s, k + d_hi / c).value
    value = head + 0.5 * (t_hi + t_lo)
    return ZetaValue(s, value, "truncated_plus_tail", k, 0.5 * (t_hi - t_lo),
                     {"slope": c, "intercepts": (d_lo, d_hi), "tail": (t_lo, t_hi), "n_max": spec.n_max})


def zeta_of_model(model: ModelSpec, s: float, *, levels: int = 300, tol: float = 1e-9,
                  tail: TailModel = TailModel()) -> ZetaValue:
    """Spectral zeta of a bounded model from its lowest ``levels`` converged eigenvalues."""
    spec = converged_spectrum(model, levels, tol, n_start=max(64, 2 * levels))
    return spectral_zeta(spec, s, tail)


def zeta_2p_delta0(s: float, g: float) -> float:
    if not abs(g) < 0.5:
        raise OutOfRegimeError("two-photon Rabi bound: needs |g|<1/2")
    return 2.0 * (1.0 - 4.0 * g * g) ** (-s / 2.0) * hurwitz_zeta(s, 0.5).value


def zeta_2p_g0(s: float, delta: float) -> float:
    if not 0 <= delta < 0.5:
        raise ValueError("closed form at g=0 needs 0 <= delta < 1/2 (positive spectrum)")
    return hurwitz_zeta(s, 0.5 + delta).value + hurwitz_zeta(s, 0.5 - delta).value


def zeta_ncho_equal(s: float, alpha: float) -> float:
    if not alpha > 1:
        raise OutOfRegimeError("NcHO bound: alpha=beta needs alpha > 1")
    return 2.0 * (alpha * alpha - 1.0) ** (-s / 2.0) * hurwitz_zeta(s, 0.5).value


@dataclass
class LimitRow:
    param: float
    value: float
    tail_bound: float
    difference: float
    ground: float


@dataclass
class LimitReport:
    s: float
    limit: float
    rows: list[LimitRow]
    ground_limit: float

    @property
    def differences(self) -> np.ndarray:
        return np.array([r.difference for r in self.rows])

    @property
    def monotone(self) -> bool:
        d = self.differences
        return bool(np.all(np.diff(d) <= 1e-12 + 1e-9 * np.abs(d[:-1])))

    @property
    def final_difference(self) -> float:
        return float(self.rows[-1].difference)


def rabi_zeta_limit(s: float, fixed: float, sequence: Sequence[float], *,
                    vary: Literal["delta", "g"] = "delta", levels: int = 300,
                    tol: float = 1e-9) -> LimitReport:
    """Convergence of ``ζ_2p(s)`` as ``Δ→0`` (fixed ``g``) or ``g→0`` (fixed ``Δ``).

    ``vary="delta"``: ``fixed`` is ``g`` with ``|g|<½``; the limit is
    ``2(1−4g²)^{−s/2}ζ(s;½)``. ``vary="g"``: ``fixed`` is ``Δ`` with
    ``0<Δ<½``; the limit is ``ζ(s;½+Δ)+ζ(s;½−Δ)``. Each row also records
    the ground energy, which tends to ``√(1−4g²)/2`` resp. ``½−Δ``.
    """
    if not s > 1:
        raise ValueError("need s > 1")
    rows = []
    if vary == "delta":
        if not abs(fixed) < 0.5:
            raise OutOfRegimeError("two-photon Rabi bound: |g|>=1/2 is not bounded below with discrete spectrum")
        limit = zeta_2p_delta0(s, fixed)
        ground_limit = 0.5 * math.sqrt(1 - 4 * fixed ** 2)
        models = [ModelSpec("rabi2p", delta=p, g=fixed) for p in sequence]
    elif vary == "g":
        if not 0 < fixed < 0.5:
            raise ValueError("fixed delta must lie in (0, 1/2)")
        limit = zeta_2p_g0(s, fixed)
        ground_limit = 0.5 - fixed
        models = [ModelSpec("rabi2p", delta=fixed, g=p) for p in sequence]
    else:
        raise ValueError(vary)
    for p, m in zip(sequence, models):
        if m.regime != "bounded":
            raise OutOfRegimeError(m.refusal_reason())
        spec = converged_spectrum(m, levels, tol, n_start=max(64, 2 * levels))
        z = spectral_zeta(spec, s)
        rows.append(LimitRow(float(p), z.value, z.tail_bound, abs(z.value - limit), float(spec.values[0])))
    return LimitReport(s, limit, rows, ground_limit)


def ncho_zeta_limit(s: float, alpha: float, beta_sequence: Sequence[float], *, levels: int = 300,
                    tol: float = 1e-9) -> LimitReport:
    """Convergence of ``ζ_NH(s; α, β_k)`` to ``2(α²−1)^{−s/2}ζ(s;½)`` as ``β_k→α``."""
    if not s > 1:
        raise ValueError("need s > 1")
    limit = zeta_ncho_equal(s, alpha)
    rows = []
    for b in beta_sequence:
        m = ModelSpec("ncho", alpha=alpha, beta=b)
        if m.regime != "bounded":
            raise OutOfRegimeError(m.refusal_reason())
        spec = converged_spectrum(m, levels, tol, n_start=max(64, 2 * levels))
        z = spectral_zeta(spec, s)
        rows.append(LimitRow(float(b), z.value, z.tail_bound, abs(z.value - limit), float(spec.values[0])))
    return LimitReport(s, limit, rows, 0.5 * math.sqrt(alpha ** 2 - 1))


def heat_trace(spec: Spectrum, t: float) -> tuple[float, float]:
    """``Tr e^{−tL}`` from converged levels plus an affine-tail bracket; returns (value, bound)."""
    vals = spec.values[: spec.converged_count]
    head = float(np.sum(np.exp(-t * vals)))
    c, d_lo, d_hi, k = TailModel().fit(vals)
    # Σ_{n≥k} e^{-t(cn+d)} = e^{-t(ck+d)}/(1-e^{-tc})
    geo = 1.0 / -math.expm1(-t * c)
    hi = math.exp(-t * (c * k + d_lo)) * geo
    lo = math.exp(-t * (c * k + d_hi)) * geo
    return head + 0.5 * (hi + lo), 0.5 * (hi - lo)


def heat_trace_bound(t: float, s: float, delta: float, g: float) -> float:
    """Envelope ``(s/(et))^s (1+Δ/(μ_g−Δ))^s · 2(1−4g²)^{−s/2} ζ(s;½)`` for ``Tr e^{−tL}``.

    Obtained by summing the one-vector bound ``(φ, e^{−tL}φ) ≤ (s/(et))^s
    (1+Δ/(μ_g−Δ))^s ‖L_{0,g}^{−s/2}φ‖²`` over an eigenbasis of ``L_{0,g}``;
    needs ``μ_g = ½√(1−4g²) > Δ ≥ 0`` and ``s > 1``.
    """
    if not abs(g) < 0.5:
        raise OutOfRegimeError("two-photon Rabi bound: needs |g|<1/2")
    mu = 0.5 * math.sqrt(1 - 4 * g * g)
    if not 0 <= delta < mu:
        raise ValueError(f"envelope needs 0 <= delta < mu_g = {mu:g}")
    if not s > 1:
        raise ValueError("need s > 1")
    return (s / (math.e * t)) ** s * (1 + delta / (mu - delta)) ** s * zeta_2p_delta0(s, g)
