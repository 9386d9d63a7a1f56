"""Truncated Hamiltonians, diagonalisation and truncation escalation.

Families
--------
``rabi2p``        Δσz⊗1 + 1⊗(a†a+½) + gσx⊗(a²+a†²)
``rabi1p``        Δσz⊗1 + 1⊗(a†a+½) + gσx⊗(a+a†)
``ncho``          diag(α,β)⊗(a†a+½) + ½J⊗(a²−a†²),  J = −iσy
``ncho1p``        diag(α,β)⊗(a†a+½) + ½J⊗(a−a†)
``k_alpha_beta``  1⊗(a†a+½) + J⊗(a²−a†²)/(2√(αβ))
``rak``           −Δσx⊗1 + (1−2gσz)⊗b†b + gσz⊗(2x²−1) + ½   (b-ladder basis)
``rakk``          −Δσx⊗1 + 1⊗b†b + √2 g σz⊗x + ½              (b-ladder basis)
``quad_ts``       (p+tq)² + sq²                                  (no spin)

In the b-ladder basis ``h_n = φ_n/γ`` of ``L²(ℝ, dμ)`` the matrix of ``b†b``
is ``diag(n)`` and multiplication by ``x`` has the same matrix elements as
``q`` in the Fock basis, so ``rak`` and ``rakk`` reuse the Fock kinds.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ContractError, ConvergenceError, OutOfRegimeError, UnsupportedError
from .fock import SectorLabel, boson_matrix, sector_indices, spin_matrix

__all__ = [
    "FAMILIES",
    "ModelSpec",
    "TruncatedOperator",
    "Spectrum",
    "TruncationWarning",
    "assemble",
    "sparse_operator",
    "eigen",
    "lowest_eigenpairs",
    "converged_spectrum",
    "closed_form_spectrum",
    "verify_bounds",
    "symmetry_checks",
    "ground_sector",
]

Family = Literal["rabi2p", "rabi1p", "ncho", "ncho1p", "k_alpha_beta", "rak", "rakk", "quad_ts"]
FAMILIES = ("rabi2p", "rabi1p", "ncho", "ncho1p", "k_alpha_beta", "rak", "rakk", "quad_ts")
RABI_FAMILIES = ("rabi2p", "rabi1p", "rak", "rakk")
NCHO_FAMILIES = ("ncho", "ncho1p", "k_alpha_beta")

DEGENERACY_RTOL = 1e-7
N_MAX_CAP = 4096


class TruncationWarning(UserWarning):
    """Truncated eigenvalues of an operator that is not bounded below."""


@dataclass(frozen=True)
class ModelSpec:
    """Which Hamiltonian and its parameters. Unused fields are ignored."""

    family: Family
    delta: float = 0.0
    g: float = 0.0
    alpha: float = 1.0
    beta: float = 1.0
    t_coef: float = 0.0
    s_coef: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family in NCHO_FAMILIES and (self.alpha <= 0 or self.beta <= 0):
            raise ValueError(f"{self.family} needs alpha, beta > 0, got {self.alpha}, {self.beta}")
        for name in ("delta", "g", "alpha", "beta", "t_coef", "s_coef"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def regime(self) -> str:
        """``"bounded"``, ``"critical"`` or ``"unbounded"`` (below)."""
        fam = self.family
        if fam in ("rabi2p", "rak"):
            x = abs(self.g)
            return "bounded" if x < 0.5 else ("critical" if x == 0.5 else "unbounded")
        if fam in ("ncho", "k_alpha_beta"):
            ab = self.alpha * self.beta
            return "bounded" if ab > 1 else ("critical" if ab == 1 else "unbounded")
        if fam == "quad_ts":
            s = self.s_coef
            return "bounded" if s > 0 else ("critical" if s == 0 else "unbounded")
        return "bounded"

    @property
    def bounded_below(self) -> bool:
        return self.regime != "unbounded"

    def refusal_reason(self) -> str | None:
        """Message citing the governing statement when the spectrum is not discrete."""
        regime = self.regime
        if regime == "bounded":
            return None
        fam = self.family
        if fam in ("rabi2p", "rak"):
            if regime == "critical":
                return ("two-photon Rabi bound: |g|=1/2 is critical, spectrum [0,inf) is continuous; "
                        "truncated eigenvalues do not converge")
            return "two-photon Rabi bound: |g|>1/2 unbounded below (inf sigma = -inf); truncated eigenvalues do not converge"
        if fam in ("ncho", "k_alpha_beta"):
            if regime == "critical":
                return ("NcHO bound: alpha*beta=1 is critical, inf sigma = 0 with continuous spectrum; "
                        "truncated eigenvalues do not converge")
            return "NcHO bound: alpha*beta<1 unbounded below (inf sigma = -inf); truncated eigenvalues do not converge"
        if regime == "critical":
            return "quadratic form (p+tq)^2+sq^2: s=0 gives spectrum [0,inf), continuous; truncated eigenvalues do not converge"
        return "quadratic form (p+tq)^2+sq^2: s<0 gives spectrum = R, unbounded below; truncated eigenvalues do not converge"

    @property
    def has_spin(self) -> bool:
        return self.family != "quad_ts"


@dataclass
class TruncatedOperator:
    matrix: np.ndarray
    n_max: int
    model: ModelSpec
    truncation_artifact: bool = False


@dataclass
class Spectrum:
    values: np.ndarray
    n_max: int
    converged_count: int
    convergence_tol: float
    model: ModelSpec | None = None
    vectors: np.ndarray | None = None
    degeneracy_rtol: float = DEGENERACY_RTOL

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(self.values) < 0):
            raise ContractError("spectrum values must be nondecreasing")
        if self.converged_count > len(self.values):
            raise ContractError("converged_count exceeds number of values")

    @property
    def degeneracy_groups(self) -> list[list[int]]:
        """Maximal runs of indices whose consecutive gaps are below the tolerance."""
        groups: list[list[int]] = []
        for i, v in enumerate(self.values):
            if groups and v - self.values[groups[-1][-1]] < self.degeneracy_rtol * max(1.0, abs(v)):
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups

    def multiplicities(self) -> list[int]:
        return [len(grp) for grp in self.degeneracy_groups]


def _boson_sparse(kind: str, n: int) -> sp.csr_matrix:
    # sparse twin of fock.boson_matrix for large truncations
    k = np.arange(n, dtype=float)
    s1 = np.sqrt(k[1:])
    s2 = np.sqrt((k[: n - 2] + 1.0) * (k[: n - 2] + 2.0))
    if kind == "number":
        return sp.diags(k, 0, format="csr")
    if kind == "create2_plus_annih2":
        return sp.diags([s2, s2], [2, -2], shape=(n, n), format="csr")
    if kind == "i_times_diff":
        return sp.diags([s2, -s2], [2, -2], shape=(n, n), format="csr")
    if kind == "create_plus_annih":
        return sp.diags([s1, s1], [1, -1], shape=(n, n), format="csr")
    if kind == "i_times_diff1":
        return sp.diags([s1, -s1], [1, -1], shape=(n, n), format="csr")
    if kind == "q":
        return sp.diags([s1, s1], [1, -1], shape=(n, n), format="csr") / math.sqrt(2.0)
    if kind == "q2":
        return sp.diags([s2 / 2, k + 0.5, s2 / 2], [2, 0, -2], shape=(n, n), format="csr")
    if kind == "p2":
        return sp.diags([-s2 / 2, k + 0.5, -s2 / 2], [2, 0, -2], shape=(n, n), format="csr")
    raise ValueError(kind)


def sparse_operator(model: ModelSpec, n_max: int) -> sp.csr_matrix:
    """Sparse matrix of the truncated Hamiltonian (same entries as :func:`assemble`)."""
    if int(n_max) != n_max or n_max < 4:
        raise ValueError(f"n_max must be an integer >= 4, got {n_max!r}")
    n = int(n_max)
    fam = model.family
    if fam == "quad_ts":
        t, s = model.t_coef, model.s_coef
        mat = _boson_sparse("p2", n) + (t * t + s) * _boson_sparse("q2", n)
        if t != 0.0:
            # (p+tq)^2 cross term t(pq+qp) = -i t (a^2 - a†^2)
            mat = mat.astype(complex) - 1j * t * _boson_sparse("i_times_diff", n)
        return mat.tocsr()

    def kr(spin: np.ndarray, boson: sp.spmatrix) -> sp.csr_matrix:
        return sp.kron(boson, sp.csr_matrix(spin), format="csr")

    sx, sz, J, one = (spin_matrix(k) for k in ("sx", "sz", "sy_real", "identity"))
    eye = sp.identity(n, format="csr")
    num = _boson_sparse("number", n)
    half = num + 0.5 * eye
    if fam == "rabi2p":
        return (model.delta * kr(sz, eye) + kr(one, half)
                + model.g * kr(sx, _boson_sparse("create2_plus_annih2", n))).tocsr()
    if fam == "rabi1p":
        return (model.delta * kr(sz, eye) + kr(one, half)
                + model.g * kr(sx, _boson_sparse("create_plus_annih", n))).tocsr()
    if fam == "ncho":
        d = spin_matrix("diag", model.alpha, model.beta)
        return (kr(d, half) + 0.5 * kr(J, _boson_sparse("i_times_diff", n))).tocsr()
    if fam == "ncho1p":
        d = spin_matrix("diag", model.alpha, model.beta)
        return (kr(d, half) + 0.5 * kr(J, _boson_sparse("i_times_diff1", n))).tocsr()
    if fam == "k_alpha_beta":
        c = 1.0 / (2.0 * math.sqrt(model.alpha * model.beta))
        return (kr(one, half) + c * kr(J, _boson_sparse("i_times_diff", n))).tocsr()
    if fam == "rak":
        g = model.g
        x2 = _boson_sparse("q2", n)
        return (-model.delta * kr(sx, eye) + kr(one - 2 * g * sz, num)
                + g * kr(sz, 2.0 * x2 - eye) + 0.5 * kr(one, eye)).tocsr()
    if fam == "rakk":
        return (-model.delta * kr(sx, eye) + kr(one, num)
                + math.sqrt(2.0) * model.g * kr(sz, _boson_sparse("q", n))
                + 0.5 * kr(one, eye)).tocsr()
    raise ValueError(fam)


def assemble(model: ModelSpec, n_max: int) -> TruncatedOperator:
    """Dense truncated Hamiltonian in the interleaved spin⊗Fock basis.

    Out-of-regime parameters are allowed here, but the result is flagged
    (and a :class:`TruncationWarning` issued) since its eigenvalues are
    truncation artifacts.
    """
    mat = sparse_operator(model, n_max).toarray()
    artifact = model.regime != "bounded"
    if artifact:
        warnings.warn(f"{model.family}: {model.refusal_reason()}", TruncationWarning, stacklevel=2)
    return TruncatedOperator(mat, int(n_max), model, truncation_artifact=artifact)


def _check_hermitian(mat: np.ndarray) -> None:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ContractError(f"matrix must be square, got shape {mat.shape}")
    if np.max(np.abs(mat - mat.conj().T), initial=0.0) != 0.0:
        raise ContractError("eigen() needs an exactly symmetric (Hermitian) matrix")


def eigen(op: TruncatedOperator | np.ndarray, vectors: bool = False, k: int | None = None) -> Spectrum:
    """All (or the lowest ``k``) eigenvalues of a symmetric truncated operator."""
    if isinstance(op, TruncatedOperator):
        mat, n_max, model = op.matrix, op.n_max, op.model
    else:
        mat, n_max, model = np.asarray(op), None, None
    _check_hermitian(mat)
    dim = mat.shape[0]
    subset = None if k is None or k >= dim else (0, k - 1)
    if vectors:
        vals, vecs = scipy.linalg.eigh(mat, subset_by_index=subset)
    else:
        vals, vecs = scipy.linalg.eigh(mat, eigvals_only=True, subset_by_index=subset), None
    return Spectrum(vals, n_max if n_max is not None else dim, 0, float("nan"), model, vecs)


def _bandwidth(mat: sp.spmatrix) -> int:
    coo = mat.tocoo()
    return int(np.max(np.abs(coo.row - coo.col), initial=0))


def lowest_eigenpairs(mat: sp.spmatrix | np.ndarray, k: int, vectors: bool = False):
    """Lowest ``k`` eigenpairs of a banded Hermitian matrix via LAPACK band routines."""
    if not sp.issparse(mat):
        mat = sp.csr_matrix(mat)
    dim = mat.shape[0]
    k = min(k, dim)
    bw = _bandwidth(mat)
    if bw > 32 or dim < 64:
        res = scipy.linalg.eigh(mat.toarray(), eigvals_only=not vectors, subset_by_index=(0, k - 1))
        return res if vectors else (res, None)
    upper = np.zeros((bw + 1, dim), dtype=mat.dtype)
    dia = sp.triu(mat).todia()
    for off, row in zip(dia.offsets, dia.data):
        # dia row j-th entry is column j; band storage row bw-off, same column
        upper[bw - off, off:] = row[off:]
    out = scipy.linalg.eig_banded(upper, lower=False, eigvals_only=not vectors,
                                  select="i", select_range=(0, k - 1))
    return out if vectors else (out, None)


def converged_spectrum(model: ModelSpec, k: int, tol: float = 1e-10, *, n_start: int | None = None,
                       n_cap: int = N_MAX_CAP, vectors: bool = False) -> Spectrum:
    """Lowest ``k`` eigenvalues, doubling ``n_max`` until they settle.

    Starts at ``max(64, 8k)`` (spin families count ``k`` over the doubled
    space) and stops once every one of the first ``k`` eigenvalues moves by
    less than ``tol * max(1, |λ|)`` between successive truncations.

    Raises
    ------
    OutOfRegimeError
        If the operator is not bounded below or sits at a critical coupling.
    ConvergenceError
        If ``n_cap`` is reached first.
    """
    if k < 1 or tol <= 0:
        raise ValueError("need k >= 1 and tol > 0")
    reason = model.refusal_reason()
    if reason is not None:
        raise OutOfRegimeError(reason)
    n = n_start if n_start is not None else max(64, 8 * k)
    prev = None
    history = []
    while True:
        mat = sparse_operator(model, n)
        vals, vecs = lowest_eigenpairs(mat, k, vectors=vectors)
        if prev is not None:
            change = np.abs(vals - prev)
            history.append((n, float(np.max(change / np.maximum(1.0, np.abs(vals))))))
            if np.all(change < tol * np.maximum(1.0, np.abs(vals))):
                return Spectrum(vals, n, k, tol, model, vecs)
        if 2 * n > n_cap:
            raise ConvergenceError(
                f"{model} lowest {k} levels not converged to {tol} by n_max={n}; "
                f"max relative change per doubling: {history}")
        prev = vals
        n *= 2


def closed_form_spectrum(model: ModelSpec, k: int) -> np.ndarray | None:
    """Exact lowest ``k`` eigenvalues where a closed form is known, else ``None``."""
    m = np.arange(k)
    fam = model.family
    pair = (m // 2) + 0.5
    if fam in ("rabi2p", "rak") and model.delta == 0 and abs(model.g) < 0.5:
        return math.sqrt(1 - 4 * model.g ** 2) * pair
    if fam in ("rabi2p", "rak", "rabi1p", "rakk") and model.g == 0:
        d = abs(model.delta)
        levels = np.sort(np.concatenate([np.arange(k) + 0.5 - d, np.arange(k) + 0.5 + d]))
        return levels[:k]
    if fam in ("rabi1p", "rakk") and model.delta == 0:
        return pair - model.g ** 2
    if fam == "k_alpha_beta" and model.alpha * model.beta > 1:
        return math.sqrt(1 - 1 / (model.alpha * model.beta)) * pair
    if fam == "ncho" and model.alpha == model.beta and model.alpha > 1:
        return math.sqrt(model.alpha ** 2 - 1) * pair
    if fam == "ncho1p" and model.alpha == model.beta:
        return model.alpha * pair - 1 / (4 * model.alpha)
    if fam == "quad_ts" and model.s_coef > 0:
        return math.sqrt(model.s_coef) * (2 * m + 1.0)
    return None


def ncho_lambda0_upper_bound(alpha: float, beta: float) -> float:
    """Upper bound on the NcHO ground energy quoted from earlier work."""
    ab = alpha * beta
    denom = alpha + beta + abs(alpha - beta) * (ab - 1) ** 0.25 * math.cos(0.5 * math.atan(1 / math.sqrt(ab - 1)))
    return math.sqrt(ab) * math.sqrt(ab - 1) / denom


def verify_bounds(spec: Spectrum, model: ModelSpec, atol: float = 1e-9) -> dict:
    """Check the eigenvalue enclosures that hold for this family.

    * ``ncho``: ``(n+½)min(α,β)√(1−1/(αβ)) ≤ λ_{2n} ≤ λ_{2n+1} ≤ (n+½)max(α,β)√(1−1/(αβ))``
      and the quoted upper bound on ``λ₀`` (reported, optional).
    * ``rabi2p``/``rak``: ``inf σ ≥ ½√(1−4g²) − Δ``.

    Returns a dict with per-index ``rows`` (bound, value, margin, ok) and ``ok``.
    """
    if model.regime != "bounded":
        raise OutOfRegimeError(model.refusal_reason())
    vals = spec.values[: max(spec.converged_count, 0) or len(spec.values)]
    rows = []
    if model.family == "ncho":
        a, b = model.alpha, model.beta
        root = math.sqrt(1 - 1 / (a * b))
        for n in range(len(vals) // 2):
            lo = (n + 0.5) * min(a, b) * root
            hi = (n + 0.5) * max(a, b) * root
            lam_even, lam_odd = vals[2 * n], vals[2 * n + 1]
            rows.append({"index": 2 * n, "bound": "lower", "limit": lo, "value": lam_even,
                         "margin": lam_even - lo, "ok": lam_even >= lo - atol})
            rows.append({"index": 2 * n + 1, "bound": "upper", "limit": hi, "value": lam_odd,
                         "margin": hi - lam_odd, "ok": lam_odd <= hi + atol})
        upper0 = ncho_lambda0_upper_bound(a, b)
        optional = {"lambda0_upper": upper0, "ok": bool(vals[0] <= upper0 + atol)}
    elif model.family in ("rabi2p", "rak"):
        lo = 0.5 * math.sqrt(1 - 4 * model.g ** 2) - abs(model.delta)
        for i, v in enumerate(vals):
            rows.append({"index": i, "bound": "lower", "limit": lo, "value": v,
                         "margin": v - lo, "ok": v >= lo - atol})
        optional = None
    else:
        raise UnsupportedError(f"no stated eigenvalue bounds for family {model.family!r}")
    return {"rows": rows, "ok": all(r["ok"] for r in rows), "optional": optional}


def _mirror_models(model: ModelSpec) -> list[tuple[str, ModelSpec]]:
    if model.family in RABI_FAMILIES:
        return [("g->-g", replace(model, g=-model.g)), ("delta->-delta", replace(model, delta=-model.delta))]
    if model.family in NCHO_FAMILIES:
        return [("alpha<->beta", replace(model, alpha=model.beta, beta=model.alpha))]
    if model.family == "quad_ts":
        return [("t->-t", replace(model, t_coef=-model.t_coef))]
    return []


def symmetry_checks(model: ModelSpec, n_max: int, k: int) -> dict[str, float]:
    """Max deviation of the lowest ``k`` eigenvalues under each parameter mirror."""
    if model.regime != "bounded":
        raise OutOfRegimeError(model.refusal_reason())
    base, _ = lowest_eigenpairs(sparse_operator(model, n_max), k)
    out = {}
    for name, other in _mirror_models(model):
        vals, _ = lowest_eigenpairs(sparse_operator(other, n_max), k)
        out[name] = float(np.max(np.abs(vals - base)))
    return out


@dataclass
class SectorReport:
    label: SectorLabel | None
    weights: dict[SectorLabel, float]
    degeneracy: int
    ground_energy: float
    n_max: int
    split: list[dict[SectorLabel, float]] = field(default_factory=list)

    @property
    def overlap(self) -> float:
        return self.weights[self.label] if self.label is not None else float("nan")


def ground_sector(model: ModelSpec, n_max: int = 256) -> SectorReport:
    """Z4-sector weights of the ``rabi2p`` ground state.

    For a degenerate ground level (``Δ=0``) the label is ``None`` and
    ``split`` holds the sector weights of each ground eigenvector, chosen
    sector-pure via the block structure.
    """
    if model.family != "rabi2p":
        raise ValueError("ground_sector is defined for the rabi2p family")
    if model.regime != "bounded":
        raise OutOfRegimeError(model.refusal_reason())
    mat = sparse_operator(model, n_max)
    vals, vecs = lowest_eigenpairs(mat, 4, vectors=True)
    groups = sector_indices(n_max)
    tol = DEGENERACY_RTOL * max(1.0, abs(vals[0]))
    deg = int(np.sum(vals - vals[0] < tol))
    if deg == 1:
        v = vecs[:, 0]
        weights = {lab: float(np.sum(v[idx] ** 2)) for lab, idx in groups.items()}
        label = max(weights, key=weights.get)
        return SectorReport(label, weights, 1, float(vals[0]), n_max)
    # degenerate: diagonalise each sector block and collect the ones reaching the ground energy
    dense = mat.toarray()
    split = []
    total = {lab: 0.0 for lab in groups}
    for lab, idx in groups.items():
        block = dense[np.ix_(idx, idx)]
        e0 = scipy.linalg.eigh(block, eigvals_only=True, subset_by_index=(0, 0))[0]
        if abs(e0 - vals[0]) < tol:
            split.append({other: (1.0 if other is lab else 0.0) for other in groups})
            total[lab] += 1.0 / deg
    return SectorReport(None, total, deg, float(vals[0]), n_max, split)
