"""Monte Carlo semigroup matrix elements via Feynman–Kac path integrals.

Setting
-------
Work in ``L²(ℝ×ℤ₂, dμ⊗counting)`` with ``dμ = γ² dx`` the Gaussian
``N(0, ½)``; the basis is ``h_n(x) ⊗ e_σ`` with ``h_n = φ_n/γ`` the
normalised Hermite polynomials, so spectral and Monte Carlo sides share
coefficient vectors (interleaved, ``flat = 2n + (0 if σ=+1 else 1)``).

Two-photon model (``rak`` form)::

    L = −Δσx + (1−2gσz)⊗b†b + gσz⊗(2x²−1) + ½

    (f, e^{−tL} h) = 2 e^{Δt − t/2} E[ f̄(X₀, T₀) h(X_{A(t)}, T_t) e^{−g∫₀ᵗ (2X²_{A(s)} − 1) T_s ds} ]

with ``X`` a stationary OU process (generator ``−b†b``), ``T_s = σ₀(−1)^{N_{Δs}}``
a spin flipped by a unit-rate Poisson process run at speed ``Δ``, ``σ₀``
uniform on ``{±1}``, and the spin-dependent clock
``A(s) = ∫₀ˢ (1 − 2gT_u) du``. While the spin is frozen the OU part runs
at speed ``1 − 2gσ``, which is why the clock is integrated; between spin
flips this coincides with ``s(1 − 2gT_s)`` only when no flip has happened.
The pointwise variant is available as ``clock="pointwise"`` for comparison.

One-photon model (``rakk`` form): ``L̃ = −Δσx + b†b + √2 gσz x + ½``, with
potential ``√2 T_s X_s`` and no time change.

Sampling is exact: jump times are drawn first, every time the OU path is
needed (quadrature nodes and the endpoint) is computed, and the path is
sampled sequentially at those times from the Gaussian transition kernel.
The only discretisation is Gauss–Legendre quadrature of ``∫V`` on each
inter-jump interval (long intervals are split into panels).
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
import scipy.linalg

from .errors import ContractError, OutOfRegimeError, StatisticalFailure
from .fiber import FiberSpec, intertwiner, ncho_eigenspaces
from .spectral import ModelSpec, sparse_operator

__all__ = [
    "PathSample",
    "MCEstimate",
    "TestVector",
    "FKConfig",
    "hermite_functions",
    "rak_frame",
    "sample_path",
    "fk_weights",
    "fk_matrix_element",
    "fk_ground_energy",
    "positivity_scan",
    "PositivityReport",
    "fk_ncho_matrix_element",
    "spectral_matrix_element",
    "rak_ground_vector",
]

Clock = Literal["integrated", "pointwise"]
CHUNK_SIZE = 20_000


# --------------------------------------------------------------------------- vectors


def hermite_functions(x: np.ndarray, n: int) -> np.ndarray:
    """``h_0..h_{n-1}`` at ``x``: orthonormal in ``L²(N(0,½))``. Shape ``(n,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n,) + x.shape)
    out[0] = 1.0
    if n > 1:
        out[1] = math.sqrt(2.0) * x
    for k in range(1, n - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


@dataclass(frozen=True)
class TestVector:
    """A function of ``(x, σ)``, either as b-ladder coefficients or a callable.

    ``coeffs`` are interleaved (``flat = 2n + spin``, spin 0 ↔ σ=+1). A
    callable must accept arrays ``x`` (float) and ``sigma`` (±1 ints) and
    return values of the same shape.
    """

    __test__ = False  # not a pytest class

    coeffs: np.ndarray | None = None
    func: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    label: str = ""

    def __post_init__(self):
        if (self.coeffs is None) == (self.func is None):
            raise ValueError("give exactly one of coeffs or func")
        if self.coeffs is not None:
            c = np.asarray(self.coeffs)
            if c.ndim != 1 or len(c) % 2 or not np.all(np.isfinite(c)):
                raise ValueError("coeffs must be a finite 1-D array of even length")
            object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: float = 1.0, spins: Sequence[int] = (1, -1)) -> "TestVector":
        c = np.zeros(2)
        for s in spins:
            c[0 if s == 1 else 1] = value
        return cls(coeffs=c, label=f"const{value:g}{list(spins)}")

    @classmethod
    def basis(cls, level: int, sigma: int, n_max: int | None = None) -> "TestVector":
        c = np.zeros(2 * max(level + 1, n_max or 0))
        c[2 * level + (0 if sigma == 1 else 1)] = 1.0
        return cls(coeffs=c, label=f"h{level}(sigma={sigma:+d})")

    @property
    def is_complex(self) -> bool:
        return self.coeffs is not None and np.iscomplexobj(self.coeffs)

    def norm2(self) -> float:
        if self.coeffs is None:
            raise ContractError("norm of a callable test vector is not available; use coefficients")
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def padded(self, n_max: int) -> np.ndarray:
        if self.coeffs is None:
            raise ContractError("callable test vectors have no coefficient representation")
        c = self.coeffs
        if len(c) > 2 * n_max:
            if np.any(c[2 * n_max:] != 0):
                raise ContractError(f"test vector needs more than n_max={n_max} levels")
            return c[: 2 * n_max]
        return np.concatenate([c, np.zeros(2 * n_max - len(c), dtype=c.dtype)])

    def __call__(self, x: np.ndarray, sigma: np.ndarray) -> np.ndarray:
        if self.func is not None:
            return np.asarray(self.func(x, sigma))
        c = self.coeffs
        n = len(c) // 2
        last = np.nonzero(c)[0]
        n = (int(last[-1]) // 2 + 1) if len(last) else 1
        h = hermite_functions(x, n)
        up = np.tensordot(c[0:2 * n:2], h, axes=1)
        down = np.tensordot(c[1:2 * n:2], h, axes=1)
        return np.where(np.asarray(sigma) == 1, up, down)


def rak_frame(n_max: int) -> np.ndarray:
    """Orthogonal map taking Fock-side ``rabi2p`` coefficients to the ``rak`` frame.

    ``kron(1, r)`` with ``r = [[1, 1], [−1, 1]]/√2``; the boson factor is the
    identity on coefficients because the b-ladder basis is the image of the
    Fock basis under division by the ground state.
    """
    r = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)
    return np.kron(np.eye(n_max), r)


# --------------------------------------------------------------------------- paths


@dataclass
class PathSample:
    """One path: initial point, spin flips and the OU values the estimator uses.

    ``jump_times`` are in the Poisson clock (``[0, Δt]``, unit rate);
    ``eval_times`` are OU-clock times (sorted) with ``ou_values`` sampled
    there. ``node_*`` arrays describe the quadrature of ``∫V`` in real time.
    """

    x0: float
    sigma0: int
    jump_times: np.ndarray
    eval_times: np.ndarray
    ou_values: np.ndarray
    t: float
    delta: float
    node_times: np.ndarray
    node_weights: np.ndarray
    node_spins: np.ndarray
    node_values: np.ndarray
    final_value: float
    final_spin: int
    final_clock: float

    def spin_at(self, s: float) -> int:
        """``T_s = σ₀ (−1)^{#{jumps ≤ Δs}}``."""
        return int(self.sigma0 * (-1) ** int(np.sum(self.jump_times <= self.delta * s)))


@dataclass(frozen=True)
class FKConfig:
    quad_nodes: int = 16
    panel: float = 0.5
    clock: Clock = "integrated"
    chunk_size: int = CHUNK_SIZE
    workers: int = 1


def _model_kind(model: ModelSpec) -> str:
    if model.family in ("rabi2p", "rak"):
        if not abs(model.g) < 0.5:
            raise OutOfRegimeError(
                "two-photon Rabi bound: the path-integral formula needs |g|<1/2 "
                f"(got g={model.g})")
        kind = "v2p"
    elif model.family in ("rabi1p", "rakk"):
        kind = "v1p"
    else:
        raise ValueError(f"no Feynman-Kac representation for family {model.family!r}")
    if model.delta < 0:
        raise ValueError(f"Feynman-Kac sampling needs delta >= 0 (a jump rate), got {model.delta}")
    return kind


@dataclass
class _Batch:
    x0: np.ndarray
    sigma0: np.ndarray
    counts: np.ndarray
    jumps: np.ndarray          # real time, padded with t
    node_times: np.ndarray     # (m, P)
    node_weights: np.ndarray
    node_spins: np.ndarray
    node_clock: np.ndarray
    node_x: np.ndarray
    final_clock: np.ndarray
    final_spin: np.ndarray
    final_x: np.ndarray
    eval_sorted: np.ndarray
    x_sorted: np.ndarray


def _sample_batch(kind: str, delta: float, g: float, t: float, m: int, rng: np.random.Generator,
                  cfg: FKConfig) -> _Batch:
    x0 = rng.normal(0.0, math.sqrt(0.5), m)
    sigma0 = 1 - 2 * rng.integers(0, 2, m)
    counts = rng.poisson(delta * t, m) if delta > 0 else np.zeros(m, dtype=int)
    kmax = int(counts.max(initial=0))
    u = rng.random((m, kmax))
    jumps = np.sort(np.where(np.arange(kmax)[None, :] < counts[:, None], u * t, t), axis=1)

    n_panels = max(1, int(math.ceil(t / cfg.panel)))
    grid = np.linspace(0.0, t, n_panels + 1)
    pts = np.concatenate([np.broadcast_to(grid, (m, n_panels + 1)), jumps], axis=1)
    is_jump = np.concatenate([np.zeros((m, n_panels + 1), dtype=int),
                              (np.arange(kmax)[None, :] < counts[:, None]).astype(int)], axis=1)
    order = np.argsort(pts, axis=1, kind="stable")
    pts = np.take_along_axis(pts, order, axis=1)
    is_jump = np.take_along_axis(is_jump, order, axis=1)
    left, right = pts[:, :-1], pts[:, 1:]
    flips = np.cumsum(is_jump, axis=1)[:, :-1]
    spins = sigma0[:, None] * (1 - 2 * (flips % 2))
    final_spin = sigma0 * (1 - 2 * (counts % 2))

    if kind == "v2p":
        rate = 1.0 - 2.0 * g * spins
    else:
        rate = np.ones_like(left)
    clock_left = np.concatenate([np.zeros((m, 1)), np.cumsum(rate * (right - left), axis=1)[:, :-1]], axis=1)

    xi, wi = np.polynomial.legendre.leggauss(cfg.quad_nodes)
    half = 0.5 * (right - left)
    node_t = (left + half)[:, :, None] + half[:, :, None] * xi[None, None, :]
    node_w = half[:, :, None] * wi[None, None, :]
    node_s = np.broadcast_to(spins[:, :, None], node_t.shape)
    if cfg.clock == "integrated":
        node_c = clock_left[:, :, None] + rate[:, :, None] * (node_t - left[:, :, None])
        final_c = clock_left[:, -1] + rate[:, -1] * (right[:, -1] - left[:, -1])
    elif cfg.clock == "pointwise":
        node_c = node_t * (1.0 - 2.0 * g * node_s) if kind == "v2p" else node_t
        final_c = t * (1.0 - 2.0 * g * final_spin) if kind == "v2p" else np.full(m, t)
    else:
        raise ValueError(f"unknown clock {cfg.clock!r}")
    node_t, node_w, node_s, node_c = (a.reshape(m, -1) for a in (node_t, node_w, node_s, node_c))

    times = np.concatenate([node_c, final_c[:, None]], axis=1)
    t_order = np.argsort(times, axis=1, kind="stable")
    t_sorted = np.take_along_axis(times, t_order, axis=1)
    if np.any(t_sorted[:, 0] < -1e-12):
        raise ContractError("negative OU clock time; quadrature/jump bookkeeping is inconsistent")
    z = rng.standard_normal(t_sorted.shape)
    x_sorted = np.empty_like(t_sorted)
    x_prev = x0
    c_prev = np.zeros(m)
    for col in range(t_sorted.shape[1]):
        dt = np.maximum(t_sorted[:, col] - c_prev, 0.0)
        decay = np.exp(-dt)
        x_prev = decay * x_prev + np.sqrt(0.5 * -np.expm1(-2.0 * dt)) * z[:, col]
        x_sorted[:, col] = x_prev
        c_prev = t_sorted[:, col]
    x_all = np.empty_like(x_sorted)
    np.put_along_axis(x_all, t_order, x_sorted, axis=1)
    return _Batch(x0, sigma0, counts, jumps, node_t, node_w, node_s, node_c, x_all[:, :-1],
                  final_c, final_spin, x_all[:, -1], t_sorted, x_sorted)


def sample_path(model: ModelSpec, t: float, quad_nodes_per_interval: int = 16,
                rng: np.random.Generator | int | None = None, *, clock: Clock = "integrated",
                panel: float = 0.5) -> PathSample:
    """Draw a single path with every OU value the estimator would need."""
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t}")
    kind = _model_kind(model)
    rng = np.random.default_rng(rng)
    cfg = FKConfig(quad_nodes=quad_nodes_per_interval, panel=panel, clock=clock)
    b = _sample_batch(kind, model.delta, model.g, t, 1, rng, cfg)
    jumps = b.jumps[0, : b.counts[0]] * model.delta
    return PathSample(float(b.x0[0]), int(b.sigma0[0]), jumps, b.eval_sorted[0], b.x_sorted[0], t,
                      model.delta, b.node_times[0], b.node_weights[0], b.node_spins[0], b.node_x[0],
                      float(b.final_x[0]), int(b.final_spin[0]), float(b.final_clock[0]))


def _potential_integral(kind: str, b: _Batch) -> np.ndarray:
    if kind == "v2p":
        v = (2.0 * b.node_x ** 2 - 1.0) * b.node_spins
    else:
        v = math.sqrt(2.0) * b.node_spins * b.node_x
    return np.sum(b.node_weights * v, axis=1)


def fk_weights(model: ModelSpec, f: TestVector, h: TestVector, t: float, m: int,
               rng: np.random.Generator, cfg: FKConfig = FKConfig()) -> np.ndarray:
    """Per-path estimator values whose mean is ``(f, e^{−tL} h)``."""
    kind = _model_kind(model)
    b = _sample_batch(kind, model.delta, model.g, t, m, rng, cfg)
    integral = _potential_integral(kind, b)
    # σ₀ uniform carries the ½Σ_σ; the 2 restores counting measure on ℤ₂
    pref = 2.0 * math.exp(model.delta * t - 0.5 * t)
    fv = f(b.x0, b.sigma0)
    hv = h(b.final_x, b.final_spin)
    return pref * np.conj(fv) * hv * np.exp(-model.g * integral)


# --------------------------------------------------------------------------- estimates


@dataclass(frozen=True)
class MCEstimate:
    mean: float | complex
    std_error: float
    n_samples: int
    seed: int
    integrand_spec: str = ""

    @property
    def real(self) -> float:
        return float(np.real(self.mean))

    def z_score(self, target: float | complex) -> float:
        diff = abs(self.mean - target)
        if self.std_error == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / self.std_error


def _chunk_stats(args) -> tuple[int, complex, float]:
    model, f, h, t, m, seed, key, cfg = args
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
    w = fk_weights(model, f, h, t, m, rng, cfg)
    mean = w.mean()
    return m, complex(mean), float(np.sum(np.abs(w - mean) ** 2))


def _merge(stats: list[tuple[int, complex, float]]) -> tuple[int, complex, float]:
    # Chan et al. pairwise update, applied in chunk order so the result is worker-independent
    n, mean, m2 = 0, 0j, 0.0
    for nb, mb, m2b in stats:
        tot = n + nb
        d = mb - mean
        mean = mean + d * nb / tot
        m2 = m2 + m2b + abs(d) ** 2 * n * nb / tot
        n = tot
    return n, mean, m2


def _run_chunks(model, f, h, t, n_samples, seed, cfg, key_prefix=()) -> tuple[int, complex, float]:
    sizes = [cfg.chunk_size] * (n_samples // cfg.chunk_size)
    if n_samples % cfg.chunk_size:
        sizes.append(n_samples % cfg.chunk_size)
    jobs = [(model, f, h, t, m, seed, key_prefix + (i,), cfg) for i, m in enumerate(sizes)]
    if cfg.workers > 1 and len(jobs) > 1 and f.func is None and h.func is None:
        with ProcessPoolExecutor(cfg.workers) as pool:
            stats = list(pool.map(_chunk_stats, jobs))
    else:
        stats = [_chunk_stats(j) for j in jobs]
    return _merge(stats)


def _seed_of(rng) -> int:
    if rng is None:
        return int(np.random.SeedSequence().entropy % (1 << 63))
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(0, 1 << 63))
    raise TypeError("rng must be an int seed, a numpy Generator or None")


def fk_matrix_element(model: ModelSpec, f: TestVector, g_vec: TestVector, t: float,
                      n_samples: int = 100_000, rng: int | np.random.Generator | None = 0, *,
                      config: FKConfig = FKConfig()) -> MCEstimate:
    """Estimate ``(f, e^{−tL} g_vec)`` for the ``rak`` (or ``rakk``) form.

    ``model`` may name ``rabi2p``/``rak`` or ``rabi1p``/``rakk``; the vectors
    are always read in the b-ladder frame of the ``rak``/``rakk`` operator
    (map Fock-side ``rabi2p`` vectors with :func:`rak_frame` first).

    Results are a deterministic function of ``(seed, n_samples,
    config.chunk_size)``; the worker count does not affect them.
    """
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t}")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    _model_kind(model)
    seed = _seed_of(rng)
    n, mean, m2 = _run_chunks(model, f, g_vec, t, n_samples, seed, config)
    se = math.sqrt(m2 / (n - 1) / n)
    if not (f.is_complex or g_vec.is_complex or f.func is not None or g_vec.func is not None):
        mean = mean.real
    elif abs(mean.imag) == 0:
        mean = mean.real
    spec = (f"{model.family}(delta={model.delta:g}, g={model.g:g}) <{f.label or 'f'}|e^(-tL)|"
            f"{g_vec.label or 'g'}> t={t:g} nodes={config.quad_nodes} panel={config.panel:g} "
            f"clock={config.clock}")
    return MCEstimate(mean, se, n, seed, spec)


# --------------------------------------------------------------------------- spectral side


def _fk_operator(model: ModelSpec, n_max: int) -> np.ndarray:
    fam = "rak" if model.family in ("rabi2p", "rak") else "rakk"
    return sparse_operator(ModelSpec(fam, delta=model.delta, g=model.g), n_max).toarray()


def spectral_matrix_element(model: ModelSpec, f: TestVector, g_vec: TestVector, t: float,
                            n_max: int = 160) -> complex | float:
    """``(f, e^{−tL} g)`` from the truncated ``rak``/``rakk`` matrix (oracle)."""
    mat = _fk_operator(model, n_max)
    vals, vecs = scipy.linalg.eigh(mat)
    a = vecs.T @ f.padded(n_max)
    b = vecs.T @ g_vec.padded(n_max)
    out = np.sum(np.conj(a) * np.exp(-t * vals) * b)
    return float(out.real) if np.isrealobj(a) and np.isrealobj(b) else complex(out)


def rak_ground_vector(model: ModelSpec, n_max: int = 64, tol: float = 1e-12) -> TestVector:
    """Ground eigenvector of the ``rak``/``rakk`` matrix, sign fixed so it is positive at the origin.

    Trailing coefficients below ``tol`` are dropped to keep pointwise
    evaluation cheap.
    """
    mat = _fk_operator(model, n_max)
    _, vec = scipy.linalg.eigh(mat, subset_by_index=(0, 0))
    v = vec[:, 0]
    if v[0] + v[1] < 0:
        v = -v
    keep = np.nonzero(np.abs(v) > tol)[0]
    n_keep = int(keep[-1]) // 2 + 1 if len(keep) else 1
    return TestVector(coeffs=v[: 2 * n_keep].copy(), label="ground")


def fk_ground_energy(model: ModelSpec, t: float, n_samples: int = 100_000,
                     rng: int | np.random.Generator | None = 0, *,
                     test_vector: TestVector | Literal["ground", "constant"] = "ground",
                     config: FKConfig = FKConfig(), gap_check: bool = True) -> MCEstimate:
    """``−(1/t) log((f, e^{−tL} f)/‖f‖²)`` with a fixed positive test vector.

    The default vector is the truncated ground state of the ``rak`` matrix
    (positive by Perron–Frobenius), which removes the ``log(overlap)/t``
    bias a generic vector would leave. The error is propagated with the
    delta method: ``se_E = se_M / (M t)``.

    Raises
    ------
    StatisticalFailure
        If the matrix-element estimate is not positive.
    """
    if isinstance(test_vector, str):
        if test_vector == "ground":
            f = rak_ground_vector(model)
        elif test_vector == "constant":
            f = TestVector.constant()
        else:
            raise ValueError(test_vector)
    else:
        f = test_vector
    if gap_check:
        vals = np.linalg.eigvalsh(_fk_operator(model, 96))
        distinct = vals[vals - vals[0] > 1e-7 * max(1.0, abs(vals[0]))]
        if len(distinct) and (distinct[0] - vals[0]) * t < 3:
            warnings.warn(f"spectral gap x t = {(distinct[0] - vals[0]) * t:.2f} < 3: excited-state "
                          "contamination may bias the estimate", RuntimeWarning, stacklevel=2)
    est = fk_matrix_element(model, f, f, t, n_samples, rng, config=config)
    m = float(np.real(est.mean))
    if not m > 0:
        raise StatisticalFailure(f"matrix element estimate {m:g} +- {est.std_error:g} is not positive; "
                                 "increase n_samples")
    norm2 = f.norm2() if f.coeffs is not None else 1.0
    energy = -math.log(m / norm2) / t
    return MCEstimate(energy, est.std_error / (m * t), est.n_samples, est.seed,
                      f"ground energy from {est.integrand_spec}")


@dataclass
class PositivityReport:
    pairs: list[tuple[int, int, MCEstimate, float]] = field(default_factory=list)
    threshold: float = 3.0

    @property
    def min_z(self) -> float:
        return min(z for *_, z in self.pairs)

    @property
    def inconclusive(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j, _, z in self.pairs if z < self.threshold]

    @property
    def all_positive(self) -> bool:
        return not self.inconclusive


def positivity_scan(model: ModelSpec, vectors: Sequence[TestVector], t: float, n_samples: int = 100_000,
                    rng: int | None = 0, *, threshold: float = 3.0,
                    config: FKConfig = FKConfig()) -> PositivityReport:
    """Estimate every ``(f_i, e^{−tL} f_j)`` and its z-score ``mean/se``.

    A pair with ``z < threshold`` is flagged inconclusive (not an error). A
    zero-variance zero estimate has ``z = 0``.
    """
    seed = _seed_of(rng)
    report = PositivityReport(threshold=threshold)
    for i, fi in enumerate(vectors):
        for j, fj in enumerate(vectors):
            est = fk_matrix_element(model, fi, fj, t, n_samples,
                                    int(np.random.SeedSequence(seed, spawn_key=(i, j)).generate_state(1)[0]),
                                    config=config)
            m = float(np.real(est.mean))
            if est.std_error > 0:
                z = m / est.std_error
            else:
                z = math.inf if m > 0 else (0.0 if m == 0 else -math.inf)
            report.pairs.append((i, j, est, z))
    return report


# --------------------------------------------------------------------------- NcHO


@dataclass
class NchoFKResult:
    estimate: MCEstimate
    per_level: list[tuple[float, MCEstimate]]
    tail_bound: float
    spectral_value: float


def fk_ncho_matrix_element(alpha: float, beta: float, f: np.ndarray, g_vec: np.ndarray, t: float,
                           n_samples: int = 20_000, rng: int | None = 0, *, k_max: int = 12,
                           n_max: int = 96, tail_tol: float = 1e-3,
                           config: FKConfig = FKConfig()) -> NchoFKResult:
    """``(f, e^{−tQ} g)`` for the NcHO through its Rabi fibers.

    ``f`` and ``g_vec`` are interleaved Fock-basis coefficient vectors. For
    each retained eigenvalue ``λ`` (the lowest ``k_max`` levels, grouped by
    degeneracy) the eigenspace projections are carried to the fiber by
    ``I``; the left one is additionally weighted by ``γ``; both are moved
    to the ``rak`` frame and the two-photon estimator is run with
    ``Δ = (α−β)λ/(2αβ)``, ``g = 1/(2√(αβ))`` over horizon ``2αβt/(α+β)``.
    Each level uses ``n_samples`` paths on an independent stream.

    The discarded levels contribute at most ``e^{−tλ_{k_max}}‖P f‖‖P g‖``,
    reported as ``tail_bound``; a warning is issued above ``tail_tol``.
    """
    if alpha * beta <= 1:
        raise OutOfRegimeError(f"NcHO bound: alpha*beta={alpha * beta:g} <= 1, not bounded below")
    if not alpha > beta:
        raise ValueError("the fiber jump rate (alpha-beta)lambda/(2 alpha beta) must be positive: need alpha > beta")
    f = np.asarray(f, dtype=float)
    g_vec = np.asarray(g_vec, dtype=float)
    f = np.concatenate([f, np.zeros(2 * n_max - len(f))])
    g_vec = np.concatenate([g_vec, np.zeros(2 * n_max - len(g_vec))])
    seed = _seed_of(rng)
    spaces = ncho_eigenspaces(alpha, beta, n_max, k_max + 1)
    if sum(b.shape[1] for _, b in spaces) > k_max:
        spaces = spaces[:-1]  # drop a possibly incomplete top group
    I = intertwiner(alpha, beta, n_max)
    gamma = np.tile([1.0 / alpha, 1.0 / beta], n_max)
    J = rak_frame(n_max)
    horizon = 2.0 * alpha * beta * t / (alpha + beta)
    total = 0.0
    var = 0.0
    exact = 0.0
    per_level = []
    f_left = f.copy()
    g_left = g_vec.copy()
    negligible = 1e-13 * max(float(np.linalg.norm(f) * np.linalg.norm(g_vec)), 1e-300)
    for idx, (lam, basis) in enumerate(spaces):
        pf = basis @ (basis.T @ f)
        pg = basis @ (basis.T @ g_vec)
        f_left -= pf
        g_left -= pg
        exact += math.exp(-t * lam) * float(pf @ pg)
        if np.linalg.norm(pf) * np.linalg.norm(pg) <= negligible:
            continue  # orthogonal to this eigenspace up to round-off
        left = J @ (gamma * (I @ pf))
        right = J @ (I @ pg)
        spec = FiberSpec(alpha, beta, lam)
        fiber = ModelSpec("rak", delta=spec.induced_delta, g=spec.induced_g)
        lvl_seed = int(np.random.SeedSequence(seed, spawn_key=(idx,)).generate_state(1)[0])
        est = fk_matrix_element(fiber, TestVector(coeffs=left), TestVector(coeffs=right), horizon,
                                n_samples, lvl_seed, config=config)
        per_level.append((lam, est))
        total += float(np.real(est.mean))
        var += est.std_error ** 2
    lam_next = float(np.linalg.eigvalsh(sparse_operator(ModelSpec("ncho", alpha=alpha, beta=beta),
                                                       n_max).toarray())[sum(b.shape[1] for _, b in spaces)])
    tail = math.exp(-t * lam_next) * float(np.linalg.norm(f_left) * np.linalg.norm(g_left))
    if tail > tail_tol:
        warnings.warn(f"discarded NcHO levels may contribute up to {tail:.3g}; raise k_max",
                      RuntimeWarning, stacklevel=2)
    est = MCEstimate(total, math.sqrt(var), n_samples * len(per_level), seed,
                     f"NcHO(alpha={alpha:g}, beta={beta:g}) fiber sum over {len(per_level)} levels, t={t:g}")
    return NchoFKResult(est, per_level, tail, exact)
