import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from rabi_ncho.errors import ContractError, OutOfRegimeError
from rabi_ncho.spectral import ModelSpec, Spectrum, converged_spectrum
from rabi_ncho.zeta import (
    TailModel,
    heat_trace,
    heat_trace_bound,
    hurwitz_brute_force,
    hurwitz_zeta,
    ncho_zeta_limit,
    rabi_zeta_limit,
    spectral_zeta,
    zeta_2p_delta0,
    zeta_2p_g0,
    zeta_ncho_equal,
    zeta_of_model,
)


@given(st.floats(1.05, 12.0), st.floats(0.01, 10.0))
def test_hurwitz_matches_scipy(s, tau):
    assert hurwitz_zeta(s, tau).value == pytest.approx(float(scipy.special.zeta(s, tau)), rel=1e-11)


def test_hurwitz_half_is_dirichlet_lambda():
    # ζ(s; ½) = (2^s − 1) ζ(s)
    assert hurwitz_zeta(2.0, 0.5).value == pytest.approx(3 * math.pi ** 2 / 6, rel=1e-13)


@pytest.mark.parametrize("s,tau", [(2.0, 0.5), (3.5, 1.7), (1.5, 0.25)])
def test_hurwitz_inside_brute_force_bracket(s, tau):
    lo, hi = hurwitz_brute_force(s, tau, 20_000)
    assert lo <= hurwitz_zeta(s, tau).value <= hi


@pytest.mark.parametrize("s,tau", [(1.0, 0.5), (0.5, 1.0), (2.0, 0.0), (2.0, -1.0)])
def test_hurwitz_domain(s, tau):
    with pytest.raises(ValueError):
        hurwitz_zeta(s, tau)


def test_tail_model_exact_on_affine_pairs():
    n = np.arange(80, dtype=float)
    vals = 0.7 * n + 0.3 + 0.05 * (n % 2)
    c, d_lo, d_hi, k = TailModel(40).fit(vals)
    assert c == pytest.approx(0.7, rel=1e-12)
    assert (d_lo, d_hi) == pytest.approx((0.3, 0.35), rel=1e-12)
    assert k == 80


def test_spectral_zeta_of_exact_affine_spectrum():
    vals = np.arange(400) + 0.5
    z = spectral_zeta(Spectrum(vals, 400, 400, 1e-12), 2.0)
    assert z.value == pytest.approx(hurwitz_zeta(2.0, 0.5).value, abs=1e-12)
    assert z.tail_bound < 1e-12


def test_spectral_zeta_needs_positive_spectrum():
    with pytest.raises(ValueError):
        spectral_zeta(Spectrum(np.arange(50) - 0.5, 50, 50, 1e-9), 2.0)
    with pytest.raises(ValueError):
        spectral_zeta(Spectrum(np.arange(50) + 0.5, 50, 50, 1e-9), 1.0)
    with pytest.raises(ContractError):
        spectral_zeta(Spectrum(np.arange(50) + 0.5, 50, 0, 1e-9), 2.0)


@pytest.mark.parametrize("model,closed", [
    (ModelSpec("rabi2p", delta=0.0, g=0.3), lambda s: zeta_2p_delta0(s, 0.3)),
    (ModelSpec("rabi2p", delta=0.2, g=0.0), lambda s: zeta_2p_g0(s, 0.2)),
    (ModelSpec("ncho", alpha=2.0, beta=2.0), lambda s: zeta_ncho_equal(s, 2.0)),
])
@pytest.mark.parametrize("s", [1.5, 2.0, 3.0])
def test_numerical_zeta_matches_closed_forms(model, closed, s):
    z = zeta_of_model(model, s, levels=200)
    assert abs(z.value - closed(s)) <= z.tail_bound + 1e-8


def test_closed_form_exponent():
    s, g = 2.0, 0.3
    assert zeta_2p_delta0(s, g) == pytest.approx(2 / (1 - 4 * g * g) * hurwitz_zeta(s, 0.5).value)


def test_closed_form_regimes():
    with pytest.raises(OutOfRegimeError):
        zeta_2p_delta0(2.0, 0.5)
    with pytest.raises(ValueError):
        zeta_2p_g0(2.0, 0.6)
    with pytest.raises(OutOfRegimeError):
        zeta_ncho_equal(2.0, 1.0)


def test_delta_limit_monotone():
    rep = rabi_zeta_limit(2.0, 0.2, [0.1, 0.01, 0.001], vary="delta", levels=120)
    assert rep.monotone
    assert rep.final_difference < 1e-3
    # paired levels split by ±Δ, so ζ moves at second order
    assert rep.differences[1] / rep.differences[2] == pytest.approx(100, rel=0.05)
    assert abs(rep.rows[-1].ground - rep.ground_limit) < 2e-3


def test_g_limit_monotone():
    rep = rabi_zeta_limit(2.0, 0.25, [0.1, 0.01, 0.001], vary="g", levels=120)
    assert rep.monotone
    assert rep.final_difference < 1e-3
    assert rep.differences[1] / rep.differences[2] == pytest.approx(100, rel=0.05)


def test_ncho_limit_from_both_sides():
    for seq in ([3.3, 3.1, 3.01], [2.7, 2.9, 2.99]):
        rep = ncho_zeta_limit(2.0, 3.0, seq, levels=120)
        assert rep.monotone
        assert rep.final_difference < 1e-2


def test_limit_refuses_unbounded():
    with pytest.raises(OutOfRegimeError):
        rabi_zeta_limit(2.0, 0.6, [0.1])
    with pytest.raises(OutOfRegimeError):
        ncho_zeta_limit(2.0, 3.0, [0.2])


def test_heat_trace_closed_form():
    vals = np.arange(300) + 0.5
    value, bound = heat_trace(Spectrum(vals, 300, 300, 1e-12), 0.7)
    assert value == pytest.approx(math.exp(-0.35) / -math.expm1(-0.7), rel=1e-12)


@pytest.mark.parametrize("delta,g", [(0.0, 0.2), (0.1, 0.2), (0.3, 0.1), (0.2, -0.3)])
@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("s", [1.5, 2.5])
def test_heat_trace_envelope(delta, g, t, s):
    spec = converged_spectrum(ModelSpec("rabi2p", delta=delta, g=g), 120, 1e-10)
    value, bound = heat_trace(spec, t)
    assert value + bound <= heat_trace_bound(t, s, delta, g)


def test_heat_trace_envelope_domain():
    with pytest.raises(ValueError):
        heat_trace_bound(1.0, 2.0, 0.5, 0.2)
