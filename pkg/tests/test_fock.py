import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rabi_ncho.fock import (
    BOSON_KINDS,
    BasisIndex,
    SectorLabel,
    Spin,
    annihilation,
    basis_index,
    boson_matrix,
    flat_index,
    kron_assemble,
    sector_indices,
    sector_of,
    sector_permutation,
    spin_matrix,
)
from rabi_ncho.spectral import ModelSpec, assemble

SYMMETRIC = ("number", "create2_plus_annih2", "create_plus_annih", "q", "q2", "p2")
ANTISYMMETRIC = ("i_times_diff", "i_times_diff1", "pq_sym")


def test_number_matrix():
    np.testing.assert_array_equal(boson_matrix("number", 4), np.diag([0.0, 1, 2, 3]))


def test_two_photon_entries():
    m = boson_matrix("create2_plus_annih2", 4)
    assert m[2, 0] == pytest.approx(math.sqrt(2))
    assert m[3, 1] == pytest.approx(math.sqrt(6))
    assert m[0, 2] == m[2, 0]


@pytest.mark.parametrize("n_max", [2, 5, 17])
def test_q2_diagonal_is_n_plus_half(n_max):
    np.testing.assert_allclose(np.diag(boson_matrix("q2", n_max)), np.arange(n_max) + 0.5)


def test_q2_matches_padded_product():
    # compression of q² = (q on a larger space)² restricted back
    n = 12
    q_big = boson_matrix("q", n + 2)
    np.testing.assert_allclose(boson_matrix("q2", n), (q_big @ q_big)[:n, :n], atol=1e-13)


def test_p2_plus_q2_is_twice_number_plus_one():
    n = 9
    np.testing.assert_allclose(boson_matrix("p2", n) + boson_matrix("q2", n),
                               2 * boson_matrix("number", n) + np.eye(n), atol=1e-14)


@pytest.mark.parametrize("kind", SYMMETRIC)
@pytest.mark.parametrize("n_max", [2, 3, 8, 31])
def test_symmetric_kinds(kind, n_max):
    m = boson_matrix(kind, n_max)
    assert np.isrealobj(m)
    assert np.array_equal(m, m.T)


@pytest.mark.parametrize("kind", ANTISYMMETRIC)
@pytest.mark.parametrize("n_max", [2, 3, 8, 31])
def test_antisymmetric_kinds(kind, n_max):
    m = boson_matrix(kind, n_max)
    assert np.array_equal(m, -m.T)


def test_pq_sym_is_half_i_times_diff():
    np.testing.assert_array_equal(2 * boson_matrix("pq_sym", 7), boson_matrix("i_times_diff", 7))


@pytest.mark.parametrize("bad", [0, 1, -3, 2.5])
def test_invalid_n_max(bad):
    with pytest.raises(ValueError):
        boson_matrix("number", bad)


def test_unknown_kind():
    with pytest.raises(ValueError, match="unknown boson operator kind"):
        boson_matrix("sigma", 4)


@given(st.integers(min_value=2, max_value=60))
def test_commutator_truncation_law(n):
    a = annihilation(n)
    comm = a @ a.T - a.T @ a
    np.testing.assert_allclose(comm[: n - 1, : n - 1], np.eye(n - 1), atol=1e-12)
    assert comm[n - 1, n - 1] == pytest.approx(-(n - 1))


@given(st.integers(min_value=2, max_value=40))
def test_ladder_adjointness(n):
    a = annihilation(n)
    np.testing.assert_array_equal(boson_matrix("create_plus_annih", n), a + a.T)
    np.testing.assert_array_equal(boson_matrix("i_times_diff1", n), a - a.T)


def test_spin_matrices():
    np.testing.assert_array_equal(spin_matrix("sx"), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(spin_matrix("sy_real"), [[0, -1], [1, 0]])
    np.testing.assert_array_equal(spin_matrix("gamma", 2, 4), [[0.5, 0], [0, 0.25]])
    np.testing.assert_array_equal(spin_matrix("diag", 2, 4), [[2, 0], [0, 4]])


@pytest.mark.parametrize("alpha,beta", [(0, 1), (1, -1), (None, 2)])
def test_spin_params_must_be_positive(alpha, beta):
    with pytest.raises(ValueError):
        spin_matrix("gamma", alpha, beta)


def test_sy_real_is_minus_i_sigma_y():
    sigma_y = np.array([[0, -1j], [1j, 0]])
    np.testing.assert_array_equal(spin_matrix("sy_real"), (-1j * sigma_y).real)


@given(st.integers(min_value=0, max_value=500), st.sampled_from(list(Spin)))
def test_flat_index_bijection(level, spin):
    idx = BasisIndex(spin, level)
    assert basis_index(idx.flat()) == idx
    assert idx.flat() == 2 * level + spin.value


def test_kron_identity():
    np.testing.assert_array_equal(kron_assemble(np.eye(2), np.eye(3)), np.eye(6))


def test_kron_sz_interleaved():
    # flat order (up,0),(down,0),(up,1),(down,1): sz⊗diag(0,1) is diag(0,0,1,-1)
    out = kron_assemble(spin_matrix("sz"), np.diag([0.0, 1.0]))
    np.testing.assert_array_equal(out, np.diag([0.0, 0.0, 1.0, -1.0]))


def test_kron_sx_flips_spin():
    e = np.zeros(8)
    e[flat_index(Spin.UP, 0)] = 1
    out = kron_assemble(spin_matrix("sx"), np.eye(4)) @ e
    expected = np.zeros(8)
    expected[flat_index(Spin.DOWN, 0)] = 1
    np.testing.assert_array_equal(out, expected)


@given(st.integers(min_value=2, max_value=6), st.data())
def test_kron_entry_law(n, data):
    spin = np.array(data.draw(st.lists(st.floats(-3, 3), min_size=4, max_size=4))).reshape(2, 2)
    boson = np.array(data.draw(st.lists(st.floats(-3, 3), min_size=n * n, max_size=n * n))).reshape(n, n)
    out = kron_assemble(spin, boson)
    for s in Spin:
        for sp in Spin:
            for i in range(n):
                for j in range(n):
                    assert out[flat_index(s, i), flat_index(sp, j)] == spin[s.value, sp.value] * boson[i, j]


def test_kron_dimension_mismatch():
    with pytest.raises(ValueError):
        kron_assemble(np.eye(3), np.eye(2))


@pytest.mark.parametrize("spin,level,label", [
    (Spin.DOWN, 0, SectorLabel.MINUS1),
    (Spin.UP, 0, SectorLabel.PLUS1),
    (Spin.UP, 3, SectorLabel.MINUS_I),
    (Spin.UP, 1, SectorLabel.PLUS_I),
    (Spin.UP, 2, SectorLabel.MINUS1),
    (Spin.DOWN, 1, SectorLabel.MINUS_I),
    (Spin.DOWN, 2, SectorLabel.PLUS1),
    (Spin.DOWN, 3, SectorLabel.PLUS_I),
])
def test_sector_table(spin, level, label):
    assert sector_of(BasisIndex(spin, level)) is label
    assert sector_of(BasisIndex(spin, level + 4)) is label


@given(st.integers(min_value=0, max_value=300), st.sampled_from(list(Spin)))
def test_sector_matches_parity_eigenvalue(level, spin):
    # eigenvalue of σz ⊗ i^{a†a} on the basis vector
    eig = (1 if spin is Spin.UP else -1) * 1j ** level
    expected = {1: SectorLabel.PLUS1, -1: SectorLabel.MINUS1, 1j: SectorLabel.PLUS_I, -1j: SectorLabel.MINUS_I}
    assert sector_of(BasisIndex(spin, level)) is expected[complex(round(eig.real), round(eig.imag))]


def test_sector_permutation_partitions():
    perm, blocks = sector_permutation(10)
    assert sorted(perm.tolist()) == list(range(20))
    assert sum(b.stop - b.start for _, b in blocks) == 20


@given(st.floats(0, 2), st.floats(-0.49, 0.49), st.integers(4, 40))
def test_sector_closure_of_two_photon_matrix(delta, g, n):
    mat = assemble(ModelSpec("rabi2p", delta=delta, g=g), n).matrix
    groups = sector_indices(n)
    for a, ia in groups.items():
        for b, ib in groups.items():
            if a is not b:
                assert not np.any(mat[np.ix_(ia, ib)])


@pytest.mark.parametrize("kind", BOSON_KINDS)
def test_all_kinds_real(kind):
    assert boson_matrix(kind, 6).dtype == np.float64
