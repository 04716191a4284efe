import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles as orc
from uncrel import (
    Observable,
    StateVector,
    Tolerances,
    commutator,
    eig_general,
    eig_hermitian,
    inner_product,
    make_observable,
    make_state,
)
from uncrel.errors import DefectiveMatrix, DimMismatch, NonFinite, NonHermitian, NonSquare, NotNormalized


def test_make_observable_sigma_z():
    obs = make_observable("sz", [[1, 0], [0, -1]])
    assert obs.dim == 2
    assert obs.name == "sz"


def test_make_observable_sigma_y_is_hermitian():
    obs = make_observable("sy", [[0, -1j], [1j, 0]])
    assert obs.dim == 2
    assert np.array_equal(obs.matrix, np.array(orc.SY))


def test_anti_hermitian_rejected_with_asymmetry():
    with pytest.raises(NonHermitian) as info:
        make_observable("bad", [[0, 1j], [1j, 0]])
    # M - M^dagger = [[0, 2i], [2i, 0]]
    assert info.value.max_asymmetry == pytest.approx(2.0)
    assert "2.000e+00" in str(info.value)


def test_non_square_and_non_finite():
    with pytest.raises(NonSquare):
        make_observable("a", [[1, 0, 0], [0, 1, 0]])
    with pytest.raises(NonSquare):
        make_observable("a", [[1, 0], [0]])
    with pytest.raises(NonFinite):
        make_observable("a", [[1, math.nan], [math.nan, 1]])


def test_hermiticity_gate_scales_with_norm():
    big = 1e6
    noise = 1e-5  # below 1e-10 * (1 + 1e6)
    m = np.array([[big, 1 + noise], [1, -big]])
    obs = make_observable("big", m)
    assert np.allclose(obs.matrix, obs.matrix.conj().T, atol=0, rtol=0)
    with pytest.raises(NonHermitian):
        make_observable("small", [[1, 1 + 1e-5], [1, 1]])


def test_tolerance_override():
    loose = Tolerances(herm=1e-3)
    make_observable("ok", [[1, 1 + 1e-4], [1, 1]], loose)


def test_observable_is_immutable():
    obs = make_observable("sz", orc.SZ)
    with pytest.raises(ValueError):
        obs.matrix[0, 0] = 5


def test_direct_construction_validates():
    with pytest.raises(NonHermitian):
        Observable("x", np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NotNormalized):
        StateVector(np.array([1.0, 1.0]))


def test_state_normalization_rules():
    s = make_state([1 + 5e-7, 0])
    assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(NotNormalized):
        make_state([1.1, 0])
    s = make_state([3, 4], normalize=True)
    assert np.allclose(s.amplitudes, [0.6, 0.8])
    with pytest.raises(DimMismatch):
        make_state([1.0])
    with pytest.raises(NotNormalized):
        make_state([0, 0], normalize=True)


def test_inner_product_examples():
    assert inner_product([1, 0], [0, 1]) == 0
    r = 1 / math.sqrt(2)
    assert inner_product([r, r], [r, r]) == pytest.approx(1.0, abs=1e-15)
    assert inner_product([1, 0], [r, 1j * r]) == pytest.approx(r, abs=1e-15)
    # conjugate-linear in the first slot
    assert inner_product([1j, 0], [1, 0]) == pytest.approx(-1j)


def test_commutator_examples():
    assert np.array_equal(commutator(orc.SX, orc.SX), np.zeros((2, 2)))
    assert np.allclose(commutator(orc.SX, orc.SY), 2j * np.array(orc.SZ), atol=0)
    assert np.allclose(commutator(orc.SY, orc.SZ), 2j * np.array(orc.SX), atol=0)


def test_eig_hermitian_sigma_z_and_x():
    pz = eig_hermitian(orc.SZ)
    assert [p.value for p in pz] == [-1, 1]
    assert abs(abs(pz[0].vector[1]) - 1) < 1e-15
    px = eig_hermitian(orc.SX)
    assert [round(p.value.real, 12) for p in px] == [-1, 1]
    r = 1 / math.sqrt(2)
    assert np.allclose(np.abs(px[1].vector), [r, r])
    assert abs(inner_product(px[0].vector, [r, -r])) == pytest.approx(1.0)


def test_eig_hermitian_identity_multiplicity():
    pairs = eig_hermitian(np.eye(3))
    assert [p.value for p in pairs] == [1, 1, 1]
    v = np.array([p.vector for p in pairs])
    assert np.allclose(v @ v.conj().T, np.eye(3))


def test_eig_general_diagonal():
    pairs = eig_general(np.diag([2, 3j]))
    assert sorted([p.value for p in pairs], key=abs) == [2, 3j]
    by_value = {complex(p.value): p.vector for p in pairs}
    assert np.allclose(np.abs(by_value[2]), [1, 0])
    assert np.allclose(np.abs(by_value[3j]), [0, 1])


def test_eig_general_nilpotent_is_defective():
    m = np.array(orc.SX) - 1j * np.array(orc.SY)
    assert np.array_equal(m, [[0, 0], [2, 0]])
    with pytest.warns(DefectiveMatrix):
        pairs = eig_general(m)
    assert len(pairs) == 1
    assert abs(pairs[0].value) < 1e-12
    assert np.allclose(np.abs(pairs[0].vector), [0, 1])


def test_eig_general_z_zero_matches_hermitian():
    with warnings.catch_warnings():
        warnings.simplefilter("error", DefectiveMatrix)
        general = eig_general(np.array(orc.SX) - 0 * np.array(orc.SY))
    herm = eig_hermitian(orc.SX)
    assert sorted(p.value.real for p in general) == pytest.approx([p.value.real for p in herm])
    for g in general:
        match = [h for h in herm if abs(h.value - g.value) < 1e-12][0]
        assert abs(inner_product(match.vector, g.vector)) == pytest.approx(1.0)


def test_eig_general_repeated_but_diagonalizable():
    with warnings.catch_warnings():
        warnings.simplefilter("error", DefectiveMatrix)
        pairs = eig_general(np.eye(3) * (1 + 2j))
    assert len(pairs) == 3


@st.composite
def hermitian(draw, max_dim=8):
    d = draw(st.integers(2, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


@given(hermitian())
def test_eig_hermitian_reconstructs(a):
    pairs = eig_hermitian(a)
    v = np.array([p.vector for p in pairs]).T
    lam = np.diag([p.value.real for p in pairs])
    d = a.shape[0]
    scale = np.max(np.abs(a))
    assert np.max(np.abs(v @ lam @ v.conj().T - a)) <= 1e-10 * d * scale + 1e-12


@given(hermitian(), hermitian())
def test_commutator_antisymmetric(a, b):
    if a.shape != b.shape:
        with pytest.raises(DimMismatch):
            commutator(a, b)
        return
    assert np.array_equal(commutator(a, b), -commutator(b, a))


@given(st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_inner_product_conjugate_symmetry(d, seed):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    lhs = inner_product(u, v)
    rhs = inner_product(v, u).conjugate()
    assert abs(lhs - rhs) <= 4 * d * np.finfo(float).eps * np.linalg.norm(u) * np.linalg.norm(v)
    assert abs(lhs - orc.inner(list(u), list(v))) <= 1e-12 * (1 + np.linalg.norm(u) * np.linalg.norm(v))


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_eig_general_residuals(d, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    pairs = eig_general(m)
    assert len(pairs) == d
    for p in pairs:
        assert np.linalg.norm(m @ p.vector - p.value * p.vector) <= 1e-10 * (1 + np.max(np.abs(m)) * d)
