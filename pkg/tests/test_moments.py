import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles as orc
from uncrel import covariance, deviation_vector, expectation, joint_moments, make_observable, make_state, moment_report, pearson
from uncrel.ensembles import random_hermitian, random_state
from uncrel.errors import DimMismatch, ZeroDeviation

S3 = math.sqrt(3) / 2


def test_expectation_examples(paulis, up, tilted):
    sx, sy, sz = paulis
    assert expectation(sz, up) == 1
    assert expectation(sx, up) == 0
    assert expectation(sx, tilted) == pytest.approx(S3, abs=1e-15)


def test_deviation_vector_examples(paulis, up):
    sx, sy, sz = paulis
    assert np.array_equal(deviation_vector(sz, up), [0, 0])
    assert np.array_equal(deviation_vector(sx, up), [0, 1])
    assert np.array_equal(deviation_vector(sy, up), [0, 1j])


def test_moment_report_examples(paulis, up, tilted):
    sx, sy, sz = paulis
    rep = moment_report(sx, up)
    assert (rep.mean, rep.stddev) == (0.0, 1.0)
    rep = moment_report(sz, up)
    assert (rep.mean, rep.stddev) == (1.0, 0.0)
    rep = moment_report(sz, tilted)
    assert rep.mean == pytest.approx(0.5, abs=1e-15)
    assert rep.stddev == pytest.approx(S3, abs=1e-15)
    assert rep.deviation_norm_sq == pytest.approx(0.75, abs=1e-15)


def test_covariance_examples(paulis, up):
    sx, sy, sz = paulis
    rec = covariance(sx, sy, up)
    assert rec.value == 1j
    assert rec.re_part == 0 and rec.im_part == 1
    assert rec.commutator_expectation == 2j
    assert covariance(sx, sz, up).value == 0
    assert covariance(sx, sx, up).value == 1


def test_pearson_examples(paulis, up, tilted):
    sx, sy, sz = paulis
    assert pearson(sx, sy, up) == 1.0
    with pytest.raises(ZeroDeviation) as info:
        pearson(sx, sz, up)
    assert info.value.which == "sigma_z"
    # C = i/2, deltas 1/2 and 1
    assert covariance(sx, sy, tilted).value == pytest.approx(0.5j, abs=1e-15)
    assert pearson(sx, sy, tilted) == pytest.approx(1.0, abs=1e-15)


def test_dim_mismatch(paulis):
    with pytest.raises(DimMismatch):
        expectation(paulis[0], make_state([1, 0, 0]))


def test_joint_moments_match_oracle(rng):
    d = 4
    obs = [random_hermitian(d, rng, f"A{i}") for i in range(3)]
    phi = random_state(d, rng)
    jm = joint_moments(obs, phi)
    mats = [o.matrix.tolist() for o in obs]
    v = phi.amplitudes.tolist()
    for i in range(3):
        assert jm.deltas[i] == pytest.approx(orc.delta(mats[i], v), rel=1e-12)
        for j in range(3):
            assert abs(jm.cov[i, j] - orc.cov(mats[i], mats[j], v)) <= 1e-12 * (1 + abs(jm.cov[i, j]))
            assert abs(jm.comm[i, j] - orc.comm_exp(mats[i], mats[j], v)) <= 1e-12 * (1 + abs(jm.comm[i, j]))


@st.composite
def instance(draw, min_dim=2, max_dim=8, n=3):
    d = draw(st.integers(min_dim, max_dim))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    obs = [random_hermitian(d, rng, f"A{i}") for i in range(n)]
    return obs, random_state(d, rng)


@given(instance(min_dim=2, max_dim=2, n=2))
def test_qubit_saturation(inst):
    (a, b), phi = inst
    # In C^2 both deviation vectors lie on the line orthogonal to phi.
    assert pearson(a, b, phi) == pytest.approx(1.0, abs=1e-9)


@given(instance(n=2))
def test_hr_chain(inst):
    (a, b), phi = inst
    rec = covariance(a, b, phi)
    assert abs(rec.value) >= abs(rec.im_part) - 1e-9
    assert abs(abs(rec.im_part) - 0.5 * abs(rec.commutator_expectation)) <= 1e-9 * (1 + abs(rec.value))
    assert abs(rec.commutator_expectation - 2j * rec.im_part) <= 1e-9 * (1 + abs(rec.value))


@given(instance(n=3))
def test_covariance_additivity(inst):
    (a, b, c), phi = inst
    bc = make_observable("B+C", b.matrix + c.matrix)
    lhs = covariance(a, bc, phi).value
    rhs = covariance(a, b, phi).value + covariance(a, c, phi).value
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


@given(instance(n=2), st.integers(0, 7))
def test_eigenstate_nulls_covariance(inst, k):
    (a, b), _ = inst
    w, v = np.linalg.eigh(b.matrix)
    phi = make_state(v[:, k % b.dim], normalize=True)
    assert abs(covariance(a, b, phi).value) <= 1e-9 * (1 + a.scale + b.scale)


@given(instance(n=2))
def test_pearson_in_unit_interval(inst):
    (a, b), phi = inst
    r = pearson(a, b, phi)
    assert 0 <= r <= 1 + 1e-12
