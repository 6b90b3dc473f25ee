import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holotransport.errors import StructuralError
from holotransport.matrixcore import (
    SIGMA_X,
    SIGMA_Z,
    Tolerance,
    commutator,
    dagger,
    eig_hermitian,
    eig_unitary,
    expm_skew,
    expm_skew_batch,
    is_hermitian,
    is_unitary,
    principal_phase,
    random_hermitian,
    random_unitary,
    require_hermitian,
    require_unitary,
)
from oracles import series_expm

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)


def test_zero_time_is_identity(rng):
    h = random_hermitian(4, rng)
    np.testing.assert_array_equal(expm_skew(h, 0.0), np.eye(4))


def test_pauli_z_quarter_period():
    u = expm_skew(SIGMA_Z, np.pi / 2)
    np.testing.assert_allclose(u, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]), atol=1e-14)


def test_pauli_x_half_period_matches_series():
    u = expm_skew(SIGMA_X, np.pi)
    np.testing.assert_allclose(u, -np.eye(2), atol=1e-14)
    np.testing.assert_allclose(u, series_expm(-1j * np.pi * SIGMA_X, 40), atol=1e-12)


@given(seeds, dims, st.floats(-3, 3))
def test_expm_matches_series_and_is_unitary(seed, d, t):
    rng = np.random.default_rng(seed)
    h = random_hermitian(d, rng)
    u = expm_skew(h, t)
    assert is_unitary(u, 1e-12)
    np.testing.assert_allclose(u, series_expm(-1j * t * h, 60), atol=1e-11)


@given(seeds, dims)
def test_batch_agrees_with_single(seed, d):
    rng = np.random.default_rng(seed)
    hs = np.array([random_hermitian(d, rng) for _ in range(3)])
    dts = np.array([0.1, -0.7, 2.0])
    batch = expm_skew_batch(hs, dts)
    for k in range(3):
        np.testing.assert_allclose(batch[k], expm_skew(hs[k], dts[k]), atol=1e-12)


def test_expm_rejects_non_hermitian():
    with pytest.raises(StructuralError):
        expm_skew(np.array([[0, 1], [0, 0]]), 1.0)


def test_eig_unitary_identity():
    phases, vecs = eig_unitary(np.eye(3))
    np.testing.assert_array_equal(phases, 0.0)
    assert is_unitary(vecs)


def test_eig_unitary_principal_arguments():
    phases, _ = eig_unitary(np.diag([1j, -1]))
    np.testing.assert_allclose(phases, [np.pi / 2, np.pi], atol=1e-15)


def test_eig_unitary_reconstructs_qr_unitary():
    rng = np.random.default_rng(7)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    phases, vecs = eig_unitary(q)
    np.testing.assert_allclose(vecs @ np.diag(np.exp(1j * phases)) @ dagger(vecs), q, atol=1e-10)


@given(seeds, dims)
def test_eig_unitary_reconstruction_property(seed, n):
    u = random_unitary(n, np.random.default_rng(seed))
    phases, vecs = eig_unitary(u)
    assert np.all((phases >= 0) & (phases < 2 * np.pi))
    assert np.all(np.diff(phases) >= 0)
    assert is_unitary(vecs, 1e-10)
    np.testing.assert_allclose(vecs @ np.diag(np.exp(1j * phases)) @ dagger(vecs), u, atol=1e-10)


def test_eig_unitary_degenerate_spectrum_has_unitary_basis():
    rng = np.random.default_rng(3)
    w = random_unitary(4, rng)
    u = w @ np.diag([1j, 1j, -1, -1]) @ dagger(w)
    phases, vecs = eig_unitary(u)
    np.testing.assert_allclose(phases, [np.pi / 2, np.pi / 2, np.pi, np.pi], atol=1e-12)
    assert is_unitary(vecs, 1e-12)


def test_phases_near_two_pi_snap_to_zero():
    phi = principal_phase(np.exp(-1j * 1e-13))
    assert phi == 0.0


def test_eig_hermitian_examples():
    evals, _ = eig_hermitian(np.zeros((3, 3)))
    np.testing.assert_array_equal(evals, 0.0)
    evals, _ = eig_hermitian(SIGMA_Z)
    np.testing.assert_allclose(evals, [-1, 1])
    evals, vecs = eig_hermitian(SIGMA_X)
    np.testing.assert_allclose(evals, [-1, 1], atol=1e-15)
    for k, sign in enumerate([-1, 1]):
        ref = np.array([1, sign]) / np.sqrt(2)
        assert abs(abs(np.vdot(ref, vecs[:, k])) - 1) < 1e-14


@given(seeds, dims)
def test_eig_hermitian_reconstruction(seed, d):
    h = random_hermitian(d, np.random.default_rng(seed))
    evals, vecs = eig_hermitian(h)
    assert np.all(np.diff(evals) >= 0)
    np.testing.assert_allclose(vecs @ np.diag(evals) @ dagger(vecs), h, atol=1e-12)


def test_validators():
    assert is_hermitian(SIGMA_X)
    assert not is_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(StructuralError):
        require_unitary(np.array([[1, 1], [0, 1]]))
    with pytest.raises(StructuralError):
        require_hermitian(np.ones((2, 3)))
    with pytest.raises(StructuralError):
        require_hermitian(np.array([[np.nan, 0], [0, 0]]))


def test_tolerance_rejects_negative():
    with pytest.raises(ValueError):
        Tolerance(structural=-1.0)


def test_commutator_of_paulis():
    np.testing.assert_allclose(commutator(SIGMA_X, SIGMA_Z), -2j * np.array([[0, -1j], [1j, 0]]))
