import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holotransport.dynamics import (
    ConstantHamiltonian,
    GeneratorFrame,
    RotatedHamiltonian,
    SampledFrame,
    SampledHamiltonian,
    ShiftFunction,
    expectation_trace,
    frame_potential,
    from_rotating_frame,
    propagate,
    sample_hamiltonian,
    to_rotating_frame,
)
from holotransport.errors import GridError, StructuralError
from holotransport.matrixcore import SIGMA_X, SIGMA_Z, dagger, random_hermitian
from holotransport.scenarios import random_sampled_frame
from oracles import series_expm

seeds = st.integers(0, 2**32 - 1)


def test_zero_hamiltonian_propagates_to_identity():
    u = propagate(ConstantHamiltonian(1.0, np.zeros((3, 3))), 16)
    np.testing.assert_array_equal(u.samples, np.broadcast_to(np.eye(3), u.samples.shape))


def test_pauli_z_for_time_pi():
    u = propagate(ConstantHamiltonian(np.pi, SIGMA_Z), 64).final
    np.testing.assert_allclose(u, -np.eye(2), atol=1e-14)


@pytest.mark.parametrize("method", ["midpoint", "magnus4"])
def test_rotated_constant_against_refined_grid(method):
    rng = np.random.default_rng(11)
    h = RotatedHamiltonian(1.3, random_hermitian(4, rng, 3.0), random_hermitian(4, rng, 3.0))
    coarse = propagate(h, 512, method).final
    fine = propagate(h, 8 * 512, method).final
    assert np.linalg.norm(coarse - fine, 2) / np.linalg.norm(fine, 2) < 1e-4


def test_rotated_constant_against_closed_form():
    # U_t = exp(-itB) exp(-it(H0 - B)) for H_t = exp(-itB) H0 exp(itB)
    rng = np.random.default_rng(12)
    h0, b = random_hermitian(3, rng, 2.0), random_hermitian(3, rng, 2.0)
    tau = 0.9
    exact = series_expm(-1j * tau * b, 60) @ series_expm(-1j * tau * (h0 - b), 60)
    for method, tol in [("midpoint", 1e-5), ("magnus4", 1e-11)]:
        u = propagate(RotatedHamiltonian(tau, h0, b), 4096, method).final
        assert np.max(np.abs(u - exact)) < tol


def test_magnus4_is_fourth_order():
    rng = np.random.default_rng(13)
    h = RotatedHamiltonian(1.0, random_hermitian(3, rng, 4.0), random_hermitian(3, rng, 4.0))
    ref = propagate(h, 8192, "magnus4").final
    e1 = np.linalg.norm(propagate(h, 64, "magnus4").final - ref)
    e2 = np.linalg.norm(propagate(h, 128, "magnus4").final - ref)
    assert 12 < e1 / e2 < 20


def test_propagate_rejects_bad_grids():
    h = SampledHamiltonian(1.0, np.zeros((4, 2, 2)))
    with pytest.raises(GridError):
        propagate(h, 10)
    with pytest.raises(GridError):
        propagate(ConstantHamiltonian(1.0, SIGMA_X), 1)
    with pytest.raises(ValueError):
        propagate(ConstantHamiltonian(1.0, SIGMA_X), 8, method="euler")


def test_sampled_hamiltonian_validates():
    with pytest.raises(StructuralError):
        SampledHamiltonian(1.0, np.array([[[0, 1], [0, 0]]] * 3))


def test_constant_frame_has_no_potential():
    a = frame_potential(GeneratorFrame.identity(3, 1.0))
    np.testing.assert_array_equal(a.at(0.4), np.zeros((3, 3)))
    rng = np.random.default_rng(0)
    c = np.linalg.qr(rng.standard_normal((3, 3)))[0].astype(complex)
    a = frame_potential(SampledFrame(1.0, np.array([c] * 9)))
    np.testing.assert_allclose(a.at_many(np.linspace(0, 1, 5)), 0, atol=1e-14)


def test_generator_frame_potential_is_minus_b():
    np.testing.assert_allclose(frame_potential(GeneratorFrame(1.0, SIGMA_Z)).at(0.3), -SIGMA_Z)


def test_sampled_frame_potential_matches_analytic():
    b = random_hermitian(3, np.random.default_rng(5))
    exact = GeneratorFrame(1.0, b)
    sampled = SampledFrame(1.0, exact.at_many(np.linspace(0, 1, 513)))
    a = frame_potential(sampled).samples
    assert np.max(np.abs(a + b)) < 1e-5


def test_identity_frame_leaves_hamiltonian_unchanged():
    h = ConstantHamiltonian(1.0, SIGMA_X)
    r = GeneratorFrame.identity(2, 1.0)
    assert to_rotating_frame(h, r) is h
    assert from_rotating_frame(h, r) is h


def test_free_evolution_interaction_picture_vanishes():
    b = random_hermitian(3, np.random.default_rng(6))
    h_rf = to_rotating_frame(ConstantHamiltonian(1.0, b), GeneratorFrame(1.0, b))
    np.testing.assert_allclose(h_rf.at_many(np.linspace(0, 1, 7)), 0, atol=1e-13)


def test_zero_rotating_hamiltonian_is_lab_b():
    b = random_hermitian(3, np.random.default_rng(8))
    lab = from_rotating_frame(ConstantHamiltonian(1.0, np.zeros((3, 3))), GeneratorFrame(1.0, b))
    np.testing.assert_allclose(lab.at_many(np.linspace(0, 1, 7)), np.broadcast_to(b, (7, 3, 3)), atol=1e-13)


@given(seeds, st.integers(2, 5))
def test_rotating_propagator_relation(seed, d):
    # U_rf(t) = R_t U(t) R_0^dag
    rng = np.random.default_rng(seed)
    h = ConstantHamiltonian(1.0, random_hermitian(d, rng))
    r = GeneratorFrame(1.0, random_hermitian(d, rng))
    u = propagate(h, 1024).samples
    u_rf = propagate(to_rotating_frame(h, r), 1024).samples
    rs = r.at_many(np.linspace(0, 1, 1025))
    assert np.max(np.abs(u_rf - rs @ u @ dagger(rs[0]))) < 1e-4


@given(seeds, st.integers(2, 4))
def test_round_trip_through_sampled_frame(seed, d):
    rng = np.random.default_rng(seed)
    h = SampledHamiltonian(1.0, np.array([random_hermitian(d, rng) for _ in range(65)]))
    r = random_sampled_frame(d, 1.0, rng, steps=64)
    back = from_rotating_frame(to_rotating_frame(h, r), r)
    np.testing.assert_allclose(back.samples, h.samples, atol=1e-9)


@given(seeds, st.integers(2, 4))
def test_round_trip_through_generator_frame(seed, d):
    rng = np.random.default_rng(seed)
    h = RotatedHamiltonian(1.0, random_hermitian(d, rng), random_hermitian(d, rng))
    r = GeneratorFrame(1.0, random_hermitian(d, rng))
    back = from_rotating_frame(to_rotating_frame(h, r), r)
    ts = np.linspace(0, 1, 9)
    np.testing.assert_allclose(back.at_many(ts), h.at_many(ts), atol=1e-12)


def test_frame_dimension_mismatch():
    with pytest.raises(StructuralError):
        to_rotating_frame(ConstantHamiltonian(1.0, SIGMA_X), GeneratorFrame.identity(3, 1.0))
    with pytest.raises(GridError):
        to_rotating_frame(ConstantHamiltonian(1.0, SIGMA_X), GeneratorFrame.identity(2, 2.0))


def test_shift_function_integral_is_exact_for_linear_interpolant():
    eps = ShiftFunction(2.0, np.array([0.0, 1.0, -1.0]))
    np.testing.assert_allclose(eps.integral([0.0, 0.5, 1.0, 2.0]), [0.0, 0.125, 0.5, 0.5])
    assert eps.max_abs() == 1.0
    np.testing.assert_allclose(ShiftFunction.constant(1.0, 0.3).integral([0.7]), [0.21])


def test_sampled_hamiltonian_interpolates():
    h = SampledHamiltonian(1.0, np.array([np.zeros((2, 2)), SIGMA_Z]))
    np.testing.assert_allclose(h.at(0.25), 0.25 * SIGMA_Z)
    assert sample_hamiltonian(h, 4).samples.shape == (5, 2, 2)


def test_expectation_trace_rabi():
    tr = expectation_trace(ConstantHamiltonian(np.pi, 0.5 * SIGMA_X), [1, 0], SIGMA_Z, steps=4)
    np.testing.assert_allclose(tr, np.cos(np.linspace(0, np.pi, 5)), atol=1e-14)
