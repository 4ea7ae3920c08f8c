"""Randomised invariants checked with hypothesis."""

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from bergman_interp.geometry import boundary_distance, kobayashi_distance, mobius
from bergman_interp.interpolation import (
    InterpolationProblem,
    gram_matrix,
    oracle_solve,
    transport_forward,
    transport_inverse,
)
from bergman_interp.integration import SpaceParams
from bergman_interp.kernel import KernelPower, check_transformation_identity, jacobian
from bergman_interp.sequences import PointSequence, WeightedValueSequence, k_matrix, sequence_norm

from conftest import ball_points

seeds = st.integers(0, 2**32 - 1)


def cloud(seed, count, n, max_radius=0.9):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * max_radius * rng.uniform(0.05, 1, size=(count, 1))


@given(ball_points(n=2), ball_points(n=2), ball_points(n=2))
def test_kernel_transformation_law(a, z, w):
    assert check_transformation_identity(a, z, w) < 1e-9


@given(ball_points(n=2), ball_points(n=2))
def test_mobius_moves_center_to_origin(a, z):
    assert np.isclose(kobayashi_distance(a, z), kobayashi_distance(np.zeros(2), mobius(a, z)),
                      atol=1e-9)


@given(ball_points(n=3, max_radius=0.9), ball_points(n=3, max_radius=0.9))
def test_jacobian_modulus_from_boundary_ratio(a, z):
    # |J(z)|^2 = ((1 - |phi_a(z)|^2) / (1 - |z|^2))^(n+1) with n = 3
    lhs = abs(jacobian(a, z)) ** 2
    w = mobius(a, z)
    rhs = ((1 - np.vdot(w, w).real) / (1 - np.vdot(z, z).real)) ** 4
    assert np.isclose(lhs, rhs, rtol=1e-8)


@given(seeds, st.integers(1, 8), st.sampled_from([1, 2]), st.floats(0.1, 3.0))
def test_gram_positive_definite(seed, count, n, s):
    pts = cloud(seed, count, n)
    g = gram_matrix(PointSequence(pts), s)
    assert np.allclose(g, g.conj().T, rtol=1e-10, atol=0)
    eig = np.linalg.eigvalsh(0.5 * (g + g.conj().T))
    assert eig.min() > -1e-10 * eig.max()


@given(seeds, st.floats(1.0, 4.0), st.floats(0.0, 3.0),
       st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False))
def test_sequence_norm_homogeneous(seed, p, w, c):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    d = rng.uniform(1e-3, 1, size=6)
    a = sequence_norm(WeightedValueSequence(v, w), d, p)
    b = sequence_norm(WeightedValueSequence(c * v, w), d, p)
    assert np.isclose(b, abs(c) * a, rtol=1e-10, atol=1e-300)


@given(seeds, st.floats(0.1, 4.0), st.floats(0.1, 4.0), st.booleans())
def test_k_matrix_transpose(seed, p, q, normalized):
    seq = PointSequence(cloud(seed, 10, 2, 0.99))
    assert np.allclose(k_matrix(seq, p, q, normalized), k_matrix(seq, q, p, normalized).T,
                       rtol=1e-10)


@given(seeds, ball_points(n=1, max_radius=0.8))
def test_transport_round_trip(seed, a):
    sp = SpaceParams(2.0, 1.0)
    f = KernelPower(cloud(seed, 1, 1, 0.9)[0], 1.3)
    z = cloud(seed + 1, 20, 1)
    g = transport_inverse(transport_forward(f, a, sp), a, sp)
    assert np.allclose(g(z), f(z), rtol=1e-9)


@given(seeds)
def test_oracle_interpolates(seed):
    pts = cloud(seed, 5, 1, 0.8)
    d = np.abs(pts[:, None, 0] - pts[None, :, 0]) + np.eye(5)
    if d.min() < 0.05:
        return
    rng = np.random.default_rng(seed)
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    prob = InterpolationProblem.create(pts, v, SpaceParams(1.0, 1.0))
    f = oracle_solve(prob, regularize=True)
    scale = np.abs(v).max()
    assert np.allclose(f(pts), v, atol=1e-6 * scale)


@given(ball_points(n=2, max_radius=0.99))
def test_boundary_distance_in_unit_interval(z):
    assert 0 < boundary_distance(z) <= 1
