import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qslant.catalog import random_point_datum, random_slant_subspace, slant_4space
from qslant.errors import ContainmentError, DimensionError, ParameterError
from qslant.linalg import complement, random_orthonormal
from qslant.pointwise import gauss_curvature, scalar_curvature
from qslant.ricci import (
    PlaneSection,
    ThetaConfig,
    _analytic_gradient,
    _fd_gradient,
    brute_force_theta_k,
    coordinate_average_residual,
    plane_scalar_curvature,
    ricci_curvature,
    ricci_form,
    theta_k,
)

seeds = st.integers(0, 2**31 - 1)


def curvature(seed, n=4, c=4.0):
    return gauss_curvature(random_point_datum(random_slant_subspace(n, seed), c, seed=seed + 7))


def ricci_by_completion(R, L, X):
    """Sum of sectional curvatures of X against an orthonormal completion inside L."""
    coords = L.basis.T @ X
    rest = L.basis @ complement(coords[:, None])
    return sum(np.einsum("p,pqrs,q,r,s->", X, R.R, f, f, X) for f in rest.T)


@given(seeds)
def test_ricci_curvature_matches_completion(seed):
    R = curvature(seed)
    rng = np.random.default_rng(seed)
    L = PlaneSection(random_orthonormal(rng, 4, 3))
    X = L.basis @ rng.standard_normal(3)
    X /= np.linalg.norm(X)
    assert abs(ricci_curvature(R, L, X) - ricci_by_completion(R, L, X)) <= 1e-10
    q = ricci_form(R.R, L.basis)
    y = L.basis.T @ X
    assert abs(y @ q @ y - ricci_curvature(R, L, X)) <= 1e-10


def test_ricci_curvature_errors():
    R = curvature(1)
    L = PlaneSection.coordinate(4, [0, 1])
    with pytest.raises(ContainmentError):
        ricci_curvature(R, L, np.eye(4)[2])
    with pytest.raises(ContainmentError):
        ricci_curvature(R, L, 2 * np.eye(4)[0])
    with pytest.raises(DimensionError):
        PlaneSection(np.eye(4)[:, :1])


@pytest.mark.parametrize("k", [0, 1, 5, 2.5])
def test_theta_k_rejects_bad_k(k):
    with pytest.raises(ParameterError):
        theta_k(curvature(0), k)


@given(seeds, st.sampled_from([-4.0, 0.0, 4.0]))
def test_theta_2_on_surface_is_gauss_curvature(seed, c):
    R = curvature(seed, n=2, c=c)
    assert abs(theta_k(R, 2).value - R.sectional(0, 1)) <= 1e-12
    assert abs(brute_force_theta_k(R, 2, samples=10) - R.sectional(0, 1)) <= 1e-12


@given(seeds)
def test_theta_n_is_min_ricci(seed):
    R = curvature(seed)
    ric = np.einsum("pqqs->ps", R.R)
    expected = np.linalg.eigvalsh(ric)[0] / 3
    assert abs(theta_k(R, 4).value - expected) <= 1e-10


@given(seeds, st.sampled_from([2, 3]))
def test_coordinate_average(seed, k):
    tau, avg = coordinate_average_residual(curvature(seed), k)
    assert abs(tau - avg) <= 1e-10
    assert abs(tau - scalar_curvature(curvature(seed))) <= 1e-12


def test_plane_scalar_curvature_full_plane():
    R = curvature(3)
    assert abs(plane_scalar_curvature(R, PlaneSection(np.eye(4))) - scalar_curvature(R)) <= 1e-12


@settings(max_examples=5)
@given(seeds, st.sampled_from([2, 3]))
def test_theta_k_is_below_every_sampled_plane(seed, k):
    R = curvature(seed)
    val = theta_k(R, k, ThetaConfig(starts=16, seed=seed)).value
    rng = np.random.default_rng(seed)
    for _ in range(50):
        B = random_orthonormal(rng, 4, k)
        assert val <= np.linalg.eigvalsh(ricci_form(R.R, B))[0] / (k - 1) + 1e-8


def test_theta_k_deterministic_and_certified():
    R = curvature(11)
    a = theta_k(R, 2, ThetaConfig(starts=8, seed=5))
    b = theta_k(R, 2, ThetaConfig(starts=8, seed=5))
    assert a.value == b.value and np.array_equal(a.argmin_plane.basis, b.argmin_plane.basis)
    X, L = a.argmin_vector, a.argmin_plane
    assert abs(ricci_curvature(R, L, X) - a.value) <= 1e-10
    assert a.converged


def test_gradients_agree(rng):
    R = curvature(2).R
    B = np.stack([random_orthonormal(rng, 4, 2) for _ in range(3)])
    assert np.allclose(_analytic_gradient(R, B), _fd_gradient(R, B, 1e-6), atol=1e-6)


def test_analytic_gradient_reaches_same_value():
    R = curvature(4)
    fd = theta_k(R, 2, ThetaConfig(starts=16, seed=1)).value
    an = theta_k(R, 2, ThetaConfig(starts=16, seed=1, gradient="analytic")).value
    assert abs(fd - an) <= 1e-6


def test_oracle_prefix_consistent():
    R = curvature(9)
    few = brute_force_theta_k(R, 2, samples=5000, refine=0)
    many = brute_force_theta_k(R, 2, samples=10000, refine=0)
    assert many <= few


def test_optimizer_matches_oracle_on_slant4():
    R = gauss_curvature(random_point_datum(slant_4space(), 4.0, seed=21))
    opt = theta_k(R, 3, ThetaConfig(starts=32)).value
    ora = brute_force_theta_k(R, 3, samples=20_000)
    assert abs(opt - ora) <= 1e-4
