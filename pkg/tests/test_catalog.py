import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qslant.catalog import (
    CATALOG_NAMES,
    INV_SQRT3,
    catalog_case,
    quaternionic_isometry,
    quaternionic_subspace,
    random_slant_subspace,
    search_slant_plane,
    slant_4space,
    slant_plane,
    totally_real_subspace,
)
from qslant.errors import DimensionError, ParameterError
from qslant.quat import decompose, slant_test, standard_triple

EXPECTED_KIND = {
    "slant-plane-tg": "proper", "slant-plane-random": "proper", "slant4-tg": "proper",
    "slant4-c4": "proper", "slant4-random": "proper", "delta-totally-real": "totally_real",
    "totally-real-random": "totally_real", "quaternionic-tg": "quaternionic", "kernel": "proper",
}


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_classification(name):
    d = catalog_case(f"catalog:{name}")
    sr = slant_test(d.decomposition())
    assert sr.residual <= 1e-12 and sr.kind == EXPECTED_KIND[name]


def test_slant_4space_angle():
    sr = slant_test(decompose(standard_triple(2), slant_4space()))
    assert abs(sr.cos2 - 1 / 3) <= 1e-12


@given(st.integers(0, 2**31 - 1))
def test_isometry_commutes(seed):
    Q = quaternionic_isometry(2, np.random.default_rng(seed))
    assert np.allclose(Q.T @ Q, np.eye(8), atol=1e-12)
    for J in standard_triple(2).J:
        assert np.allclose(Q @ J, J @ Q, atol=1e-12)


@given(st.integers(0, 2**31 - 1), st.sampled_from([2, 4]))
def test_random_slant_subspace_is_slant(seed, n):
    sr = slant_test(decompose(standard_triple(2), random_slant_subspace(n, seed)))
    assert sr.is_slant and sr.residual <= 1e-12 and sr.kind == "proper"


def test_constructor_errors():
    with pytest.raises(DimensionError):
        random_slant_subspace(3, 0)
    with pytest.raises(DimensionError):
        totally_real_subspace(2, 3)
    with pytest.raises(DimensionError):
        quaternionic_subspace(1, 2)
    with pytest.raises(ParameterError):
        catalog_case("catalog:nope")
    with pytest.raises(ParameterError):
        catalog_case("catalog:slant-plane-tg?c=abc")
    with pytest.raises(ParameterError):
        catalog_case("file:slant-plane-tg")


def test_boundary_angle_plane():
    sr = slant_test(decompose(standard_triple(2), slant_plane(np.arccos(INV_SQRT3))))
    assert sr.is_slant and abs(sr.cos2 - 1 / 3) <= 1e-12


@settings(max_examples=3)
@given(st.floats(0.05, 0.3))
def test_search_recovers_feasible_angle(cos2):
    sub, res = search_slant_plane(cos2, seed=0)
    assert res <= 1e-6
    assert abs(slant_test(decompose(standard_triple(2), sub), 1e-6).cos2 - cos2) <= 1e-6
