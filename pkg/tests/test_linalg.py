import numpy as np
from hypothesis import given, strategies as st

from qslant.errors import QSFError
from qslant.linalg import complement, contained_in, max_principal_angle, null_space, orth, random_orthonormal

seeds = st.integers(0, 2**31 - 1)


@given(seeds, st.integers(1, 7))
def test_complement_is_orthogonal_and_spanning(seed, k):
    a = random_orthonormal(np.random.default_rng(seed), 8, k)
    c = complement(a)
    full = np.column_stack([a, c])
    assert np.allclose(full.T @ full, np.eye(8), atol=1e-12)


@given(seeds)
def test_angles_and_containment(seed):
    rng = np.random.default_rng(seed)
    a = random_orthonormal(rng, 6, 3)
    mixed = a @ random_orthonormal(rng, 3, 3)
    assert max_principal_angle(a, mixed) <= 1e-7
    assert contained_in(a[:, :2], a) <= 1e-12
    assert abs(max_principal_angle(a, complement(a)) - np.pi / 2) <= 1e-12
    assert max_principal_angle(a, a[:, :2]) == np.pi / 2


def test_rank_helpers():
    m = np.array([[1.0, 0, 0], [2.0, 0, 0]])
    assert orth(m.T).shape == (3, 1)
    assert null_space(m).shape == (3, 2)
    assert max_principal_angle(np.zeros((3, 0)), np.zeros((3, 0))) == 0.0


def test_errors_are_value_errors():
    assert issubclass(QSFError, ValueError)
