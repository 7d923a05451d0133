import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polariton_nhqc.hilbert import (
    DimensionError,
    HilbertSpace,
    Operator,
    dagger,
    embed,
    expectation,
    fock_annihilation,
    identity,
    sigma_minus,
    sigma_plus,
    sigma_x,
    sigma_z,
    tensor,
)


def test_space_dimension_and_labels():
    s = HilbertSpace((2, 5))
    assert s.dim == 10
    assert s.basis_index((1, 3)) == 8
    assert tuple(s.labels()[8]) == (1, 3)
    assert s.basis_state((0, 0))[0] == 1


def test_bad_dimensions_rejected():
    with pytest.raises(DimensionError):
        HilbertSpace((2, 1))
    with pytest.raises(DimensionError):
        Operator(HilbertSpace((2,)), np.eye(3))
    with pytest.raises(DimensionError):
        sigma_z() @ fock_annihilation(3)


def test_transmon_conventions():
    assert np.allclose(sigma_z().matrix, np.diag([-1, 1]))
    assert np.allclose(sigma_minus().matrix, [[0, 1], [0, 0]])
    assert np.allclose(sigma_plus().matrix, sigma_minus().matrix.T)
    assert np.allclose(sigma_x().matrix, [[0, 1], [1, 0]])


@pytest.mark.parametrize("n", [3, 5, 8])
def test_truncated_commutator(n):
    a = fock_annihilation(n).matrix
    comm = a @ a.conj().T - a.conj().T @ a
    expected = np.eye(n)
    expected[-1, -1] = 1 - n   # truncation edge
    assert np.allclose(comm, expected)


def test_embed_matches_kron():
    space = HilbertSpace((2, 4))
    a = embed(fock_annihilation(4), 1, space).matrix
    assert np.allclose(a, np.kron(np.eye(2), fock_annihilation(4).matrix))
    with pytest.raises(IndexError):
        embed(sigma_z(), 2, space)


def test_expectation_vector_and_density():
    psi = np.array([0.6, 0.8j])
    rho = np.outer(psi, psi.conj())
    z = sigma_z()
    assert np.isclose(expectation(z, psi), 0.64 - 0.36)
    assert np.isclose(expectation(z, rho), 0.64 - 0.36)
    with pytest.raises(DimensionError):
        expectation(z, np.ones(3))


def _random_matrix(n, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 10_000))
def test_tensor_mixed_product(n, m, seed):
    sa, sb = HilbertSpace((n,)), HilbertSpace((m,))
    a1, a2 = Operator(sa, _random_matrix(n, seed)), Operator(sa, _random_matrix(n, seed + 1))
    b1, b2 = Operator(sb, _random_matrix(m, seed + 2)), Operator(sb, _random_matrix(m, seed + 3))
    lhs = tensor(a1, b1) @ tensor(a2, b2)
    rhs = tensor(a1 @ a2, b1 @ b2)
    assert np.allclose(lhs.matrix, rhs.matrix)
    assert np.allclose(dagger(tensor(a1, b1)).matrix, tensor(dagger(a1), dagger(b1)).matrix)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10_000))
def test_hermitian_check(n, seed):
    m = _random_matrix(n, seed)
    h = Operator(HilbertSpace((n,)), m + m.conj().T)
    assert h.is_hermitian()
    assert (h + identity(n) * 2.0).is_hermitian()
