import numpy as np
import pytest

from twotone.errors import DimensionError
from twotone.operators import (
    Operator,
    SpaceConfig,
    annihilation,
    identity,
    number,
    qubit_ops,
    tensor,
)


def test_annihilation_smallest_truncation():
    a = annihilation(2)
    assert np.array_equal(a.entries, np.array([[0, 1], [0, 0]], dtype=complex))


def test_number_operator_is_fock_diagonal():
    n = number(4)
    assert np.array_equal(n.entries, np.diag([0.0, 1.0, 2.0, 3.0]).astype(complex))


def test_commutator_truncation_artifact():
    # [a, a+] is the identity except the top diagonal entry, which picks up
    # -(n_fock - 1) from the cut ladder
    a = annihilation(10)
    comm = a @ a.dag() - a.dag() @ a
    expected = np.eye(10, dtype=complex)
    expected[9, 9] = -9.0
    assert np.allclose(comm.entries, expected, atol=1e-14)


@pytest.mark.parametrize("n_fock", range(2, 13))
def test_number_diagonal_exact_for_all_sizes(n_fock):
    n = number(n_fock)
    assert np.array_equal(n.entries, np.diag(np.arange(n_fock, dtype=float)).astype(complex))


def test_annihilation_rejects_tiny_space():
    with pytest.raises(DimensionError):
        annihilation(1)


def test_qubit_ops_ground_state_eigenvalue():
    sz, sp, sm = qubit_ops()
    g = np.array([1.0, 0.0], dtype=complex)
    assert np.array_equal(sz.entries @ g, -g)


def test_qubit_ops_raising_and_projectors():
    sz, sp, sm = qubit_ops()
    g = np.array([1.0, 0.0], dtype=complex)
    e = np.array([0.0, 1.0], dtype=complex)
    assert np.array_equal(sp.entries @ g, e)
    assert np.array_equal((sp @ sm).entries, np.diag([0.0, 1.0]).astype(complex))
    two_level_identity = sm @ sp + sp @ sm
    assert np.array_equal(two_level_identity.entries, np.eye(2, dtype=complex))


def test_tensor_identity():
    i2 = identity((2,))
    assert np.array_equal(tensor(i2, i2).entries, np.eye(4, dtype=complex))


def test_tensor_number_sigma_z_eigenvalues():
    # brute-force eigensolve of (a+a) (x) sigma_z for three Fock levels
    sz = qubit_ops()[0]
    op = tensor(number(3), sz)
    eig = np.sort(np.linalg.eigvalsh(op.entries))
    assert np.allclose(eig, sorted([0.0, 0.0, -1.0, 1.0, -2.0, 2.0]), atol=1e-14)


def test_tensor_trace_multiplicative():
    proj = Operator(np.diag([0.0, 1.0]).astype(complex), (2,))
    assert tensor(proj, identity((2,))).trace() == pytest.approx(2.0)


def test_tensor_associative_on_integer_matrices():
    a = Operator(np.array([[1, 2], [3, 4]], dtype=complex), (2,))
    b = Operator(np.array([[0, 1], [1, 0]], dtype=complex), (2,))
    c = Operator(np.array([[5, 0], [0, 7]], dtype=complex), (2,))
    left = tensor(tensor(a, b), c)
    right = tensor(a, tensor(b, c))
    assert np.array_equal(left.entries, right.entries)


def test_constructors_deterministic():
    assert np.array_equal(annihilation(7).entries, annihilation(7).entries)
    assert np.array_equal(qubit_ops()[1].entries, qubit_ops()[1].entries)


def test_cross_space_composition_rejected():
    a = annihilation(4)
    sz = qubit_ops()[0]
    with pytest.raises(DimensionError):
        _ = a @ sz
    with pytest.raises(DimensionError):
        _ = a + Operator(np.eye(4, dtype=complex), (2, 2))


def test_space_config_invariants():
    space = SpaceConfig(n_fock=10, n_qubit=2)
    assert space.dim == 20 and space.dims == (10, 2)
    with pytest.raises(DimensionError):
        SpaceConfig(n_fock=1, n_qubit=2)
    with pytest.raises(DimensionError):
        SpaceConfig(n_fock=4, n_qubit=1)


def test_operator_requires_square():
    with pytest.raises(DimensionError):
        Operator(np.zeros((2, 3)), (2,))
