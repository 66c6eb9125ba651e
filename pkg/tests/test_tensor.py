import numpy as np
import pytest

from locc_lab.tensor import (Ket, Operator, apply_local, apply_projector, basis_ket, inner,
                             is_projector, kron_all, outer, pm_ket, tensor)


def test_basis_ket_and_range():
    k = basis_ket(4, 2)
    assert k.normalized
    np.testing.assert_array_equal(np.asarray(k), [0, 0, 1, 0])
    with pytest.raises(IndexError):
        basis_ket(3, 3)
    with pytest.raises(IndexError):
        basis_ket(3, -1)


@pytest.mark.parametrize("sign,expected", [("+", 1), ("-", -1), (1, 1), (-1, -1)])
def test_pm_ket(sign, expected):
    k = np.asarray(pm_ket(6, 2, sign))
    assert np.isclose(k[2], 1 / np.sqrt(2)) and np.isclose(k[3], expected / np.sqrt(2))
    assert np.isclose(np.vdot(k, k).real, 1.0, atol=1e-12)


def test_pm_ket_needs_successor():
    with pytest.raises(IndexError):
        pm_ket(6, 5, "+")
    with pytest.raises(ValueError):
        pm_ket(6, 1, "x")


def test_ket_normalized_tag_checked():
    with pytest.raises(ValueError):
        Ket([1.0, 1.0], normalized=True)
    Ket([1.0, 1.0])


def test_inner_conjugates_first_argument():
    a = Ket([1j, 0])
    b = Ket([1, 0])
    assert inner(a, b) == -1j
    with pytest.raises(ValueError):
        inner(Ket([1, 0]), Ket([1, 0, 0]))


def test_tensor_ordering_first_factor_slowest():
    v = np.asarray(tensor(basis_ket(2, 1), basis_ket(3, 0)))
    assert np.flatnonzero(v).tolist() == [3]


def test_orthogonal_pair_in_pm():
    assert abs(inner(pm_ket(6, 2, "+"), pm_ket(6, 2, "-"))) < 1e-15


def test_operator_tags():
    P = Operator.projector(outer(np.asarray(pm_ket(3, 0, "+"))))
    assert "hermitian" in P.tags
    with pytest.raises(ValueError):
        Operator(np.array([[0, 1], [0, 0]]), frozenset({"hermitian"}))
    with pytest.raises(ValueError):
        Operator.projector(2 * np.eye(2))


def test_apply_projector_prob_and_prune():
    P = Operator.projector(np.diag([1, 0]).astype(complex))
    w, p, post = apply_projector(P, pm_ket(2, 0, "+"))
    assert np.isclose(p, 0.5)
    np.testing.assert_allclose(np.asarray(post), [1, 0])
    _, p0, post0 = apply_projector(P, basis_ket(2, 1))
    assert p0 == 0.0 and post0 is None


def test_apply_local_matches_kron():
    rng = np.random.default_rng(1)
    dims = (2, 3, 4)
    v = rng.normal(size=24) + 1j * rng.normal(size=24)
    op = rng.normal(size=(3, 3))
    full = kron_all([np.eye(2), op, np.eye(4)])
    np.testing.assert_allclose(apply_local(op, v, dims, 1), full @ v, atol=1e-12)


def test_is_projector():
    assert is_projector(np.eye(3))
    assert not is_projector(np.diag([1, 0.5]))
