import numpy as np
import pytest

from locc_lab.families import (ProductState, StateSet, computational_basis, gen_example1,
                               gen_example2, gen_theorem1, gen_theorem2, gen_theorem3,
                               gen_theorem4, gen_theorem5, gen_theorem6)
from locc_lab.tensor import basis_ket, pm_ket
from locc_lab.verifier import (OrthogonalityError, build_constraints, hermitian_basis,
                               hermitian_nullspace, matrix_to_params, params_to_matrix,
                               verify_nonlocality)


def oracle_dim(states, party):
    """Solution-space dimension from full tensor-product vectors, bypassing
    the factorised constraint builder."""
    d = states.dims
    vecs = np.array([s.vector() for s in states])
    iu = np.triu_indices(len(states), 1)
    cols = []
    for E in hermitian_basis(d[party]):
        ops = [np.eye(x) for x in d]
        ops[party] = E
        M = vecs.conj() @ np.kron(np.kron(ops[0], ops[1]), ops[2]) @ vecs.T
        cols.append(np.concatenate([M[iu].real, M[iu].imag]))
    A = np.array(cols).T
    return d[party] ** 2 - np.linalg.matrix_rank(A, tol=1e-8 * np.linalg.norm(A, 2))


def _drop_a_superpositions(states):
    keep = [i for i, s in enumerate(states) if "+" not in s.signature.split(">")[0]
            and "-" not in s.signature.split(">")[0]]
    return states.subset(keep)


def test_hermitian_basis_trace_orthonormal():
    hb = hermitian_basis(4)
    gram = np.einsum("kij,lji->kl", hb, hb)
    np.testing.assert_allclose(gram, np.eye(16), atol=1e-14)
    for h in hb:
        np.testing.assert_allclose(h, h.conj().T)


def test_params_round_trip(rng):
    x = rng.normal(size=9)
    np.testing.assert_allclose(matrix_to_params(params_to_matrix(x, 3)), x, atol=1e-13)


@pytest.mark.parametrize("gen", [gen_example1, gen_example2], ids=["example1", "example2"])
def test_matches_full_vector_oracle(gen):
    states = gen()
    v = verify_nonlocality(states)
    assert v.dims == tuple(oracle_dim(states, p) for p in range(3)) == (1, 1, 1)


@pytest.mark.parametrize("states", [
    gen_example1(), gen_theorem1(5), gen_theorem2(4), gen_theorem3(2, 2, 2), gen_theorem3(2, 3, 4),
    gen_theorem4(2, 2, 2), gen_theorem5(2, 2, 2), gen_theorem6(3, 3, 3),
], ids=["ex1", "t1d5", "t2d4", "t3", "t3-234", "t4", "t5", "t6"])
def test_locally_trivial(states):
    v = verify_nonlocality(states)
    assert v.locally_trivial and v.verdict == "locally-trivial"
    for sp in v.spaces:
        assert sp.dim == 1 and sp.identity_residual <= 1e-8


@pytest.mark.parametrize("dims", [(2, 2, 2), (3, 3, 3), (2, 3, 4)])
def test_computational_basis_is_diagonal(dims):
    v = verify_nonlocality(computational_basis(dims))
    assert v.dims == dims and v.verdict == "nontrivial"
    for sp in v.spaces:
        for op in sp.basis:
            m = np.asarray(op)
            np.testing.assert_allclose(m - np.diag(np.diag(m)), 0, atol=1e-10)


def test_dropping_a_pairs_opens_a_measurements(example1):
    sub = _drop_a_superpositions(example1)
    assert len(sub) == 24
    v = verify_nonlocality(sub)
    assert v.dims == (6, 14, 14) == tuple(oracle_dim(sub, p) for p in range(3))
    assert not v.locally_trivial


def test_monotone_on_nested_prefixes(example1):
    # frozen from the full-vector oracle
    expected = [(36, 36, 34), (32, 30, 30), (23, 23, 23), (14, 14, 14), (3, 3, 3), (2, 2, 2), (1, 1, 1)]
    got = [verify_nonlocality(example1.subset(range(n))).dims for n in (4, 8, 12, 18, 24, 30, 36)]
    assert got == expected
    for a, b in zip(got, got[1:]):
        assert all(x >= y for x, y in zip(a, b))


@pytest.mark.parametrize("rtol", [1e-6, 1e-8, 1e-10])
def test_threshold_insensitive(example1, rtol):
    assert verify_nonlocality(example1, rtol=rtol).dims == (1, 1, 1)
    assert verify_nonlocality(computational_basis((3, 3, 3)), rtol=rtol).dims == (3, 3, 3)


def test_party_symmetry(example1):
    sub = _drop_a_superpositions(example1)
    a, b, c = verify_nonlocality(sub).dims
    assert verify_nonlocality(sub.cyclic_shift()).dims == (c, a, b)


def test_no_rows_when_other_factors_orthogonal(example1):
    # psi_3 and psi_29 share A and B factors and differ only in C
    i3, i29 = example1.labels.index("psi_3"), example1.labels.index("psi_29")
    pair = {i3, i29}
    rows_a = [p for p in build_constraints(example1, "A").provenance if set(p[:2]) == pair]
    rows_c = [p for p in build_constraints(example1, "C").provenance if set(p[:2]) == pair]
    assert rows_a == []
    assert rows_c == [(i3, i29, "re"), (i3, i29, "im")]


def test_row_count_frozen(example1):
    assert build_constraints(example1, "A").n_rows == 120
    assert build_constraints(example1, 1).n_rows == 120


def test_empty_system_gives_full_space():
    s = StateSet((2, 2, 2), [ProductState("x", (basis_ket(2, 0), basis_ket(2, 0), basis_ket(2, 0))),
                             ProductState("y", (basis_ket(2, 1), basis_ket(2, 1), basis_ket(2, 1)))])
    sp = hermitian_nullspace(build_constraints(s, "A"))
    assert sp.dim == 4 and not sp.trivial


def test_errors():
    with pytest.raises(ValueError):
        build_constraints(StateSet((2, 2, 2), []), "A")
    with pytest.raises(ValueError):
        build_constraints(computational_basis((2, 2, 2)), "D")
    bad = StateSet((2, 2, 2), [ProductState("x", (basis_ket(2, 0),) * 3),
                               ProductState("y", (pm_ket(2, 0, "+"), basis_ket(2, 0), basis_ket(2, 0)))])
    with pytest.raises(OrthogonalityError):
        verify_nonlocality(bad)


def test_verdict_dict(example2):
    doc = verify_nonlocality(example2).to_dict()
    assert doc["verdict"] == "locally-trivial"
    assert [p["party"] for p in doc["per_party"]] == ["A", "B", "C"]
    assert all(p["dim"] == 1 and p["trivial"] for p in doc["per_party"])
    assert doc["orthogonality"]["passed"]
