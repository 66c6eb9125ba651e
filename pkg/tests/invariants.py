"""Invariant checks shared by the property tests and the acceptance run.

Each function takes a numpy Generator, draws one random instance and raises
AssertionError if the invariant fails.
"""
import numpy as np

from locc_lab.families import gen_example1, gen_example2
from locc_lab.protocol import MeasurementNode, Leaf, validate_node
from locc_lab.tensor import Ket, apply_local, inner, tensor
from locc_lab.verifier import build_constraints, hermitian_nullspace

EX1 = gen_example1()
EX2 = gen_example2()


def _cvec(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def cauchy_schwarz(rng):
    n = int(rng.integers(1, 9))
    a, b = Ket(_cvec(rng, n)), Ket(_cvec(rng, n))
    lhs = abs(inner(a, b))
    rhs = np.sqrt(inner(a, a).real * inner(b, b).real)
    assert lhs <= rhs * (1 + 1e-12) + 1e-300


def bilinearity(rng):
    n, m = (int(x) for x in rng.integers(1, 5, size=2))
    a1, a2, b = _cvec(rng, n), _cvec(rng, n), _cvec(rng, m)
    al, be = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    left = np.asarray(tensor(Ket(al * a1 + be * a2), Ket(b)))
    right = al * np.asarray(tensor(Ket(a1), Ket(b))) + be * np.asarray(tensor(Ket(a2), Ket(b)))
    np.testing.assert_allclose(left, right, atol=1e-10 * (1 + np.abs(right).max()))
    left2 = np.asarray(tensor(Ket(b), Ket(al * a1 + be * a2)))
    right2 = al * np.asarray(tensor(Ket(b), Ket(a1))) + be * np.asarray(tensor(Ket(b), Ket(a2)))
    np.testing.assert_allclose(left2, right2, atol=1e-10 * (1 + np.abs(right2).max()))


def projector_completeness(rng):
    d = int(rng.integers(2, 7))
    q, _ = np.linalg.qr(_cvec(rng, d * d).reshape(d, d))
    cuts = sorted(set(int(x) for x in rng.integers(1, d, size=int(rng.integers(0, d)))))
    groups = np.split(np.arange(d), cuts)
    projs = [q[:, g] @ q[:, g].conj().T for g in groups]
    node = MeasurementNode("B", (d,), projs, [Leaf() for _ in projs])
    validate_node(node)
    dims = (2, d, 3)
    v = _cvec(rng, 6 * d)
    v /= np.linalg.norm(v)
    total = sum(np.vdot(w, w).real for w in (apply_local(P, v, dims, 1) for P in projs))
    assert abs(total - 1) <= 1e-9


def constraint_monotonicity(rng):
    src = EX2 if rng.random() < 0.5 else EX1
    n = len(src)
    big = sorted(rng.choice(n, size=int(rng.integers(2, n + 1)), replace=False).tolist())
    small = sorted(rng.choice(big, size=int(rng.integers(2, len(big) + 1)), replace=False).tolist())
    party = int(rng.integers(0, 3))
    d_big = hermitian_nullspace(build_constraints(src.subset(big), party)).dim
    d_small = hermitian_nullspace(build_constraints(src.subset(small), party)).dim
    assert d_small >= d_big


def party_symmetry(rng):
    keep = sorted(rng.choice(len(EX1), size=int(rng.integers(2, len(EX1) + 1)), replace=False).tolist())
    sub = EX1.subset(keep)
    party = int(rng.integers(0, 3))
    before = hermitian_nullspace(build_constraints(sub, party)).dim
    after = hermitian_nullspace(build_constraints(sub.cyclic_shift(), (party + 1) % 3)).dim
    assert before == after


ALL = {
    "cauchy-schwarz": cauchy_schwarz,
    "tensor bilinearity": bilinearity,
    "projector completeness": projector_completeness,
    "constraint monotonicity": constraint_monotonicity,
    "party symmetry": party_symmetry,
}
