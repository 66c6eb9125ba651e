import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import invariants
from locc_lab.tensor import Ket, inner, tensor

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
seeds = st.integers(0, 2 ** 32 - 1)


def cvectors(n):
    return st.tuples(arrays(float, n, elements=finite), arrays(float, n, elements=finite)).map(
        lambda t: t[0] + 1j * t[1])


@settings(max_examples=1000)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(cvectors(n), cvectors(n))))
def test_cauchy_schwarz(pair):
    a, b = (Ket(x) for x in pair)
    assert abs(inner(a, b)) <= np.sqrt(inner(a, a).real * inner(b, b).real) * (1 + 1e-12) + 1e-9


@settings(max_examples=1000)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(cvectors(n), cvectors(n), cvectors(3))), finite, finite)
def test_tensor_bilinear(vecs, al, be):
    a1, a2, b = vecs
    left = np.asarray(tensor(Ket(al * a1 + be * a2), Ket(b)))
    right = al * np.asarray(tensor(Ket(a1), Ket(b))) + be * np.asarray(tensor(Ket(a2), Ket(b)))
    np.testing.assert_allclose(left, right, rtol=1e-9, atol=1e-6)


@settings(max_examples=1000)
@given(seeds)
def test_projector_completeness(seed):
    invariants.projector_completeness(np.random.default_rng(seed))


@settings(max_examples=1000)
@given(seeds)
def test_constraint_monotonicity(seed):
    invariants.constraint_monotonicity(np.random.default_rng(seed))


@settings(max_examples=1000)
@given(seeds)
def test_party_symmetry(seed):
    invariants.party_symmetry(np.random.default_rng(seed))
