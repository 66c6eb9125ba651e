import json

import numpy as np
import pytest

from locc_lab.families import (Family, StateSet, check_orthogonality, computational_basis,
                               expected_count, gen_example1, gen_example2, gen_theorem1,
                               gen_theorem2, gen_theorem3, gen_theorem4, gen_theorem5,
                               gen_theorem6, generate, overlap_matrix)


def _sigs(states):
    return {s.signature for s in states}


@pytest.mark.parametrize("family,params,count", [
    ("example1", {}, 36),
    ("example2", {}, 31),
    ("t1", {"d": 3}, 36),
    ("t1", {"d": 5}, 72),
    ("t1", {"d": 7}, 108),
    ("t2", {"d": 4}, 54),
    ("t2", {"d": 6}, 90),
    ("t3", {"k": 2, "l": 2, "m": 2}, 31),
    ("t3", {"k": 3, "l": 3, "m": 3}, 49),
    ("t3", {"k": 2, "l": 3, "m": 4}, 49),
    ("t4", {"k": 2, "l": 2, "m": 2}, 28),
    ("t5", {"k": 2, "l": 2, "m": 2}, 25),
    ("t6", {"k": 3, "l": 3, "m": 3}, 40),
    ("t6", {"k": 3, "l": 4, "m": 5}, 58),
])
def test_counts(family, params, count):
    states = generate(family, params)
    assert len(states) == count == expected_count(family, params)


@pytest.mark.parametrize("family,params,dims", [
    ("t1", {"d": 5}, (10, 10, 10)),
    ("t2", {"d": 4}, (8, 8, 8)),
    ("t3", {"k": 2, "l": 3, "m": 4}, (5, 7, 9)),
    ("t4", {"k": 2, "l": 3, "m": 4}, (5, 7, 8)),
    ("t5", {"k": 2, "l": 3, "m": 4}, (5, 6, 8)),
    ("t6", {"k": 3, "l": 3, "m": 3}, (6, 6, 6)),
])
def test_dims(family, params, dims):
    assert generate(family, params).dims == dims


@pytest.mark.parametrize("family,params", [
    ("example1", {}), ("example2", {}), ("t1", {"d": 5}), ("t2", {"d": 4}), ("t2", {"d": 6}),
    ("t3", {"k": 2, "l": 3, "m": 2}), ("t4", {"k": 3, "l": 2, "m": 2}),
    ("t5", {"k": 2, "l": 2, "m": 3}), ("t6", {"k": 3, "l": 4, "m": 3}),
])
def test_orthogonal_and_normalized(family, params):
    states = generate(family, params)
    rep = check_orthogonality(states)
    assert rep.passed and rep.max_overlap <= 1e-10
    for s in states:
        assert abs(np.linalg.norm(s.vector()) - 1) < 1e-12


def test_orthogonality_oracle_full_vectors(example2):
    vecs = np.array([s.vector() for s in example2])
    gram = np.abs(vecs.conj() @ vecs.T)
    np.testing.assert_allclose(gram, overlap_matrix(example2), atol=1e-14)
    np.testing.assert_allclose(gram, np.eye(len(example2)), atol=1e-12)


def test_example1_equals_t1_d3(example1):
    assert _sigs(example1) == _sigs(gen_theorem1(3))


def test_example2_equals_t3_222(example2, t3_222):
    assert _sigs(example2) == _sigs(t3_222)


def test_example1_listed_states(example1):
    sigs = _sigs(example1)
    for s in ["|2+3>|0>|3>", "|2+3>|2>|5>", "|2+3>|2>|3>", "|2-3>|2>|3>", "|0+1>|0>|3>",
              "|4-5>|2>|5>", "|2>|5>|4+5>"]:
        assert s in sigs
    assert example1.by_label("psi_7").signature == "|2+3>|2>|3>"


def test_example2_basis_states(example2):
    plain = {s.signature for s in example2 if "+" not in s.signature and "-" not in s.signature}
    assert plain == {"|1>|2>|2>", "|2>|2>|2>", "|3>|2>|2>", "|2>|1>|2>", "|2>|3>|2>",
                     "|2>|2>|1>", "|2>|2>|3>"}


@pytest.mark.parametrize("gen", [gen_example1, lambda: gen_theorem1(5), lambda: gen_theorem2(4)])
def test_cyclic_symmetry(gen):
    states = gen()
    assert _sigs(states.cyclic_shift()) == _sigs(states)


@pytest.mark.parametrize("call,msg", [
    (lambda: gen_theorem1(4), "odd"),
    (lambda: gen_theorem1(1), "odd"),
    (lambda: gen_theorem2(3), "even"),
    (lambda: gen_theorem2(2), "even"),
    (lambda: gen_theorem3(1, 2, 2), "k must be"),
    (lambda: gen_theorem6(2, 3, 3), "k must be"),
    (lambda: gen_theorem4(2, 2.5, 2), "integer"),
    (lambda: generate("t3", {"k": 2}), "needs parameter"),
])
def test_invalid_params(call, msg):
    with pytest.raises(ValueError, match=msg):
        call()


def test_t4_t5_t6_reuse_level_two():
    # the listings fix one party at level 2 for several blocks regardless of k, l, m
    for gen in (gen_theorem4, gen_theorem5):
        assert any("|2>" in s.signature for s in gen(3, 3, 3))
    assert len(gen_theorem6(3, 3, 3)) == 40


def test_json_round_trip_byte_identical(example1):
    doc = example1.to_json()
    back = StateSet.from_json(doc)
    assert back.to_json() == doc
    for a, b in zip(example1, back):
        assert a.vector().tobytes() == b.vector().tobytes()
    assert back.family is Family.EXAMPLE1


def test_json_schema(example2):
    doc = json.loads(example2.to_json())
    assert set(doc) == {"dims", "family", "params", "states"}
    assert doc["dims"] == [5, 5, 5]
    assert len(doc["states"][0]["factors"]) == 3


def test_subset_and_labels(example1):
    sub = example1.subset([0, 1, 2])
    assert sub.labels == ["psi_1", "psi_2", "psi_3"]
    assert sub.family is Family.CUSTOM and sub.params["parent"] == "example1"
    with pytest.raises(KeyError):
        example1.by_label("nope")


def test_duplicate_labels_rejected(example1):
    with pytest.raises(ValueError):
        StateSet(example1.dims, [example1[0], example1[0]])


def test_computational_basis():
    cb = computational_basis((2, 3, 2))
    assert len(cb) == 12 and check_orthogonality(cb).passed
