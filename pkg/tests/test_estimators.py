import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from locc_lab.estimators import ProtocolSimulator, TrivialityVerifier
from locc_lab.families import computational_basis, gen_example1
from locc_lab.protocol import Leaf, make_node
from locc_lab.validation import check_state_set, check_tolerance, parse_resource


def test_verifier_params_and_clone():
    v = TrivialityVerifier(rel_tol=1e-7)
    assert v.get_params() == {"rel_tol": 1e-7, "ortho_tol": 1e-10}
    assert clone(v).get_params() == v.get_params()


def test_verifier_transform_predict(example1):
    X = [example1, computational_basis((3, 3, 3))]
    v = TrivialityVerifier().fit(X)
    assert v.n_sets_ == 2
    np.testing.assert_array_equal(v.transform(X), [[1, 1, 1], [3, 3, 3]])
    np.testing.assert_array_equal(v.predict(X), [True, False])
    assert v.fit_transform(example1).shape == (1, 3)


def test_verifier_bad_params(example1):
    with pytest.raises(ValueError):
        TrivialityVerifier(rel_tol=-1).fit(example1)
    with pytest.raises(TypeError):
        TrivialityVerifier().fit(42)


def test_simulator_builtin(example1):
    sim = ProtocolSimulator("ghz-c6").fit(example1)
    assert sim.perfect_ and sim.score() >= 1 - 1e-9
    assert list(sim.predict()) == example1.labels


def test_simulator_resource_override(example1):
    sim = ProtocolSimulator("bell-c6", resource="bell:BC").fit(example1)
    assert not sim.perfect_ and sim.score() < 1


def test_simulator_custom_tree():
    s = computational_basis((2, 1, 1))
    tree = make_node("A", (2,), [(np.diag([1, 0]), Leaf("e_1"), "0"), (np.diag([0, 1]), Leaf("e_2"), "1")])
    sim = ProtocolSimulator(tree)
    assert sim.score(s) == 1.0
    with pytest.raises(NotFittedError):
        sim.predict()


def test_validation_helpers(example1):
    assert check_state_set(example1.to_dict()).labels == example1.labels
    assert len(check_state_set(example1.to_json())) == 36
    with pytest.raises(ValueError):
        check_tolerance(float("nan"))
    assert len(parse_resource("bell2:CA")) == 2
    assert parse_resource("none") == [] and parse_resource(None) == []
    with pytest.raises(ValueError):
        parse_resource("werner")
    assert parse_resource("ghz")[0].holders == ("A", "B", "C")
