"""scikit-learn style front ends for the verifier and the protocol simulator."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .protocol import Leaf, MeasurementNode, run_protocol, verify_perfect
from .protocols import builtin_for
from .tensor import ORTHO_TOL
from .validation import check_state_set, check_state_sets, check_tolerance, parse_resource
from .verifier import RANK_RTOL, verify_nonlocality


class TrivialityVerifier(TransformerMixin, BaseEstimator):
    """Per-party orthogonality-preserving measurement check.

    X is a StateSet or a sequence of StateSets. `transform` returns an
    (n_sets, 3) array of solution-space dimensions for parties A, B, C;
    `predict` returns True where every party is locally trivial.
    """

    def __init__(self, rel_tol=RANK_RTOL, ortho_tol=ORTHO_TOL):
        self.rel_tol = rel_tol
        self.ortho_tol = ortho_tol

    def _check_params(self):
        return check_tolerance(self.rel_tol, "rel_tol"), check_tolerance(self.ortho_tol, "ortho_tol")

    def verify(self, states):
        rtol, otol = self._check_params()
        return verify_nonlocality(check_state_set(states), rtol, otol)

    def fit(self, X, y=None):
        sets = check_state_sets(X)
        self.verdicts_ = [self.verify(s) for s in sets]
        self.n_sets_ = len(sets)
        return self

    def transform(self, X):
        return np.array([self.verify(s).dims for s in check_state_sets(X)], dtype=int).reshape(-1, 3)

    def predict(self, X):
        return np.array([self.verify(s).locally_trivial for s in check_state_sets(X)], dtype=bool)


class ProtocolSimulator(BaseEstimator):
    """Runs a discrimination protocol on a state set.

    `protocol` is a built-in name (ghz-c6, ghz-c2d, ghz-odd, bell-c6,
    bell2-odd) or a tree. `resource` is a spec string such as 'ghz' or
    'bell:AB', a list of ResourceState, or None for the protocol's own
    resource (built-ins) / no resource (trees).
    """

    def __init__(self, protocol="ghz-c6", resource=None, strict=False):
        self.protocol = protocol
        self.resource = resource
        self.strict = strict

    def _setup(self, states):
        if isinstance(self.protocol, str):
            b = builtin_for(self.protocol, states)
            tree, res, name = b.tree, b.resource, b.name
        elif isinstance(self.protocol, (MeasurementNode, Leaf)):
            tree, res, name = self.protocol, [], "custom"
        else:
            raise TypeError("protocol must be a built-in name or a tree")
        if self.resource is not None:
            res = parse_resource(self.resource)
        return tree, res, name

    def fit(self, X, y=None):
        states = check_state_set(X)
        tree, res, name = self._setup(states)
        self.tree_ = tree
        self.report_ = run_protocol(states, res, tree, name=name, strict=self.strict)
        self.labels_ = [o.label for o in self.report_.outcomes]
        self.success_ = np.array([o.success for o in self.report_.outcomes])
        self.perfect_ = verify_perfect(self.report_)
        return self

    def _report(self, X):
        if X is None:
            if not hasattr(self, "report_"):
                raise NotFittedError("call fit first")
            return self.report_
        states = check_state_set(X)
        tree, res, name = self._setup(states)
        return run_protocol(states, res, tree, name=name, strict=self.strict)

    def predict(self, X=None):
        """Most probable guess for each input state (None if no leaf guesses)."""
        out = []
        for o in self._report(X).outcomes:
            weight = {}
            for b in o.branches:
                weight[b.guess] = weight.get(b.guess, 0.0) + b.probability
            out.append(max(weight.items(), key=lambda kv: kv[1])[0] if weight else None)
        return np.array(out, dtype=object)

    def score(self, X=None, y=None):
        """Worst-case success probability over the set."""
        return self._report(X).overall
