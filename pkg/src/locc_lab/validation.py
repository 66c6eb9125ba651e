"""Input validation helpers shared by the estimators and the CLI."""
from __future__ import annotations

import json
import math
import os
from typing import Sequence

from .families import PARTIES, StateSet
from .protocol import ResourceState


def check_state_set(X) -> StateSet:
    """Coerce a StateSet, its dict form, or a JSON string/path into a StateSet."""
    if isinstance(X, StateSet):
        return X
    if isinstance(X, dict):
        return StateSet.from_dict(X)
    if isinstance(X, (str, os.PathLike)):
        text = str(X)
        if not text.lstrip().startswith("{"):
            with open(text) as fh:
                text = fh.read()
        return StateSet.from_json(text)
    raise TypeError("expected a StateSet, got %s" % type(X).__name__)


def check_state_sets(X) -> list:
    """A single set or a sequence of sets, returned as a list."""
    if isinstance(X, (StateSet, dict, str, os.PathLike)):
        return [check_state_set(X)]
    if isinstance(X, Sequence) or hasattr(X, "__iter__"):
        out = [check_state_set(x) for x in X]
        if not out:
            raise ValueError("no state sets given")
        return out
    raise TypeError("expected a StateSet or a sequence of them, got %s" % type(X).__name__)


def check_tolerance(tol, name: str = "tol") -> float:
    try:
        t = float(tol)
    except (TypeError, ValueError):
        raise ValueError("%s must be a number, got %r" % (name, tol)) from None
    if not math.isfinite(t) or t <= 0:
        raise ValueError("%s must be positive and finite, got %r" % (name, tol))
    return t


def check_party(party) -> str:
    p = str(party).upper()
    if p not in PARTIES:
        raise ValueError("party must be one of A, B, C, got %r" % (party,))
    return p


def parse_resource(spec) -> list:
    """Resource spec: 'ghz', 'bell:AB', 'bell2:AB' (two copies), or 'none'.

    ResourceState objects and lists of them pass through unchanged.
    """
    if spec is None:
        return []
    if isinstance(spec, ResourceState):
        return [spec]
    if not isinstance(spec, str):
        out = list(spec)
        if not all(isinstance(r, ResourceState) for r in out):
            raise TypeError("resource list must contain ResourceState objects")
        return out
    s = spec.strip().lower()
    if s in ("none", ""):
        return []
    if s in ("ghz", "ghz3"):
        return [ResourceState.ghz()]
    kind, _, holders = s.partition(":")
    copies = {"bell": 1, "bell2": 2}.get(kind)
    if copies is None:
        raise ValueError("unknown resource %r; use ghz, bell:XY, bell2:XY or none" % spec)
    holders = holders.upper() or "AB"
    if len(holders) != 2 or len(set(holders)) != 2 or any(h not in PARTIES for h in holders):
        raise ValueError("Bell holders must be two distinct parties, got %r" % holders)
    return [ResourceState.bell(tuple(holders)) for _ in range(copies)]


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
