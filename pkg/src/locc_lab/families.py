"""Generators for the tripartite orthogonal product-state families.

Every generator is deterministic: the same parameters give the same ordered
list of states, so protocol trees and tests can refer to states by index or
by signature. Local factors are always a basis ket |i> or a two-level
superposition |i±(i+1)>.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .tensor import ORTHO_TOL, Ket, basis_ket, pm_ket

PARTIES = ("A", "B", "C")


class Family(str, enum.Enum):
    EXAMPLE1 = "example1"
    EXAMPLE2 = "example2"
    T1 = "t1"
    T2 = "t2"
    T3 = "t3"
    T4 = "t4"
    T5 = "t5"
    T6 = "t6"
    CUSTOM = "custom"


# A local factor spec is either a level `i` (|i>) or a pair `(i, sign)` (|i±(i+1)>).
LocalSpec = "int | tuple[int, int]"


def _local(dim: int, spec) -> Ket:
    if isinstance(spec, tuple):
        return pm_ket(dim, spec[0], spec[1])
    return basis_ket(dim, spec)


def describe_factor(k: Ket) -> str:
    """Canonical text for a local factor: '3', '2+3' or '2-3'."""
    a = np.asarray(k)
    nz = np.flatnonzero(np.abs(a) > 1e-12)
    if nz.size == 1 and abs(abs(a[nz[0]]) - 1) < 1e-12:
        return str(nz[0])
    if nz.size == 2 and nz[1] == nz[0] + 1:
        ratio = a[nz[1]] / a[nz[0]]
        if abs(ratio - 1) < 1e-12:
            return "%d+%d" % (nz[0], nz[1])
        if abs(ratio + 1) < 1e-12:
            return "%d-%d" % (nz[0], nz[1])
    raise ValueError("factor is neither |i> nor |i±(i+1)>")


def _factor_text(k: Ket) -> str:
    try:
        return describe_factor(k)
    except ValueError:
        a = np.round(np.asarray(k), 12) + 0.0
        return "[" + ",".join("%.12g%+.12gj" % (z.real, z.imag) for z in a) + "]"


@dataclass(frozen=True)
class ProductState:
    """A tripartite pure product state |a>|b>|c> with a label."""

    label: str
    factors: tuple

    def __post_init__(self):
        if len(self.factors) != 3:
            raise ValueError("a product state has exactly three factors")
        for f in self.factors:
            if not f.normalized:
                raise ValueError("factors of %s must be normalized" % self.label)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(f.dim for f in self.factors)

    @property
    def signature(self) -> str:
        return "|%s>|%s>|%s>" % tuple(_factor_text(f) for f in self.factors)

    def vector(self) -> np.ndarray:
        a, b, c = (np.asarray(f) for f in self.factors)
        return np.kron(np.kron(a, b), c)

    def relabeled(self, label: str) -> "ProductState":
        return ProductState(label, self.factors)


@dataclass(frozen=True)
class StateSet:
    dims: tuple
    states: tuple
    family: Family = Family.CUSTOM
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "family", Family(self.family))
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise ValueError("dims must be three positive integers")
        for s in self.states:
            if s.dims != self.dims:
                raise ValueError("state %s has dims %s, set has %s" % (s.label, s.dims, self.dims))
        labels = [s.label for s in self.states]
        if len(set(labels)) != len(labels):
            raise ValueError("state labels must be unique")

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.states]

    def by_label(self, label: str) -> ProductState:
        for s in self.states:
            if s.label == label:
                return s
        raise KeyError(label)

    def factor_matrix(self, party: int) -> np.ndarray:
        """Columns are the local factors of `party` (0, 1, 2)."""
        return np.stack([np.asarray(s.factors[party]) for s in self.states], axis=1)

    def subset(self, keep: Iterable[int]) -> "StateSet":
        keep = list(keep)
        return StateSet(self.dims, [self.states[i] for i in keep], Family.CUSTOM,
                        {"parent": self.family.value, **self.params})

    def cyclic_shift(self) -> "StateSet":
        """Relabel parties A->B->C->A: the factor held by A moves to B, etc."""
        shifted = [ProductState(s.label, (s.factors[2], s.factors[0], s.factors[1]))
                   for s in self.states]
        dims = (self.dims[2], self.dims[0], self.dims[1])
        return StateSet(dims, shifted, self.family, self.params)

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "family": self.family.value,
            "params": dict(self.params),
            "states": [
                {"label": s.label,
                 "factors": [[[float(z.real), float(z.imag)] for z in np.asarray(f)]
                             for f in s.factors]}
                for s in self.states
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StateSet":
        dims = tuple(doc["dims"])
        states = []
        for entry in doc["states"]:
            factors = []
            for f in entry["factors"]:
                amps = np.array([complex(re, im) for re, im in f])
                factors.append(Ket(amps, normalized=True))
            states.append(ProductState(entry["label"], tuple(factors)))
        return cls(dims, states, Family(doc.get("family", "custom")), dict(doc.get("params", {})))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "StateSet":
        return cls.from_dict(json.loads(text))


def _make_set(dims, specs, family, params, prefix="phi") -> StateSet:
    states = []
    for n, spec in enumerate(specs, start=1):
        factors = tuple(_local(d, s) for d, s in zip(dims, spec))
        states.append(ProductState("%s_%d" % (prefix, n), factors))
    return StateSet(dims, states, family, params)


def _pm(i):
    return [(i, +1), (i, -1)]


def _cyclic(x, y, z):
    """The three cyclic copies of a block: (x,y,z), (z,x,y), (y,z,x)."""
    return [(x, y, z), (z, x, y), (y, z, x)]


# Example 1 --------------------------------------------------------------

def gen_example1() -> StateSet:
    """36 states in C^6 x C^6 x C^6, labelled psi_1..psi_36 in the order used by
    the GHZ discrimination protocol."""
    P = lambda i: (i, +1)  # noqa: E731
    specs = []
    specs += _cyclic(P(2), 0, 3)
    specs += _cyclic(P(2), 2, 5)
    for a, b, c in [(2, 2, 3), (3, 2, 4), (1, 1, 3), (0, 0, 3), (4, 2, 5)]:
        for x, y, z in _cyclic("pm", b, c):
            for s in (+1, -1):
                specs.append(tuple((a, s) if v == "pm" else v for v in (x, y, z)))
    return _make_set((6, 6, 6), specs, Family.EXAMPLE1, {}, prefix="psi")


# Families T1 and T2: C^{2d} x C^{2d} x C^{2d} ----------------------------

def _c2d_specs(d: int) -> list:
    specs = []
    pm_blocks = (
        [(i, i, d) for i in range(0, d)],          # |i±(i+1)>|i>|d>
        [(i, d - 1, i + 1) for i in range(d, 2 * d - 1)],  # |i±(i+1)>|d-1>|i+1>
    )
    for block in pm_blocks:
        for rot in range(3):
            for i, b, c in block:
                for s in (+1, -1):
                    trip = ((i, s), b, c)
                    specs.append(_cyclic(*trip)[rot])
    if d % 2:
        low_a = range(0, d - 2, 2)        # |(d-1)+d>|i>|d>, i even
        low_b = range(1, d - 3, 2)        # |(d-2)+(d-1)>|i>|d>, i odd
        high_c = range(d + 2, 2 * d, 2)   # |(d-1)+d>|d-1>|i>
        high_d = range(d + 3, 2 * d - 1, 2)  # |d+(d+1)>|d-1>|i>
    else:
        low_a = range(1, d - 2, 2)
        low_b = range(0, d - 3, 2)
        high_c = range(d + 2, 2 * d - 1, 2)
        high_d = range(d + 3, 2 * d, 2)
    plus_blocks = (
        [((d - 1, +1), i, d) for i in low_a],
        [((d - 2, +1), i, d) for i in low_b],
        [((d - 1, +1), d - 1, i) for i in high_c],
        [((d, +1), d - 1, i) for i in high_d],
    )
    for block in plus_blocks:
        for rot in range(3):
            specs.extend(_cyclic(*trip)[rot] for trip in block)
    return specs


def gen_theorem1(d: int) -> StateSet:
    """18(d-1) states in C^{2d} x C^{2d} x C^{2d} for odd d >= 3."""
    d = _check_int(d, "d")
    if d < 3 or d % 2 == 0:
        raise ValueError("t1 family needs odd d >= 3, got d=%d" % d)
    return _make_set((2 * d,) * 3, _c2d_specs(d), Family.T1, {"d": d})


def gen_theorem2(d: int) -> StateSet:
    """18(d-1) states in C^{2d} x C^{2d} x C^{2d} for even d >= 4."""
    d = _check_int(d, "d")
    if d < 4 or d % 2:
        raise ValueError("t2 family needs even d >= 4, got d=%d" % d)
    return _make_set((2 * d,) * 3, _c2d_specs(d), Family.T2, {"d": d})


# Example 2 and families T3-T6: C^k x C^l x C^m -----------------------------

def gen_example2() -> StateSet:
    """31 states in C^5 x C^5 x C^5, labelled phi_1..phi_31 as listed."""
    specs = []
    for trip in [("p1", 4, 2), ("p3", 4, 2), (4, 2, "p1"), (4, 2, "p3"),
                 (2, "p1", 4), (2, "p3", 4), ("p2", 0, 2), ("p0", 0, 2),
                 (2, "p2", 0), (2, "p0", 0), (0, 2, "p2"), (0, 2, "p0")]:
        for s in (+1, -1):
            specs.append(tuple((int(v[1]), s) if isinstance(v, str) else v for v in trip))
    specs += [(1, 2, 2), (2, 2, 2), (3, 2, 2), (2, 1, 2), (2, 3, 2), (2, 2, 1), (2, 2, 3)]
    return _make_set((5, 5, 5), specs, Family.EXAMPLE2, {})


def _pairs(make, indices):
    out = []
    for i in indices:
        for s in (+1, -1):
            out.append(make((i, s)))
    return out


def gen_theorem3(k: int, l: int, m: int) -> StateSet:
    """6(k+l+m)-5 states in C^{2k+1} x C^{2l+1} x C^{2m+1}."""
    k, l, m = _check_klm(k, l, m, 2)
    sp = []
    sp += _pairs(lambda p: (p, 2 * l, m), range(1, 2 * k, 2))
    sp += _pairs(lambda p: (2 * k, l, p), range(1, 2 * m, 2))
    sp += _pairs(lambda p: (k, p, 2 * m), range(1, 2 * l, 2))
    sp += _pairs(lambda p: (p, 0, m), range(2, 2 * k - 1, 2))
    sp += _pairs(lambda p: (p, 0, m), [0])
    sp += _pairs(lambda p: (k, p, 0), range(2, 2 * l - 1, 2))
    sp += _pairs(lambda p: (k, p, 0), [0])
    sp += _pairs(lambda p: (0, l, p), range(2, 2 * m - 1, 2))
    sp += _pairs(lambda p: (0, l, p), [0])
    sp += [(i, l, m) for i in range(1, 2 * k)]
    sp += [(k, i, m) for i in range(1, 2 * l) if i != l]
    sp += [(k, l, i) for i in range(1, 2 * m) if i != m]
    return _make_set((2 * k + 1, 2 * l + 1, 2 * m + 1), sp, Family.T3, {"k": k, "l": l, "m": m})


def gen_theorem4(k: int, l: int, m: int) -> StateSet:
    """6(k+l+m)-8 states in C^{2k+1} x C^{2l+1} x C^{2m}."""
    k, l, m = _check_klm(k, l, m, 2)
    sp = []
    sp += _pairs(lambda p: (p, 2 * l, m - 1), range(1, 2 * k, 2))
    sp += _pairs(lambda p: (p, 0, m - 1), range(0, 2 * k - 1, 2))
    sp += _pairs(lambda p: (2, p, 2 * m - 1), range(1, 2 * l, 2))
    sp += _pairs(lambda p: (2, p, 0), range(0, 2 * l - 1, 2))
    sp += _pairs(lambda p: (2 * k, 1, p), range(0, 2 * m - 3, 2))
    sp += _pairs(lambda p: (0, 1, p), range(1, 2 * m - 2, 2))
    sp += _pairs(lambda p: (1, 1, p), [2 * m - 2])
    sp += [(i, 1, m - 1) for i in range(1, 2 * k)]
    sp += [(2, i, m - 1) for i in range(2, 2 * l)]
    sp += [(2, 1, i) for i in range(1, 2 * m - 1) if i != m - 1]
    return _make_set((2 * k + 1, 2 * l + 1, 2 * m), sp, Family.T4, {"k": k, "l": l, "m": m})


def gen_theorem5(k: int, l: int, m: int) -> StateSet:
    """6(k+l+m)-11 states in C^{2k+1} x C^{2l} x C^{2m}."""
    k, l, m = _check_klm(k, l, m, 2)
    sp = []
    sp += _pairs(lambda p: (p, 2 * l - 1, m - 1), range(1, 2 * k, 2))
    sp += _pairs(lambda p: (p, 0, m - 1), range(0, 2 * k - 1, 2))
    sp += _pairs(lambda p: (2, p, 2 * m - 1), range(1, 2 * l - 2, 2))
    sp += _pairs(lambda p: (2, p, 0), range(0, 2 * l - 3, 2))
    sp += _pairs(lambda p: (2, p, 2 * m - 2), [2 * l - 2])
    sp += _pairs(lambda p: (2 * k, 1, p), range(0, 2 * m - 3, 2))
    sp += _pairs(lambda p: (0, 1, p), range(1, 2 * m - 2, 2))
    sp += _pairs(lambda p: (1, 1, p), [2 * m - 2])
    sp += [(i, 1, m - 1) for i in range(1, 2 * k)]
    sp += [(2, i, m - 1) for i in range(2, 2 * l - 1)]
    sp += [(2, 1, i) for i in range(1, 2 * m - 1) if i != m - 1]
    return _make_set((2 * k + 1, 2 * l, 2 * m), sp, Family.T5, {"k": k, "l": l, "m": m})


def gen_theorem6(k: int, l: int, m: int) -> StateSet:
    """6(k+l+m)-14 states in C^{2k} x C^{2l} x C^{2m}."""
    k, l, m = _check_klm(k, l, m, 3)
    sp = []
    sp += _pairs(lambda p: (p, 2 * l - 1, 2), range(0, 2 * k - 3, 2))
    sp += _pairs(lambda p: (p, 0, 2), range(1, 2 * k - 4, 2))
    sp += _pairs(lambda p: (p, 0, 2), [2 * k - 2])
    sp += _pairs(lambda p: (2, p, 2 * m - 1), range(0, 2 * l - 3, 2))
    sp += _pairs(lambda p: (2, p, 0), range(1, 2 * l - 4, 2))
    sp += _pairs(lambda p: (2, p, 0), [2 * l - 2])
    sp += _pairs(lambda p: (2 * k - 1, 2, p), range(0, 2 * m - 3, 2))
    sp += _pairs(lambda p: (0, 2, p), range(1, 2 * m - 4, 2))
    sp += _pairs(lambda p: (0, 2, p), [2 * m - 2])
    sp += _pairs(lambda p: (p, 1, 2), [2 * k - 3])
    sp += _pairs(lambda p: (2, p, 1), [2 * l - 3])
    sp += _pairs(lambda p: (1, 2, p), [2 * m - 3])
    sp += [(2, 2, i) for i in range(2, 2 * m - 1)]
    sp += [(i, 2, 2) for i in range(3, 2 * k - 1)]
    sp += [(2, i, 2) for i in range(3, 2 * l - 1)]
    sp += [(2, 2, 1), (1, 2, 2), (2, 1, 2)]
    return _make_set((2 * k, 2 * l, 2 * m), sp, Family.T6, {"k": k, "l": l, "m": m})


# registry ----------------------------------------------------------------

_COUNT_OFFSET = {Family.T3: 5, Family.T4: 8, Family.T5: 11, Family.T6: 14}


def expected_count(family, params: dict | None = None) -> int:
    """Closed-form cardinality of a family."""
    family = Family(family)
    params = params or {}
    if family is Family.EXAMPLE1:
        return 36
    if family is Family.EXAMPLE2:
        return 31
    if family in (Family.T1, Family.T2):
        return 18 * (int(params["d"]) - 1)
    if family in _COUNT_OFFSET:
        return 6 * (int(params["k"]) + int(params["l"]) + int(params["m"])) - _COUNT_OFFSET[family]
    raise ValueError("no closed-form count for family %r" % family.value)


_GENERATORS = {
    Family.EXAMPLE1: lambda p: gen_example1(),
    Family.EXAMPLE2: lambda p: gen_example2(),
    Family.T1: lambda p: gen_theorem1(p["d"]),
    Family.T2: lambda p: gen_theorem2(p["d"]),
    Family.T3: lambda p: gen_theorem3(p["k"], p["l"], p["m"]),
    Family.T4: lambda p: gen_theorem4(p["k"], p["l"], p["m"]),
    Family.T5: lambda p: gen_theorem5(p["k"], p["l"], p["m"]),
    Family.T6: lambda p: gen_theorem6(p["k"], p["l"], p["m"]),
}


def generate(family, params: dict | None = None) -> StateSet:
    """Dispatch to the generator for `family` with keyword parameters."""
    family = Family(family)
    if family not in _GENERATORS:
        raise ValueError("no generator for family %r" % family.value)
    params = dict(params or {})
    needed = {Family.T1: ("d",), Family.T2: ("d",)}.get(
        family, ("k", "l", "m") if family in _COUNT_OFFSET else ())
    missing = [p for p in needed if p not in params]
    if missing:
        raise ValueError("family %s needs parameter(s) %s" % (family.value, ", ".join(missing)))
    return _GENERATORS[family](params)


def _check_int(x, name) -> int:
    if isinstance(x, bool) or int(x) != x:
        raise ValueError("%s must be an integer" % name)
    return int(x)


def _check_klm(k, l, m, lo):
    vals = tuple(_check_int(v, n) for v, n in zip((k, l, m), "klm"))
    for v, n in zip(vals, "klm"):
        if v < lo:
            raise ValueError("%s must be >= %d, got %d" % (n, lo, v))
    return vals


# orthogonality -----------------------------------------------------------

@dataclass(frozen=True)
class OrthogonalityReport:
    violations: list
    max_overlap: float
    tol: float

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"passed": self.passed, "max_overlap": self.max_overlap, "tol": self.tol,
                "violations": [{"i": i, "j": j, "overlap": o} for i, j, o in self.violations]}


def overlap_matrix(states: StateSet) -> np.ndarray:
    """|<s_i|s_j>| for all pairs, from the three local Gram matrices."""
    g = np.ones((len(states), len(states)), dtype=complex)
    for p in range(3):
        f = states.factor_matrix(p)
        g = g * (f.conj().T @ f)
    return np.abs(g)


def check_orthogonality(states: StateSet, tol: float = ORTHO_TOL) -> OrthogonalityReport:
    n = len(states)
    if n < 2:
        return OrthogonalityReport([], 0.0, tol)
    ov = overlap_matrix(states)
    iu = np.triu_indices(n, 1)
    vals = ov[iu]
    bad = np.flatnonzero(vals > tol)
    violations = [(int(iu[0][b]), int(iu[1][b]), float(vals[b])) for b in bad]
    return OrthogonalityReport(violations, float(vals.max()), tol)


def computational_basis(dims: Sequence[int]) -> StateSet:
    """The full product basis |i>|j>|k> (a locally distinguishable control)."""
    specs = [(i, j, k) for i in range(dims[0]) for j in range(dims[1]) for k in range(dims[2])]
    return _make_set(tuple(dims), specs, Family.CUSTOM, {"basis": list(dims)}, prefix="e")
