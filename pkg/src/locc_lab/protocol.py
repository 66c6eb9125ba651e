"""Entanglement-assisted LOCC protocols as measurement decision trees.

A protocol is a tree of `MeasurementNode`s. Each node is one party's
projective measurement on its system (x) ancilla factor; every outcome leads
to a child node or to a `Leaf` naming the guessed state (by signature or
label). `run_protocol` walks the tree exhaustively for every input state and
accumulates branch probabilities.

Layout of the global vector: A, A's ancilla qubits, B, B's ancilla qubits,
C, C's ancilla qubits. Within a party's ancillas, qubits supplied by the
resource states come first (in resource order); slots a tree measures but no
resource supplies are locally prepared in |0>, which is free under LOCC.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence, Union

import numpy as np

from ._parallel import ordered_map
from .families import PARTIES, StateSet
from .tensor import PROB_EPS, PROJECTOR_TOL, apply_local

logger = logging.getLogger(__name__)

PERFECT_TOL = 1e-9
CONSERVATION_TOL = 1e-9
X_PLUS = np.full((2, 2), 0.5, dtype=complex)
X_MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


class ProtocolError(ValueError):
    pass


class UndefinedGuessError(ProtocolError):
    pass


# resources ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ResourceState:
    """An entangled (or blank) ancilla state shared by `holders`, one qubit each."""

    kind: str
    holders: tuple
    ket: np.ndarray

    def __post_init__(self):
        holders = tuple(h.upper() for h in self.holders)
        if len(set(holders)) != len(holders) or any(h not in PARTIES for h in holders):
            raise ValueError("holders must be distinct parties from A, B, C")
        ket = np.array(self.ket, dtype=complex)
        if ket.shape != (2 ** len(holders),):
            raise ValueError("resource ket must have one qubit per holder")
        object.__setattr__(self, "holders", holders)
        object.__setattr__(self, "ket", ket)

    @classmethod
    def ghz(cls) -> "ResourceState":
        k = np.zeros(8, dtype=complex)
        k[0] = k[7] = 1 / np.sqrt(2)
        return cls("GHZ3", ("A", "B", "C"), k)

    @classmethod
    def bell(cls, holders=("A", "B")) -> "ResourceState":
        k = np.zeros(4, dtype=complex)
        k[0] = k[3] = 1 / np.sqrt(2)
        return cls("Bell", tuple(holders), k)

    @classmethod
    def blank(cls, holders) -> "ResourceState":
        k = np.zeros(2 ** len(holders), dtype=complex)
        k[0] = 1.0
        return cls("blank", tuple(holders), k)

    def describe(self) -> str:
        return "%s(%s)" % (self.kind, "".join(self.holders))


def _as_resources(resource) -> list:
    if resource is None:
        return []
    if isinstance(resource, ResourceState):
        return [resource]
    return list(resource)


# tree types --------------------------------------------------------------

@dataclass(eq=False)
class Leaf:
    """Terminal guess; `guess` is a state signature or label, None if no state
    is expected to reach it."""

    guess: Union[str, None] = None


@dataclass(eq=False)
class MeasurementNode:
    party: str
    factor_dims: tuple
    projectors: list
    children: list
    names: list = field(default_factory=list)
    residual: bool = False
    reconstructed: bool = False
    name: str = ""

    def __post_init__(self):
        self.party = self.party.upper()
        if self.party not in PARTIES:
            raise ValueError("unknown party %r" % self.party)
        self.factor_dims = tuple(int(d) for d in self.factor_dims)
        self.projectors = [np.asarray(p, dtype=complex) for p in self.projectors]
        if len(self.projectors) != len(self.children):
            raise ValueError("one child per projector required")
        if not self.names:
            self.names = [str(i) for i in range(len(self.projectors))]

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    @property
    def n_ancillas(self) -> int:
        return len(self.factor_dims) - 1


Tree = Union[MeasurementNode, Leaf]


def make_node(party, factor_dims, outcomes, residual=None, reconstructed=False, name="") -> MeasurementNode:
    """Build a node from (projector, child, name) triples; if `residual` is a
    (child, name) pair, the complement I - sum(P) is appended as the last
    outcome."""
    projs = [np.asarray(p, dtype=complex) for p, _, _ in outcomes]
    children = [c for _, c, _ in outcomes]
    names = [n for _, _, n in outcomes]
    dim = int(np.prod(factor_dims))
    if residual is not None:
        rest = np.eye(dim, dtype=complex) - sum(projs, np.zeros((dim, dim), dtype=complex))
        projs.append(rest)
        children.append(residual[0])
        names.append(residual[1])
    return MeasurementNode(party, factor_dims, projs, children, names,
                           residual=residual is not None, reconstructed=reconstructed, name=name)


def iter_nodes(tree: Tree):
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, MeasurementNode):
            yield t
            stack.extend(reversed(t.children))


def iter_leaves(tree: Tree):
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            yield t
        else:
            stack.extend(reversed(t.children))


def validate_node(node: MeasurementNode, tol: float = PROJECTOR_TOL) -> None:
    dim = node.dim
    total = np.zeros((dim, dim), dtype=complex)
    for i, p in enumerate(node.projectors):
        if p.shape != (dim, dim):
            raise ProtocolError("node %s: projector %d has shape %s, expected %d" % (node.name, i, p.shape, dim))
        if np.max(np.abs(p - p.conj().T)) > tol or np.max(np.abs(p @ p - p)) > tol:
            raise ProtocolError("node %s: outcome %s is not a projector" % (node.name, node.names[i]))
        total += p
    for i in range(len(node.projectors)):
        for j in range(i + 1, len(node.projectors)):
            if np.max(np.abs(node.projectors[i] @ node.projectors[j])) > tol:
                raise ProtocolError("node %s: outcomes %s and %s overlap"
                                    % (node.name, node.names[i], node.names[j]))
    if np.max(np.abs(total - np.eye(dim))) > tol:
        raise ProtocolError("node %s: projectors do not resolve the identity" % node.name)


def validate_tree(tree: Tree) -> None:
    for node in iter_nodes(tree):
        validate_node(node)


def tree_ancillas(tree: Tree) -> dict:
    """Ancilla slots per party used by the tree, with system dims cross-checked."""
    out, sysd = {}, {}
    for node in iter_nodes(tree):
        n = node.n_ancillas
        if node.party in out and (out[node.party] != n or sysd[node.party] != node.factor_dims[0]):
            raise ProtocolError("party %s measured with inconsistent factor dims" % node.party)
        out[node.party] = n
        sysd[node.party] = node.factor_dims[0]
    return out, sysd


# layout ------------------------------------------------------------------

@dataclass
class Layout:
    sys_dims: tuple
    qubits: dict          # party -> total ancilla qubits held
    tree_slots: dict      # party -> slots measured by the tree
    resources: list
    blank_slots: dict     # party -> number of locally prepared |0> slots

    @property
    def factor_dims(self) -> tuple:
        return tuple(d * 2 ** self.qubits[p] for d, p in zip(self.sys_dims, PARTIES))

    def ancilla_tensor(self) -> np.ndarray:
        """Joint ancilla state, axes ordered A-slots, B-slots, C-slots."""
        axes, factors = [], []
        counter = {p: 0 for p in PARTIES}
        for r in self.resources:
            factors.append(r.ket.reshape((2,) * len(r.holders)))
            for h in r.holders:
                axes.append((h, counter[h]))
                counter[h] += 1
        for p in PARTIES:
            for _ in range(self.blank_slots[p]):
                factors.append(np.array([1.0, 0.0], dtype=complex))
                axes.append((p, counter[p]))
                counter[p] += 1
        if not factors:
            return np.ones((), dtype=complex)
        t = reduce(np.multiply.outer, factors)
        order = sorted(range(len(axes)), key=lambda i: (PARTIES.index(axes[i][0]), axes[i][1]))
        return np.transpose(t, order)

    def initial_vectors(self, states: StateSet) -> np.ndarray:
        anc = self.ancilla_tensor()
        nq = [self.qubits[p] for p in PARTIES]
        out = []
        for s in states:
            a, b, c = (np.asarray(f) for f in s.factors)
            t = np.multiply.outer(np.multiply.outer(np.multiply.outer(a, b), c), anc)
            # axes: A, B, C, A-slots, B-slots, C-slots -> A, A-slots, B, B-slots, C, C-slots
            qa = list(range(3, 3 + nq[0]))
            qb = list(range(3 + nq[0], 3 + nq[0] + nq[1]))
            qc = list(range(3 + nq[0] + nq[1], 3 + sum(nq)))
            out.append(np.transpose(t, [0] + qa + [1] + qb + [2] + qc).reshape(-1))
        n = int(np.prod(self.factor_dims))
        return np.array(out, dtype=complex).reshape(len(out), n)


def make_layout(sys_dims, tree_slots: dict, resources: list) -> Layout:
    supplied = {p: 0 for p in PARTIES}
    for r in resources:
        for h in r.holders:
            supplied[h] += 1
    qubits, blank = {}, {}
    for p in PARTIES:
        need = tree_slots.get(p, 0)
        qubits[p] = max(need, supplied[p])
        blank[p] = qubits[p] - supplied[p]
    return Layout(tuple(sys_dims), qubits, dict(tree_slots), list(resources), blank)


def extend_projector(p: np.ndarray, extra_qubits: int) -> np.ndarray:
    if extra_qubits <= 0:
        return p
    return np.kron(p, np.eye(2 ** extra_qubits))


# reports -----------------------------------------------------------------

@dataclass
class Branch:
    path: tuple
    names: tuple
    probability: float
    guess: Union[str, None]


@dataclass
class StateOutcome:
    label: str
    signature: str
    success: float
    branches: list


@dataclass
class ProtocolReport:
    protocol: str
    resource: str
    outcomes: list
    conservation_error: float
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def overall(self) -> float:
        return min((o.success for o in self.outcomes), default=1.0)

    @property
    def perfect(self) -> bool:
        return self.overall >= 1 - PERFECT_TOL

    def success(self, label: str) -> float:
        for o in self.outcomes:
            if o.label == label:
                return o.success
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "resource": self.resource,
            "overall": self.overall,
            "perfect": self.perfect,
            "conservation_error": self.conservation_error,
            "warnings": list(self.warnings),
            "notes": list(self.notes),
            "per_state": [
                {"label": o.label, "signature": o.signature, "success": o.success,
                 "branches": [{"path": "/".join(b.names), "probability": b.probability,
                               "guess": b.guess} for b in o.branches]}
                for o in self.outcomes
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "signature", "success", "n_branches", "failed_probability"])
        for o in self.outcomes:
            failed = sum(b.probability for b in o.branches if b.guess != o.label)
            w.writerow([o.label, o.signature, "%.17g" % o.success, len(o.branches), "%.17g" % failed])
        return buf.getvalue()


def verify_perfect(report: ProtocolReport) -> bool:
    """True iff every state is identified with probability >= 1 - 1e-9 and
    every visited node conserved probability to 1e-9."""
    if not report.outcomes:
        logger.warning("empty state set: perfect discrimination holds vacuously")
        return True
    return report.perfect and report.conservation_error <= CONSERVATION_TOL


# running -----------------------------------------------------------------

def _guess_lookup(states: StateSet) -> dict:
    table = {s.signature: s.label for s in states}
    table.update({s.label: s.label for s in states})
    return table


def run_protocol(states: StateSet, resource, tree: Tree, *, name: str = "", strict: bool = False,
                 prob_eps: float = PROB_EPS, workers: int | None = None) -> ProtocolReport:
    """Walk `tree` exhaustively for every state of `states` (x) resource.

    Branches below `prob_eps` are pruned from the trace. With `strict`, a
    branch ending in a leaf without a guess raises UndefinedGuessError;
    otherwise it counts as a failed identification and is reported. States
    are walked independently, in a thread pool when `workers` (default: the
    LOCC_LAB_THREADS cap) exceeds 1.
    """
    resources = _as_resources(resource)
    validate_tree(tree)
    slots, sysd = tree_ancillas(tree)
    for p, d in sysd.items():
        if d != states.dims[PARTIES.index(p)]:
            raise ProtocolError("tree measures %s with system dim %d, states have %d"
                                % (p, d, states.dims[PARTIES.index(p)]))
    layout = make_layout(states.dims, slots, resources)
    dims = layout.factor_dims
    lookup = _guess_lookup(states)
    warnings = []
    for p in PARTIES:
        if layout.blank_slots[p]:
            warnings.append("party %s measures %d locally prepared ancilla(s) not covered by the resource"
                            % (p, layout.blank_slots[p]))
    unknown = {lf.guess for lf in iter_leaves(tree) if lf.guess is not None and lf.guess not in lookup}
    if unknown:
        warnings.append("%d leaf guess(es) match no state in the set" % len(unknown))

    def walk(item):
        s, v0 = item
        worst = 0.0
        branches = []
        stack = [(tree, v0, 1.0, (), ())]
        while stack:
            t, v, prob, path, names = stack.pop()
            if isinstance(t, Leaf):
                guess = lookup.get(t.guess) if t.guess is not None else None
                if guess is None and strict:
                    raise UndefinedGuessError("state %s reaches undefined leaf at %s"
                                              % (s.label, "/".join(names)))
                branches.append(Branch(path, names, prob, guess))
                continue
            axis = PARTIES.index(t.party)
            total = 0.0
            kids = []
            for i, P in enumerate(ops[id(t)]):
                w = apply_local(P, v, dims, axis)
                p = float(np.vdot(w, w).real)
                total += p
                if p > prob_eps:
                    kids.append((t.children[i], w / np.sqrt(p), prob * p,
                                 path + (i,), names + (t.party + ":" + t.names[i],)))
            worst = max(worst, abs(total - 1.0))
            stack.extend(reversed(kids))
        success = sum(b.probability for b in branches if b.guess == s.label)
        return StateOutcome(s.label, s.signature, float(success), branches), worst

    ops = {}
    for node in iter_nodes(tree):
        extra = layout.qubits[node.party] - node.n_ancillas
        ops[id(node)] = [extend_projector(p, extra) for p in node.projectors]
    vecs = layout.initial_vectors(states)
    results = ordered_map(walk, list(zip(states, vecs)), workers)
    outcomes = [r[0] for r in results]
    worst = max((r[1] for r in results), default=0.0)
    undefined = sum(1 for o in outcomes for b in o.branches if b.guess is None)
    if undefined:
        warnings.append("%d branch(es) end in a leaf without a guess" % undefined)
    desc = ", ".join(r.describe() for r in resources) or "none"
    return ProtocolReport(name, desc, outcomes, worst, warnings)


def reports_equal(r1: ProtocolReport, r2: ProtocolReport, atol: float = 1e-12) -> bool:
    """Same states, same branch paths and guesses, probabilities within atol."""
    if [o.label for o in r1.outcomes] != [o.label for o in r2.outcomes]:
        return False
    for a, b in zip(r1.outcomes, r2.outcomes):
        if abs(a.success - b.success) > atol or len(a.branches) != len(b.branches):
            return False
        for x, y in zip(a.branches, b.branches):
            if x.path != y.path or x.guess != y.guess or abs(x.probability - y.probability) > atol:
                return False
    return True


# tree transforms ---------------------------------------------------------

def _flip_op(factor_dims, slots) -> np.ndarray:
    ops = [np.eye(factor_dims[0])]
    for s in range(len(factor_dims) - 1):
        ops.append(PAULI_X if s in slots else np.eye(2))
    return reduce(np.kron, ops)


def mirror_ancillas(tree: Tree, flips: dict) -> Tree:
    """Conjugate every projector by X on the given ancilla slots.

    `flips` maps party -> iterable of slot indices. Used for branches that
    differ from a worked branch only by |0> <-> |1> on the ancillas.
    """
    flips = {p.upper(): set(v) for p, v in flips.items()}
    if isinstance(tree, Leaf):
        return Leaf(tree.guess)
    x = _flip_op(tree.factor_dims, flips.get(tree.party, ()))
    return MeasurementNode(tree.party, tree.factor_dims, [x @ p @ x for p in tree.projectors],
                           [mirror_ancillas(c, flips) for c in tree.children], list(tree.names),
                           tree.residual, tree.reconstructed, tree.name)


_SIG = re.compile(r"\|([^>]*)>")


def permute_signature(sig: str, mapping: dict) -> str:
    parts = _SIG.findall(sig)
    if len(parts) != 3:
        return sig
    new = [None] * 3
    for i, p in enumerate(PARTIES):
        new[PARTIES.index(mapping[p])] = parts[i]
    return "|%s>|%s>|%s>" % tuple(new)


def permute_parties(tree: Tree, mapping: dict) -> Tree:
    """Relabel parties (e.g. {'A': 'B', 'B': 'C', 'C': 'A'}); leaf signatures
    are permuted consistently."""
    mapping = {k.upper(): v.upper() for k, v in mapping.items()}
    if sorted(mapping) != list(PARTIES) or sorted(mapping.values()) != list(PARTIES):
        raise ValueError("mapping must be a permutation of A, B, C")
    if isinstance(tree, Leaf):
        return Leaf(None if tree.guess is None else permute_signature(tree.guess, mapping))
    return MeasurementNode(mapping[tree.party], tree.factor_dims, list(tree.projectors),
                           [permute_parties(c, mapping) for c in tree.children], list(tree.names),
                           tree.residual, tree.reconstructed, tree.name)


def count_reconstructed(tree: Tree) -> int:
    return sum(1 for n in iter_nodes(tree) if n.reconstructed)


# serialization -----------------------------------------------------------

def tree_to_dict(tree: Tree) -> dict:
    if isinstance(tree, Leaf):
        return {"type": "leaf", "guess": tree.guess}
    return {
        "type": "node",
        "party": tree.party,
        "name": tree.name,
        "factor_dims": list(tree.factor_dims),
        "residual": tree.residual,
        "reconstructed": tree.reconstructed,
        "outcomes": [
            {"name": n, "re": p.real.tolist(), "im": p.imag.tolist(), "child": tree_to_dict(c)}
            for p, c, n in zip(tree.projectors, tree.children, tree.names)
        ],
    }


def tree_from_dict(doc: dict) -> Tree:
    if doc["type"] == "leaf":
        return Leaf(doc.get("guess"))
    outs = doc["outcomes"]
    return MeasurementNode(
        doc["party"], tuple(doc["factor_dims"]),
        [np.array(o["re"]) + 1j * np.array(o["im"]) for o in outs],
        [tree_from_dict(o["child"]) for o in outs],
        [o["name"] for o in outs],
        residual=doc.get("residual", False), reconstructed=doc.get("reconstructed", False),
        name=doc.get("name", ""),
    )
