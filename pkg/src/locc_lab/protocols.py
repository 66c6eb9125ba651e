"""Built-in discrimination protocols and the survivor-tracking tree builder.

`builtin_ghz_c6` and `builtin_bell_c6` are written out node by node. The
parametric protocols are produced by `TreeBuilder`, which simulates the
surviving states at every node so that level splits, final resolutions and
the X-basis ancilla measurements used to disentangle GHZ-tagged pairs can be
derived from the actual post-measurement states.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .families import (PARTIES, Family, StateSet, gen_example1, gen_theorem1, gen_theorem2,
                       gen_theorem3)
from .protocol import (X_MINUS, X_PLUS, Leaf, MeasurementNode, ProtocolError, ResourceState,
                       Tree, _as_resources, make_layout, make_node, mirror_ancillas)
from .tensor import PROB_EPS, apply_local

logger = logging.getLogger(__name__)

SCHMIDT_RTOL = 1e-9
ORTHO_EPS = 1e-10


class BuildError(ProtocolError):
    pass


# small projector helpers -------------------------------------------------

def ket(d: int, *terms) -> np.ndarray:
    """Normalized ket from (level, amplitude) terms or bare levels."""
    v = np.zeros(d, dtype=complex)
    for t in terms:
        i, a = (t, 1.0) if np.isscalar(t) else t
        v[i] += a
    return v / np.linalg.norm(v)


def pm(d: int, i: int, sign: int = 1) -> np.ndarray:
    return ket(d, (i, 1.0), (i + 1, float(sign)))


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def _anc_proj(spec) -> np.ndarray:
    if spec is None:
        return np.eye(2)
    return proj(ket(2, spec))


def level_proj(d: int, levels, anc=()) -> np.ndarray:
    """sum_j |j><j| on the system, tensored with one factor per ancilla slot:
    0 -> |0><0|, 1 -> |1><1|, None -> identity."""
    s = np.zeros((d, d), dtype=complex)
    for j in levels:
        s[j, j] = 1.0
    return reduce(np.kron, [s] + [_anc_proj(a) for a in anc])


def _sort_key(v: np.ndarray):
    nz = np.flatnonzero(np.abs(v) > 1e-9)
    ref = v[nz[0]]
    return (int(nz[0]), len(nz)) + tuple((int(i), -round(float((v[i] / ref).real), 6)) for i in nz[1:])


def _phase_fix(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-9)
    return v * (abs(v[nz[0]]) / v[nz[0]])


def _ket_name(v: np.ndarray, fdims) -> str:
    nz = np.flatnonzero(np.abs(v) > 1e-9)
    ref = v[nz[0]]
    out = ""
    for n, i in enumerate(nz):
        idx = np.unravel_index(i, fdims)
        term = ",".join(str(int(x)) for x in idx)
        if len(fdims) > 1:
            term = "(" + term + ")"
        sign = "+" if (v[i] / ref).real >= 0 else "-"
        out += (sign if n else "") + term
    return out


# builder -----------------------------------------------------------------

class TreeBuilder:
    """Builds trees against a concrete state set by simulating survivors.

    A survivor is (state index, normalized global vector). Every method
    returns a subtree; child callbacks receive the survivors of their branch.
    """

    def __init__(self, states: StateSet, resource, slots: dict):
        self.states = states
        resources = _as_resources(resource)
        self.layout = make_layout(states.dims, slots, resources)
        for p in PARTIES:
            if self.layout.qubits[p] != slots.get(p, 0):
                raise BuildError("resource gives party %s qubits the tree does not measure" % p)
        self.dims = self.layout.factor_dims
        self.fdims = {p: (states.dims[i],) + (2,) * self.layout.qubits[p] for i, p in enumerate(PARTIES)}
        vecs = self.layout.initial_vectors(states)
        self.start = [(i, v) for i, v in enumerate(vecs)]

    def guess(self, idx: int) -> str:
        return self.states[idx].signature

    def project(self, party: str, P: np.ndarray, survivors):
        axis = PARTIES.index(party)
        out = []
        for i, v in survivors:
            w = apply_local(P, v, self.dims, axis)
            p = float(np.vdot(w, w).real)
            if p > PROB_EPS:
                out.append((i, w / np.sqrt(p)))
        return out

    def _local_matrix(self, party: str, v: np.ndarray) -> np.ndarray:
        axis = PARTIES.index(party)
        pre = int(np.prod(self.dims[:axis]))
        t = v.reshape(pre, self.dims[axis], -1)
        return np.transpose(t, (1, 0, 2)).reshape(self.dims[axis], -1)

    def _child(self, fn, survivors) -> Tree:
        if not survivors:
            return Leaf(None)
        return fn(survivors)

    # generic nodes

    def split(self, party, survivors, outcomes, residual=None, reconstructed=False, name="") -> MeasurementNode:
        """outcomes: (projector, name, callback); residual: (name, callback) or None."""
        fd = self.fdims[party]
        triples = [(P, self._child(fn, self.project(party, P, survivors)), n) for P, n, fn in outcomes]
        dim = int(np.prod(fd))
        rest = np.eye(dim) - sum((P for P, _, _ in outcomes), np.zeros((dim, dim)))
        left = self.project(party, rest, survivors)
        if residual is None:
            if left:
                raise BuildError("node %s: %d state(s) fall into an undeclared residual" % (name, len(left)))
            res = (Leaf(None), "rest")
        else:
            res = (self._child(residual[1], left), residual[0])
        return make_node(party, fd, triples, residual=res, reconstructed=reconstructed, name=name)

    def levels(self, party, levels, survivors, anc="auto") -> np.ndarray:
        d = self.fdims[party][0]
        nslots = len(self.fdims[party]) - 1
        if anc != "auto":
            return level_proj(d, levels, anc if anc is not None else (None,) * nslots)
        base = self.project(party, level_proj(d, levels, (None,) * nslots), survivors)
        spec = []
        for s in range(nslots):
            mass = np.zeros(2)
            for _, v in base:
                m = self._local_matrix(party, v).reshape((d,) + (2,) * nslots + (-1,))
                prob = np.abs(m) ** 2
                keep = tuple(x for x in range(prob.ndim) if x != s + 1)
                mass += prob.sum(axis=keep)
            if mass[1] <= PROB_EPS and mass[0] > 0:
                spec.append(0)
            elif mass[0] <= PROB_EPS and mass[1] > 0:
                spec.append(1)
            else:
                spec.append(None)
        return level_proj(d, levels, spec)

    def _support(self, rho: np.ndarray):
        w, v = np.linalg.eigh(rho)
        keep = w > SCHMIDT_RTOL * max(w[-1], 0.0)
        return v[:, keep]

    def resolve(self, party, survivors, reconstructed=False, name="") -> MeasurementNode:
        """Final measurement by one party, one outcome per survivor.

        Preferred form: the survivor's reduced system state is pure, giving
        |k><k| (x) identity on the ancillas; at most one survivor whose system
        state is mixed is left for the residual outcome. Otherwise each
        survivor gets the projector onto the support of its reduced state on
        the full system (x) ancilla factor.
        """
        fd = self.fdims[party]
        d, na = fd[0], 2 ** (len(fd) - 1)
        if not survivors:
            raise BuildError("node %s: nothing to resolve" % name)
        rhos = []
        for i, v in survivors:
            m = self._local_matrix(party, v)
            rhos.append((i, m @ m.conj().T))

        def orthogonal(ps):
            return all(np.max(np.abs(ps[a] @ ps[b])) <= ORTHO_EPS
                       for a in range(len(ps)) for b in range(a + 1, len(ps)))

        items, rest = [], None
        pure, mixed = [], []
        for i, rho in rhos:
            rs = np.einsum("iaja->ij", rho.reshape(d, na, d, na))
            sup = self._support(rs)
            (pure if sup.shape[1] == 1 else mixed).append((i, sup[:, 0]))
        if len(mixed) <= 1:
            cand = [np.kron(proj(_phase_fix(k)), np.eye(na)) for _, k in pure]
            if orthogonal(cand):
                items = [(_sort_key(_phase_fix(k)), P, i, _ket_name(_phase_fix(k), (d,)))
                         for (i, k), P in zip(pure, cand)]
                rest = mixed[0][0] if mixed else None
        if not items:
            cand, keys = [], []
            for i, rho in rhos:
                sup = self._support(rho)
                cand.append(sup @ sup.conj().T)
                lead = _phase_fix(sup[:, 0]) if sup.shape[1] == 1 else np.diag(cand[-1]).astype(complex)
                keys.append((_sort_key(lead), _ket_name(lead, fd)))
            if not orthogonal(cand):
                raise BuildError("node %s: party %s cannot separate the survivors" % (name, party))
            items = [(key, P, i, nm) for (key, nm), P, (i, _) in zip(keys, cand, rhos)]
            rest = None
        items.sort(key=lambda t: t[0])
        triples = [(P, Leaf(self.guess(i)), nm) for _, P, i, nm in items]
        res_leaf = Leaf(self.guess(rest)) if rest is not None else Leaf(None)
        node = make_node(party, fd, triples, residual=(res_leaf, "rest"), reconstructed=reconstructed, name=name)
        axis = PARTIES.index(party)
        for i, v in survivors:
            ok = sum(float(np.vdot(w, w).real) for w in
                     (apply_local(P, v, self.dims, axis) for P, c in zip(node.projectors, node.children)
                      if c.guess == self.guess(i)))
            if ok < 1 - 1e-9:
                raise BuildError("node %s: survivor %s identified with p=%.3g" % (name, self.states[i].label, ok))
        return node

    def disentangle(self, survivors, measurers, then, name="") -> MeasurementNode:
        """X-basis measurement of ancilla slots, one (party, slot) at a time,
        followed by `then(survivors)` on every outcome branch."""
        party, slot = measurers[0]
        fd = self.fdims[party]
        ops = []
        for sign_op in (X_PLUS, X_MINUS):
            parts = [np.eye(fd[0])] + [sign_op if s == slot else np.eye(2) for s in range(len(fd) - 1)]
            ops.append(reduce(np.kron, parts))
        if len(measurers) == 1:
            cb = then
        else:
            cb = lambda sv: self.disentangle(sv, measurers[1:], then, name)  # noqa: E731
        outcomes = [(ops[0], "x%d+" % slot, cb), (ops[1], "x%d-" % slot, cb)]
        return self.split(party, survivors, outcomes, reconstructed=True, name=name)

    def components(self, party, survivors):
        """Connected components of computational-basis support on a party's
        factor, joining indices that a single survivor occupies together."""
        D = int(np.prod(self.fdims[party]))
        parent = list(range(D))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        used = set()
        for _, v in survivors:
            m = self._local_matrix(party, v)
            supp = np.flatnonzero(np.sum(np.abs(m) ** 2, axis=1) > PROB_EPS)
            used.update(int(x) for x in supp)
            for x in supp[1:]:
                parent[find(int(x))] = find(int(supp[0]))
        groups = {}
        for x in sorted(used):
            groups.setdefault(find(x), []).append(x)
        return sorted(groups.values(), key=min)

    def greedy(self, survivors, parties=PARTIES, name="") -> Tree:
        """Finish a branch of product-like survivors: resolve outright if a
        single party can, otherwise split on disjoint computational supports."""
        if len(survivors) == 1:
            return Leaf(self.guess(survivors[0][0]))
        for p in parties:
            try:
                return self.resolve(p, survivors, reconstructed=True, name=name)
            except BuildError:
                pass
        for p in parties:
            comps = self.components(p, survivors)
            if len(comps) < 2:
                continue
            D = int(np.prod(self.fdims[p]))
            outcomes = []
            for c in comps:
                P = np.zeros((D, D), dtype=complex)
                P[c, c] = 1.0
                outcomes.append((P, "S%d" % c[0], lambda sv: self.greedy(sv, parties, name)))
            return self.split(p, survivors, outcomes, reconstructed=True, name=name)
        raise BuildError("node %s: no product split separates the remaining states" % name)


# hand-written trees ------------------------------------------------------

def _sigs(states: StateSet) -> dict:
    return {int(s.label.split("_")[1]): s.signature for s in states}


def _final(party, fdims, items, residual=None, reconstructed=False, name=""):
    """Last measurement: system kets (x) identity on ancillas, ordered by level."""
    d, na = fdims[0], int(np.prod(fdims[1:], dtype=int))
    rows = sorted(items, key=lambda t: _sort_key(t[0]))
    triples = [(np.kron(proj(v), np.eye(na)), Leaf(g), _ket_name(v, (d,))) for v, g in rows]
    return make_node(party, fdims, triples, residual=(Leaf(residual), "rest"),
                     reconstructed=reconstructed, name=name)


def _bell_phi(d: int, lo: int, signs: int):
    """(|lo,0> + signs |lo+1,1>)/sqrt(2) on system (x) one ancilla qubit."""
    v = np.zeros(2 * d, dtype=complex)
    v[2 * lo] = 1.0
    v[2 * (lo + 1) + 1] = signs
    return v / np.sqrt(2)


def _parity_tree(first, second, third, d, lo, g_plus, g_minus, name):
    """Ancilla X measurements by `first` and `second`, then `third` projects
    onto (|lo,0> +- |lo+1,1>); the guess flips with the product of X outcomes."""
    fd = (d, 2)

    def last(parity):
        pl, mi = (g_plus, g_minus) if parity > 0 else (g_minus, g_plus)
        return make_node(third, fd, [(proj(_bell_phi(d, lo, 1)), Leaf(pl), _ket_name(_bell_phi(d, lo, 1), fd)),
                                     (proj(_bell_phi(d, lo, -1)), Leaf(mi), _ket_name(_bell_phi(d, lo, -1), fd))],
                         residual=(Leaf(None), "rest"), reconstructed=True, name=name)

    def xnode(party, children, sub):
        ops = [np.kron(np.eye(d), X_PLUS), np.kron(np.eye(d), X_MINUS)]
        return make_node(party, fd, [(ops[0], children[0], "x0+"), (ops[1], children[1], "x0-")],
                         reconstructed=True, name=sub)

    if second is None:
        return xnode(first, [last(+1), last(-1)], name)
    return xnode(first, [xnode(second, [last(+1), last(-1)], name),
                         xnode(second, [last(-1), last(+1)], name)], name)


def builtin_ghz_c6() -> MeasurementNode:
    """GHZ-assisted protocol for the 36-state set in C^6 x C^6 x C^6.

    Root: Charlie splits C (x) c into two rank-6 projectors; the second
    branch is the first with all ancillas flipped.
    """
    g = _sigs(gen_example1())
    fd = (6, 2)
    L = lambda lv, a=None: level_proj(6, lv, (a,))  # noqa: E731
    p = lambda i, s=1: pm(6, i, s)  # noqa: E731
    pair = lambda i, n: [(p(i, 1), g[n]), (p(i, -1), g[n + 1])]  # noqa: E731

    b3 = make_node("C", fd, [
        (L([3], 1), _final("A", fd, pair(2, 7)), "C31"),
        (L([4], 1), _final("A", fd, pair(3, 13)), "C32"),
        (L([5], 1), _final("A", fd, [(p(2), g[4])] + pair(4, 31)), "C33"),
    ], residual=(Leaf(None), "rest"), name="C3")
    a43 = make_node("B", fd, [
        (L([3]), _parity_tree("A", "B", "C", 6, 2, g[11], g[12], "X11"), "B431"),
        (L([4], 1), _final("C", fd, pair(3, 17)), "B432"),
        (L([5]), _final("C", fd, pair(4, 35), residual=g[6]), "B433"),
    ], residual=(Leaf(None), "rest"), name="B43")
    c443 = make_node("A", fd, [
        (L([3], 0), _final("B", fd, pair(2, 9)), "A4431"),
        (L([4], 0), _final("B", fd, pair(3, 15)), "A4432"),
        (L([5], 0), _final("B", fd, [(p(2), g[5])] + pair(4, 33)), "A4433"),
    ], residual=(Leaf(None), "rest"), name="A443")
    a44 = make_node("C", fd, [
        (L([0], 0), _final("B", fd, pair(0, 27) + [(p(2), g[2])]), "C441"),
        (L([1], 0), _final("B", fd, pair(1, 21)), "C442"),
        (L([2], 0), c443, "C443"),
    ], residual=(Leaf(None), "rest"), name="C44")
    b4 = make_node("A", fd, [
        (L([0]), _final("C", fd, pair(0, 29), residual=g[3]), "A41"),
        (L([1], 0), _final("C", fd, pair(1, 23)), "A42"),
        (L([2]), a43, "A43"),
    ], residual=(a44, "A44"), name="A4")
    c1 = make_node("B", fd, [
        (L([0], 1), _final("A", fd, pair(0, 25) + [(p(2), g[1])]), "B1"),
        (L([1], 1), _final("A", fd, pair(1, 19)), "B2"),
        (L([2], 1), b3, "B3"),
    ], residual=(b4, "B4"), name="B")
    C1 = L([0, 1, 2], 0) + L([3, 4, 5], 1)
    c2 = mirror_ancillas(c1, {"A": [0], "B": [0], "C": [0]})
    return make_node("C", fd, [(C1, c1, "C1"), (np.eye(12) - C1, c2, "C2")], name="root")


def builtin_bell_c6() -> MeasurementNode:
    """Bell(A,B)-assisted protocol for the 36-state set; Alice, a Bell holder,
    moves first."""
    g = _sigs(gen_example1())
    fd, fc = (6, 2), (6,)
    L = lambda lv, a=None: level_proj(6, lv, (a,))  # noqa: E731
    LC = lambda lv: level_proj(6, lv)  # noqa: E731
    p = lambda i, s=1: pm(6, i, s)  # noqa: E731
    pair = lambda i, n: [(p(i, 1), g[n]), (p(i, -1), g[n + 1])]  # noqa: E731
    ent = proj(np.eye(12)[4]) + proj(np.eye(12)[7])  # |2,0><2,0| + |3,1><3,1| on A (x) a

    b3 = make_node("A", fd, [
        (L([0], 0), _final("C", fc, pair(0, 29) + [(p(2), g[3])]), "A31"),
        (L([1], 0), _final("C", fc, pair(1, 23)), "A32"),
        (L([2], 0), _final("C", fc, pair(2, 11)), "A33"),
    ], residual=(Leaf(None), "rest"), name="A3")
    c53 = make_node("A", fd, [
        (L([3], 1), _final("B", fd, pair(2, 9)), "A531"),
        (L([4], 1), _final("B", fd, pair(3, 15)), "A532"),
        (L([5], 1), _final("B", fd, pair(4, 33) + [(p(2), g[5])]), "A533"),
    ], residual=(Leaf(None), "rest"), name="A53")
    c54_bob = make_node("B", fd, [
        (L([0]), Leaf(g[1]), "0"),
        (L([2]), _parity_tree("B", None, "A", 6, 2, g[7], g[8], "X78"), "2"),
    ], residual=(Leaf(None), "rest"), name="B54")
    c54 = make_node("A", fd, [
        (np.kron(proj(p(0, 1)), proj(ket(2, 0))), Leaf(g[25]), "0+1"),
        (np.kron(proj(p(0, -1)), proj(ket(2, 0))), Leaf(g[26]), "0-1"),
        (ent, c54_bob, "(2,0)+(3,1)"),
    ], residual=(Leaf(None), "rest"), name="A54")
    c56 = make_node("A", fd, [
        (ent, Leaf(g[4]), "(2,0)+(3,1)"),
        (np.kron(proj(p(4, 1)), proj(ket(2, 1))), Leaf(g[31]), "4+5"),
        (np.kron(proj(p(4, -1)), proj(ket(2, 1))), Leaf(g[32]), "4-5"),
    ], residual=(Leaf(None), "rest"), name="A56")
    b5 = make_node("C", fc, [
        (LC([0]), _final("B", fd, pair(0, 27) + [(p(2), g[2])]), "C51"),
        (LC([1]), _final("B", fd, pair(1, 21)), "C52"),
        (LC([2]), c53, "C53"),
        (LC([3]), c54, "C54"),
        (LC([4]), _final("A", fd, pair(3, 13)), "C55"),
    ], residual=(c56, "C56"), name="C5")
    a1 = make_node("B", fd, [
        (L([1], 0), _final("A", fd, pair(1, 19)), "B1"),
        (L([4], 0), _final("C", fc, pair(3, 17)), "B2"),
        (L([3], 0), b3, "B3"),
        (L([5], 0), _final("C", fc, pair(4, 35) + [(p(2), g[6])]), "B4"),
    ], residual=(b5, "B5"), name="B")
    A1 = L([0, 1, 2], 0) + L([3, 4, 5], 1)
    a2 = mirror_ancillas(a1, {"A": [0], "B": [0]})
    return make_node("A", fd, [(A1, a1, "A1"), (np.eye(12) - A1, a2, "A2")], name="root")


# builder recipes ---------------------------------------------------------

def _c2d_set(d: int) -> StateSet:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise ValueError("d must be an integer")
    if d < 3:
        raise ValueError("d must be >= 3 (no state family is defined for d=2)")
    return gen_theorem1(d) if d % 2 else gen_theorem2(d)


def builtin_ghz_c2d(d: int) -> MeasurementNode:
    """GHZ-assisted protocol for the 18(d-1)-state sets in (C^{2d})^{(x)3}."""
    states = _c2d_set(d)
    n = 2 * d
    tb = TreeBuilder(states, ResourceState.ghz(), {"A": 1, "B": 1, "C": 1})
    low, high = list(range(d)), list(range(d, n))

    def split_levels(party, sv, levels, child, anc="auto", residual=None, name=""):
        outs = [(tb.levels(party, [j], sv, anc), "%s%d" % (party, j), child(j)) for j in levels]
        return tb.split(party, sv, outs, residual=residual, name=name)

    def charlie_high(sv):
        return split_levels("C", sv, high, lambda j: lambda s: tb.resolve("A", s))

    def bob_high(sv):
        def child(j):
            if j == d:
                return lambda s: tb.disentangle(s, [("A", 0), ("B", 0)], lambda t: tb.resolve("C", t))
            return lambda s: tb.resolve("C", s)
        return split_levels("B", sv, high, child)

    def alice_high(sv):
        return split_levels("A", sv, high, lambda j: lambda s: tb.resolve("B", s))

    def charlie_low(sv):
        return split_levels("C", sv, low, lambda j: (lambda s: tb.resolve("B", s)) if j < d - 1 else alice_high,
                            anc=(0,))

    def alice_low(sv):
        return split_levels("A", sv, low, lambda j: (lambda s: tb.resolve("C", s)) if j < d - 1 else bob_high,
                            residual=("A%d" % d, charlie_low))

    def c1_branch(sv):
        return split_levels("B", sv, low, lambda j: (lambda s: tb.resolve("A", s)) if j < d - 1 else charlie_high,
                            anc=(1,), residual=("B%d" % d, alice_low))

    C1 = level_proj(n, low, (0,)) + level_proj(n, high, (1,))
    c1 = c1_branch(tb.project("C", C1, tb.start))
    c2 = mirror_ancillas(c1, {"A": [0], "B": [0], "C": [0]})
    return make_node("C", (n, 2), [(C1, c1, "C1"), (np.eye(2 * n) - C1, c2, "C2")], name="root")


def _odd_set(k, l, m) -> StateSet:
    return gen_theorem3(k, l, m)


def builtin_ghz_odd(k: int, l: int, m: int) -> MeasurementNode:
    """GHZ-assisted protocol for the 6(k+l+m)-5 state sets in
    C^{2k+1} x C^{2l+1} x C^{2m+1}."""
    states = _odd_set(k, l, m)
    tb = TreeBuilder(states, ResourceState.ghz(), {"A": 1, "B": 1, "C": 1})
    s = l if l % 2 == 0 else l + 1

    def greedy(sv):
        return tb.greedy(sv)

    def a3(sv):
        outs = [(level_proj(2 * l + 1, range(s), (0,)), "B'1", greedy),
                (level_proj(2 * l + 1, range(s, 2 * l), (0,)), "B'2", greedy)]
        return tb.split("B", sv, outs, residual=("B'3", greedy), reconstructed=True, name="B'")

    def b2(sv):
        outs = [(level_proj(2 * k + 1, [k], (1,)), "A1", lambda t: tb.resolve("B", t)),
                (level_proj(2 * k + 1, [2 * k], (None,)), "A2",
                 lambda t: tb.disentangle(t, [("A", 0), ("B", 0)], lambda u: tb.resolve("C", u, reconstructed=True))),
                ]
        return tb.split("A", sv, outs, residual=("A3", a3), name="A")

    def c1_branch(sv):
        outs = [(level_proj(2 * l + 1, [2 * l], (0,)), "B1", lambda t: tb.resolve("A", t))]
        return tb.split("B", sv, outs, residual=("B2", b2), name="B")

    C1 = level_proj(2 * m + 1, range(2 * m), (0,)) + level_proj(2 * m + 1, [2 * m], (1,))
    c1 = c1_branch(tb.project("C", C1, tb.start))
    c2 = mirror_ancillas(c1, {"A": [0], "B": [0], "C": [0]})
    dim = 2 * (2 * m + 1)
    return make_node("C", (2 * m + 1, 2), [(C1, c1, "C1"), (np.eye(dim) - C1, c2, "C2")], name="root")


def builtin_bell2_odd(k: int, l: int, m: int) -> MeasurementNode:
    """Protocol with two Bell(A,B) copies for the 6(k+l+m)-5 state sets.

    The first copy handles the straddling pair in C; the second copy handles
    the straddling pair in A that remains on the last branch.
    """
    states = _odd_set(k, l, m)
    res = [ResourceState.bell(("A", "B")), ResourceState.bell(("A", "B"))]
    tb = TreeBuilder(states, res, {"A": 2, "B": 2})
    dA, dB, dC = 2 * k + 1, 2 * l + 1, 2 * m + 1

    def greedy(sv):
        return tb.greedy(sv)

    def stage2_a1(sv):
        outs = [(level_proj(dB, [2 * l], (None, None)), "B''1",
                 lambda t: tb.disentangle(t, [("B", 0), ("B", 1)], lambda u: tb.resolve("A", u, reconstructed=True)))]
        return tb.split("B", sv, outs, residual=("B''2", greedy), reconstructed=True, name="B''")

    def stage2(sv):
        A1 = level_proj(dA, range(2 * k), (None, 0)) + level_proj(dA, [2 * k], (None, 1))
        a1 = stage2_a1(tb.project("A", A1, sv))
        a2 = mirror_ancillas(a1, {"A": [1], "B": [1]})
        return make_node("A", (dA, 2, 2), [(A1, a1, "A'1"), (np.eye(4 * dA) - A1, a2, "A'2")], name="A'")

    def charlie(sv):
        outs = [(level_proj(dC, [2 * m]), "C1", lambda t: tb.resolve("B", t)),
                (level_proj(dC, [0, 1]), "C2", greedy)]
        return tb.split("C", sv, outs, residual=("C3", stage2), name="C")

    def a1_branch(sv):
        outs = [(level_proj(dB, [l], (1, None)), "B1", lambda t: tb.resolve("C", t))]
        return tb.split("B", sv, outs, residual=("B2", charlie), name="B")

    A1 = level_proj(dA, range(2 * k), (0, None)) + level_proj(dA, [2 * k], (1, None))
    a1 = a1_branch(tb.project("A", A1, tb.start))
    a2 = mirror_ancillas(a1, {"A": [0], "B": [0]})
    return make_node("A", (dA, 2, 2), [(A1, a1, "A1"), (np.eye(4 * dA) - A1, a2, "A2")], name="root")


# registry ----------------------------------------------------------------

@dataclass
class BuiltinProtocol:
    name: str
    tree: Tree
    resource: list
    reference_set: StateSet


def _klm_from_dims(dims):
    if any(x % 2 == 0 or x < 5 for x in dims):
        raise ProtocolError("protocol needs odd local dimensions >= 5, got %s" % (dims,))
    return tuple((x - 1) // 2 for x in dims)


def builtin_for(name: str, states: StateSet) -> BuiltinProtocol:
    """Instantiate a built-in protocol for `states`, checking that the set is
    the one the protocol was designed for."""
    name = name.lower()
    if name in ("ghz-c6", "bell-c6"):
        ref = gen_example1()
        tree = builtin_ghz_c6() if name == "ghz-c6" else builtin_bell_c6()
        resource = [ResourceState.ghz()] if name == "ghz-c6" else [ResourceState.bell(("A", "B"))]
    elif name == "ghz-c2d":
        if len(set(states.dims)) != 1 or states.dims[0] % 2:
            raise ProtocolError("ghz-c2d needs equal even local dimensions, got %s" % (states.dims,))
        d = states.dims[0] // 2
        ref = _c2d_set(d)
        tree, resource = builtin_ghz_c2d(d), [ResourceState.ghz()]
    elif name in ("ghz-odd", "bell2-odd"):
        k, l, m = _klm_from_dims(states.dims)
        ref = _odd_set(k, l, m)
        if name == "ghz-odd":
            tree, resource = builtin_ghz_odd(k, l, m), [ResourceState.ghz()]
        else:
            tree = builtin_bell2_odd(k, l, m)
            resource = [ResourceState.bell(("A", "B")), ResourceState.bell(("A", "B"))]
    else:
        raise ProtocolError("unknown protocol %r; choose from %s" % (name, ", ".join(BUILTIN_NAMES)))
    if states.dims != ref.dims or {s.signature for s in states} != {s.signature for s in ref}:
        raise ProtocolError("protocol %s is not compatible with this state set (family %s)"
                            % (name, states.family.value if isinstance(states.family, Family) else states.family))
    return BuiltinProtocol(name, tree, resource, ref)


BUILTIN_NAMES = ("ghz-c6", "ghz-c2d", "ghz-odd", "bell-c6", "bell2-odd")
