"""Orthogonality-preserving measurement constraints and their Hermitian solution space.

For a party P and a candidate POVM element E = M^dagger M on P's system,
orthogonality preservation demands <s_i| E (x) I (x) I |s_j> = 0 for i != j.
For product states this factorises into <p_i|E|p_j> * (overlap of the other
two factors). Each pair with a nonzero overlap contributes the real and
imaginary parts of that expression as linear equations in the d^2 real
parameters of a Hermitian E. If the only solutions are multiples of the
identity, P cannot start with a nontrivial orthogonality-preserving
measurement.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .families import PARTIES, StateSet, check_orthogonality
from .tensor import ORTHO_TOL, Operator

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-8
IDENTITY_TOL = 1e-8
OVERLAP_EPS = 1e-12


class OrthogonalityError(ValueError):
    """The input set is not pairwise orthogonal."""

    def __init__(self, report):
        self.report = report
        super().__init__("%d non-orthogonal pair(s), max overlap %.3g"
                         % (len(report.violations), report.max_overlap))


def _party_index(party) -> int:
    if isinstance(party, str):
        return PARTIES.index(party.upper())
    if party in (0, 1, 2):
        return int(party)
    raise ValueError("party must be one of A, B, C")


def hermitian_basis(d: int) -> np.ndarray:
    """Trace-orthonormal basis of d x d Hermitian matrices, shape (d*d, d, d).

    Order: d diagonal units, then for each p < q the symmetric and the
    antisymmetric-imaginary element.
    """
    out = np.zeros((d * d, d, d), dtype=complex)
    for p in range(d):
        out[p, p, p] = 1.0
    n = d
    r = 1 / np.sqrt(2)
    for p in range(d):
        for q in range(p + 1, d):
            out[n, p, q] = out[n, q, p] = r
            out[n + 1, p, q] = 1j * r
            out[n + 1, q, p] = -1j * r
            n += 2
    return out


def params_to_matrix(x: np.ndarray, d: int) -> np.ndarray:
    return np.tensordot(np.asarray(x, dtype=float), hermitian_basis(d), axes=1)


def matrix_to_params(h: np.ndarray) -> np.ndarray:
    d = h.shape[0]
    return np.real(np.einsum("kij,ji->k", hermitian_basis(d), h))


@dataclass
class ConstraintSystem:
    party: str
    dim: int
    rows: np.ndarray
    provenance: list = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


@dataclass
class SolutionSpace:
    party: str
    basis: list
    singular_values: np.ndarray
    identity_residual: float

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def trivial(self) -> bool:
        return self.dim == 1 and self.identity_residual <= IDENTITY_TOL


def build_constraints(states: StateSet, party) -> ConstraintSystem:
    """Stack the real linear constraints that an orthogonality-preserving POVM
    element on `party` must satisfy. Pairs whose other two factors are
    orthogonal impose nothing and are skipped."""
    if len(states) == 0:
        raise ValueError("empty state set")
    p = _party_index(party)
    d = states.dims[p]
    others = [q for q in range(3) if q != p]
    local = states.factor_matrix(p)
    ov = np.ones((len(states), len(states)), dtype=complex)
    for q in others:
        f = states.factor_matrix(q)
        ov = ov * (f.conj().T @ f)
    iu, ju = np.triu_indices(len(states), 1)
    keep = np.abs(ov[iu, ju]) > OVERLAP_EPS
    iu, ju = iu[keep], ju[keep]
    basis = hermitian_basis(d)
    # coef[n, k] = <a_i| E_k |a_j> * overlap
    left = local[:, iu].conj().T
    right = local[:, ju].T
    coef = np.einsum("np,kpq,nq->nk", left, basis, right) * ov[iu, ju][:, None]
    rows, prov = [], []
    for n in range(coef.shape[0]):
        pair = (int(iu[n]), int(ju[n]))
        for part, vec in (("re", coef[n].real), ("im", coef[n].imag)):
            if np.max(np.abs(vec)) > OVERLAP_EPS:
                rows.append(vec)
                prov.append(pair + (part,))
    rows = np.array(rows).reshape(-1, d * d)
    return ConstraintSystem(PARTIES[p], d, rows, prov)


def hermitian_nullspace(cs: ConstraintSystem, rtol: float = RANK_RTOL) -> SolutionSpace:
    """Solution space of the constraint system via SVD; singular values below
    rtol * sigma_max count as zero."""
    d = cs.dim
    n = d * d
    if cs.n_rows == 0:
        null = np.eye(n)
        s = np.zeros(0)
    else:
        _, s, vh = np.linalg.svd(cs.rows, full_matrices=True)
        rank = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
        null = vh[rank:].T
    hb = hermitian_basis(d)
    basis = [Operator(np.tensordot(null[:, c], hb, axes=1), frozenset({"hermitian"}))
             for c in range(null.shape[1])]
    residual = float("nan")
    if len(basis) == 1:
        h = np.asarray(basis[0])
        fit = np.trace(h) / d * np.eye(d)
        residual = float(np.linalg.norm(h - fit) / np.linalg.norm(h))
    return SolutionSpace(cs.party, basis, s, residual)


@dataclass
class Verdict:
    family: str
    params: dict
    spaces: list
    orthogonality: object

    @property
    def locally_trivial(self) -> bool:
        return all(sp.trivial for sp in self.spaces)

    @property
    def verdict(self) -> str:
        return "locally-trivial" if self.locally_trivial else "nontrivial"

    @property
    def dims(self) -> tuple:
        return tuple(sp.dim for sp in self.spaces)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": dict(self.params),
            "per_party": [
                {"party": sp.party, "dim": sp.dim, "trivial": sp.trivial,
                 "identity_residual": None if np.isnan(sp.identity_residual) else sp.identity_residual}
                for sp in self.spaces
            ],
            "verdict": self.verdict,
            "orthogonality": {"passed": self.orthogonality.passed,
                              "max_overlap": self.orthogonality.max_overlap},
        }


def verify_nonlocality(states: StateSet, rtol: float = RANK_RTOL,
                       ortho_tol: float = ORTHO_TOL) -> Verdict:
    """Run the triviality check for all three parties.

    `locally-trivial` means no party can start with a nontrivial
    orthogonality-preserving measurement. This is a certificate of local
    indistinguishability for the set, not a general LOCC decision procedure.
    """
    report = check_orthogonality(states, ortho_tol)
    if not report.passed:
        raise OrthogonalityError(report)
    spaces = []
    for party in PARTIES:
        sp = hermitian_nullspace(build_constraints(states, party), rtol)
        logger.debug("party %s: solution dim %d", party, sp.dim)
        spaces.append(sp)
    return Verdict(states.family.value, dict(states.params), spaces, report)
