"""Small dense complex linear algebra for kets, tensor products and projectors.

Kronecker ordering is fixed throughout the package: the first factor is the
slowest index. Global states are laid out as A, B, C, with each party's
ancilla qubits appended directly after that party's system factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

SQRT1_2 = 1.0 / np.sqrt(2.0)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PROJECTOR_TOL = 1e-10
ORTHO_TOL = 1e-10
PROB_EPS = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ket:
    """A complex vector, optionally tagged as normalized."""

    amps: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("a ket needs a non-empty 1-d amplitude vector")
        object.__setattr__(self, "amps", amps)
        if self.normalized and abs(np.vdot(amps, amps).real - 1.0) > NORM_TOL:
            raise ValueError("ket tagged normalized has norm^2 %r" % np.vdot(amps, amps).real)

    @property
    def dim(self) -> int:
        return self.amps.size

    def __eq__(self, other):
        return isinstance(other, Ket) and np.array_equal(self.amps, other.amps)

    def __hash__(self):
        return hash(self.amps.tobytes())

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amps, dtype=dtype)


@dataclass(frozen=True, eq=False)
class Operator:
    """A square complex matrix with optional `hermitian` / `projector` tags.

    Tags are checked at construction, so a tagged Operator is a certificate.
    """

    entries: np.ndarray
    tags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError("operator must be a non-empty square matrix")
        object.__setattr__(self, "entries", m)
        tags = frozenset(self.tags)
        if "projector" in tags:
            tags = tags | {"hermitian"}
        object.__setattr__(self, "tags", tags)
        if "hermitian" in tags and not is_hermitian(m):
            raise ValueError("operator tagged hermitian is not Hermitian")
        if "projector" in tags and not is_projector(m):
            raise ValueError("operator tagged projector fails P^2 = P")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def projector(cls, m) -> "Operator":
        return cls(m, frozenset({"projector"}))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def is_projector(m, tol: float = PROJECTOR_TOL) -> bool:
    m = np.asarray(m)
    return is_hermitian(m, tol) and bool(np.max(np.abs(m @ m - m), initial=0.0) <= tol)


def basis_ket(dim: int, i: int) -> Ket:
    if dim < 1:
        raise ValueError("dimension must be positive")
    if not 0 <= i < dim:
        raise IndexError("basis index %d out of range for dimension %d" % (i, dim))
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return Ket(v, normalized=True)


def pm_ket(dim: int, i: int, sign: str | int) -> Ket:
    """(|i> + sign |i+1>) / sqrt(2)."""
    s = _sign(sign)
    if not 0 <= i < dim - 1:
        raise IndexError("level %d has no successor in dimension %d" % (i, dim))
    v = np.zeros(dim, dtype=complex)
    v[i] = SQRT1_2
    v[i + 1] = s * SQRT1_2
    return Ket(v, normalized=True)


def _sign(sign) -> int:
    if sign in ("+", 1, +1):
        return 1
    if sign in ("-", "−", -1):
        return -1
    raise ValueError("sign must be '+' or '-', got %r" % (sign,))


def tensor(*kets: Ket) -> Ket:
    """Kronecker product; the first argument is the slowest index."""
    if not kets:
        raise ValueError("tensor of nothing")
    amps = reduce(np.kron, (np.asarray(k) for k in kets))
    return Ket(amps, normalized=all(k.normalized for k in kets))


def inner(a: Ket, b: Ket) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch: %d vs %d" % (a.dim, b.dim))
    return complex(np.vdot(a.amps, b.amps))


def outer(a, b=None) -> np.ndarray:
    a = np.asarray(a)
    b = a if b is None else np.asarray(b)
    return np.outer(a, b.conj())


def apply_projector(P: Operator, v: Ket) -> tuple[Ket, float, Ket | None]:
    """Apply a projector to a ket.

    Returns the unnormalized image P|v>, the probability <v|P|v>, and the
    renormalized post-measurement ket (None when the probability is below
    1e-12).
    """
    if "projector" not in P.tags and not is_projector(P.entries):
        raise ValueError("operator is not a projector")
    if P.dim != v.dim:
        raise ValueError("dimension mismatch: %d vs %d" % (P.dim, v.dim))
    w = P.entries @ v.amps
    prob = float(np.vdot(v.amps, w).real)
    post = None
    if prob > PROB_EPS:
        post = Ket(w / np.sqrt(prob))
    return Ket(w), prob, post


def kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def apply_local(op: np.ndarray, vec: np.ndarray, dims: tuple[int, ...], axis: int) -> np.ndarray:
    """Apply `op` to tensor factor `axis` of a flat state vector."""
    pre = int(np.prod(dims[:axis], dtype=int))
    post = int(np.prod(dims[axis + 1:], dtype=int))
    t = vec.reshape(pre, dims[axis], post)
    return np.einsum("ij,ajb->aib", op, t).reshape(-1)
