"""Exact linear algebra over a prime field F_p.

Matrices are numpy int64 arrays with entries kept in [0, p).  All routines
are pure: inputs are copied before elimination.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionError",
    "as_matrix",
    "rref",
    "rank",
    "kernel",
    "solve",
    "solve_many",
    "inverse",
    "span_basis",
    "subspace_quotient",
    "in_span",
    "matmul",
    "matpow",
    "GradedSpace",
    "LinearMap",
]


class DimensionError(ValueError):
    pass


def as_matrix(m, p, cols=None):
    a = np.array(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else np.zeros((0, cols or 0), dtype=np.int64)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {a.shape}")
    return a % p


def _inv(a, p):
    return pow(int(a), p - 2, p)


def rref(m, p):
    """Reduced row echelon form of ``m`` over F_p.

    Returns ``(R, pivots)`` where ``R`` has the same shape as ``m`` and
    ``pivots`` lists the pivot column of each nonzero row.
    """
    a = as_matrix(m, p).copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * _inv(a[r, c], p)) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m, p):
    return len(rref(m, p)[1])


def kernel(m, p, ncols=None):
    """Basis of the right null space ``{x : m x = 0}`` as rows of a matrix."""
    a = as_matrix(m, p, ncols)
    n = a.shape[1] if ncols is None else ncols
    if a.size == 0:
        return np.eye(n, dtype=np.int64)
    r, piv = rref(a, p)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        out[i, f] = 1
        for row, pc in enumerate(piv):
            out[i, pc] = (-r[row, f]) % p
    return out


def solve_many(m, b, p):
    """Solve ``m X = B`` column by column.

    ``b`` is a matrix whose columns are right-hand sides.  Returns a matrix
    of solutions, or ``None`` if some column is inconsistent.
    """
    a = as_matrix(m, p)
    bb = np.array(b, dtype=np.int64) % p
    if bb.ndim == 1:
        bb = bb.reshape(-1, 1)
    if bb.shape[0] != a.shape[0]:
        raise DimensionError(f"rhs has {bb.shape[0]} rows, matrix has {a.shape[0]}")
    n = a.shape[1]
    aug = np.concatenate([a, bb], axis=1)
    r, piv = rref(aug, p)
    if any(c >= n for c in piv):
        return None
    x = np.zeros((n, bb.shape[1]), dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = r[row, n:]
    return x


def solve(m, b, p):
    """One solution of ``m x = b`` or ``None`` when the system is inconsistent."""
    a = as_matrix(m, p)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"rhs has length {b.shape[0]}, matrix has {a.shape[0]} rows")
    x = solve_many(a, b.reshape(-1, 1), p)
    return None if x is None else x[:, 0]


def inverse(m, p):
    a = as_matrix(m, p)
    if a.shape[0] != a.shape[1]:
        raise DimensionError("inverse of a non-square matrix")
    x = solve_many(a, np.eye(a.shape[0], dtype=np.int64), p)
    if x is None:
        return None
    return x


def span_basis(vectors, p, ncols=None):
    """Row-reduced basis (rows) of the span of ``vectors``."""
    a = as_matrix(vectors, p, ncols)
    if a.shape[0] == 0:
        return a
    r, piv = rref(a, p)
    return r[: len(piv)]


def in_span(basis, v, p):
    basis = as_matrix(basis, p, len(v))
    if basis.shape[0] == 0:
        return not np.any(np.asarray(v) % p)
    return solve(basis.T, v, p) is not None


def subspace_quotient(ambient_dim, subspace_basis, vectors, p):
    """Basis of ``span(vectors)`` modulo ``span(subspace_basis)``.

    Returns ``(dim, reps)`` where ``reps`` is a list of vectors taken from
    ``vectors`` whose classes form a basis of the image in the quotient.
    """
    sub = span_basis(subspace_basis, p, ambient_dim)
    acc = sub
    reps = []
    for v in vectors:
        v = np.asarray(v, dtype=np.int64) % p
        trial = np.vstack([acc, v.reshape(1, -1)]) if acc.shape[0] else v.reshape(1, -1)
        if rank(trial, p) > acc.shape[0]:
            acc = span_basis(trial, p)
            reps.append(v)
    return len(reps), reps


def matmul(a, b, p):
    """``a @ b mod p``; uses float64 BLAS when every partial sum is exact."""
    if a.shape[1] * (p - 1) ** 2 < 2 ** 52:
        return (a.astype(np.float64) @ b.astype(np.float64) % p).astype(np.int64)
    return (a @ b) % p


def matpow(m, k, p):
    a = as_matrix(m, p)
    out = np.eye(a.shape[0], dtype=np.int64)
    for _ in range(k):
        out = matmul(out, a, p)
    return out


@dataclass(frozen=True)
class GradedSpace:
    """Ordered basis of labelled homogeneous vectors."""

    labels: tuple
    degrees: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.degrees):
            raise DimensionError("labels and degrees differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        return cls(tuple(l for l, _ in pairs), tuple(int(d) for _, d in pairs))

    @property
    def dim(self):
        return len(self.labels)

    def shift(self, n):
        """The space shifted by ``<n>``: every degree drops by ``n``."""
        return GradedSpace(self.labels, tuple(d - n for d in self.degrees))

    def graded_dim(self):
        out = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def indices_in_degree(self, d):
        return [i for i, e in enumerate(self.degrees) if e == d]


@dataclass(frozen=True)
class LinearMap:
    source: GradedSpace
    target: GradedSpace
    matrix: np.ndarray
    degree: int
    p: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64) % self.p
        if m.shape != (self.target.dim, self.source.dim):
            raise DimensionError(
                f"matrix shape {m.shape} does not match {self.target.dim}x{self.source.dim}"
            )
        object.__setattr__(self, "matrix", m)
        for i, j in zip(*np.nonzero(m)):
            if self.target.degrees[i] != self.source.degrees[j] + self.degree:
                raise ValueError(
                    f"entry ({i},{j}) breaks homogeneity of degree {self.degree}"
                )

    def compose(self, other):
        """``self after other``."""
        if other.target != self.source:
            raise DimensionError("maps are not composable")
        return LinearMap(other.source, self.target, self.matrix @ other.matrix,
                         self.degree + other.degree, self.p)

    def __call__(self, v):
        return (self.matrix @ np.asarray(v, dtype=np.int64)) % self.p
