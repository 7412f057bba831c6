"""One-sided twisted complexes over a p-dg algebra.

A twisted object is a list of generators ``(idempotent, shift)`` with a
strictly upper-triangular twist ``alpha`` whose ``(k, l)`` entry lies in
``e_k A e_l``.  A generator ``(i, s)`` stands for the object ``X_i<s>``; an
element of raw degree ``d`` placed at ``(k, l)`` has morphism-degree
``d + shift_l - shift_k``.  Morphisms are matrices over ``A`` composed with
the multiplication of ``A``.

Arrays of algebra elements have shape ``(rows, cols, dim A)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import gflin
from .pdgalg import Violation, h_decompose, iso_classes

__all__ = [
    "TwistedObject",
    "TwistedMorphism",
    "InvalidTwisted",
    "check_twisted",
    "validate_twisted",
    "matmul",
    "entrywise_d",
    "morphism_diff",
    "compose",
    "identity",
    "zero_morphism",
    "direct_sum",
    "direct_sum_maps",
    "shift",
    "tensor_h",
    "jordan_chain",
    "HomSpace",
    "IsoResult",
    "pdg_iso",
    "is_invertible",
]


class InvalidTwisted(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations[:5]))


def matmul(A, x, y):
    """Matrix product over ``A`` of element arrays."""
    if x.shape[1] != y.shape[0]:
        raise gflin.DimensionError(f"cannot multiply {x.shape[:2]} by {y.shape[:2]}")
    if x.shape[0] == 0 or y.shape[1] == 0 or x.shape[1] == 0:
        return np.zeros((x.shape[0], y.shape[1], A.n), dtype=np.int64)
    t = np.tensordot(x, A.mul, axes=([2], [0])) % A.p
    return np.tensordot(t, y, axes=([1, 2], [0, 2])).transpose(0, 2, 1) % A.p


def entrywise_d(A, x):
    return np.einsum("zx,nmx->nmz", A.diff, x) % A.p


class TwistedObject:
    """Generators ``(idempotent, shift)`` and a twist matrix over ``A``.

    ``keys`` optionally labels generators; composite constructions use them
    to fix a canonical order.
    """

    def __init__(self, A, gens, alpha=None, keys=None):
        self.A = A
        self.gens = tuple((int(i), int(s)) for i, s in gens)
        s = len(self.gens)
        if alpha is None:
            alpha = np.zeros((s, s, A.n), dtype=np.int64)
        self.alpha = np.asarray(alpha, dtype=np.int64).reshape(s, s, A.n) % A.p
        self.keys = tuple(keys) if keys is not None else None

    @property
    def size(self):
        return len(self.gens)

    @property
    def shifts(self):
        return [s for _, s in self.gens]

    def __eq__(self, other):
        return (isinstance(other, TwistedObject) and self.A is other.A
                and self.gens == other.gens and np.array_equal(self.alpha, other.alpha))

    def __hash__(self):
        return hash((self.gens, self.alpha.tobytes()))

    def __repr__(self):
        parts = [f"X{i + 1}<{s}>" if s else f"X{i + 1}" for i, s in self.gens]
        return f"TwistedObject({' + '.join(parts) or '0'})"

    def describe(self):
        lines = [repr(self)]
        for k in range(self.size):
            for l in range(self.size):
                if np.any(self.alpha[k, l]):
                    lines.append(f"  alpha[{k + 1},{l + 1}] = {self.A.fmt(self.alpha[k, l])}")
        return "\n".join(lines)


def _entry_violations(A, mat, src, tgt, want_degree, name):
    out = []
    for k in range(len(tgt)):
        for l in range(len(src)):
            v = mat[k, l]
            if not np.any(v):
                continue
            pc = A.piece(tgt[k][0], src[l][0])
            if not gflin.in_span(pc.basis, v, A.p):
                out.append(Violation(f"{name}-piece", (k + 1, l + 1),
                                     "entry not in e_k A e_l"))
                continue
            try:
                d = A.degree_of(v)
            except ValueError:
                out.append(Violation(f"{name}-homogeneous", (k + 1, l + 1)))
                continue
            if want_degree is not None and d + src[l][1] - tgt[k][1] != want_degree:
                out.append(Violation(f"{name}-degree", (k + 1, l + 1),
                                     f"morphism-degree {d + src[l][1] - tgt[k][1]}, "
                                     f"expected {want_degree}"))
    return out


def check_twisted(X):
    """Every violated condition of ``X``, each tagged with an index pair."""
    A = X.A
    out = []
    for i, _ in X.gens:
        if not 0 <= i < A.r:
            out.append(Violation("generator", (i + 1,), "unknown idempotent"))
    if out:
        return out
    for k in range(X.size):
        for l in range(k + 1):
            if np.any(X.alpha[k, l]):
                out.append(Violation("triangular", (k + 1, l + 1)))
    out += _entry_violations(A, X.alpha, X.gens, X.gens, 2, "alpha")
    if out:
        return out
    c = X.alpha
    for _ in range(A.p - 1):
        c = (entrywise_d(A, c) + matmul(A, X.alpha, c)) % A.p
    bad = np.argwhere(np.any(c, axis=2))
    for k, l in bad:
        out.append(Violation("p-differential", (int(k) + 1, int(l) + 1),
                             f"(d + alpha)^(p-1) alpha has entry {A.fmt(c[k, l])}"))
    return out


def validate_twisted(X):
    bad = check_twisted(X)
    if bad:
        raise InvalidTwisted(bad)
    return X


@dataclass
class TwistedMorphism:
    source: TwistedObject
    target: TwistedObject
    entries: np.ndarray
    degree: int

    def __post_init__(self):
        A = self.source.A
        self.entries = (np.asarray(self.entries, dtype=np.int64)
                        .reshape(self.target.size, self.source.size, A.n) % A.p)

    @property
    def A(self):
        return self.source.A

    def is_zero(self):
        return not np.any(self.entries)

    def __add__(self, other):
        return TwistedMorphism(self.source, self.target, self.entries + other.entries, self.degree)

    def __sub__(self, other):
        return TwistedMorphism(self.source, self.target, self.entries - other.entries, self.degree)

    def scale(self, c):
        return TwistedMorphism(self.source, self.target, self.entries * c, self.degree)

    def shifted(self, n):
        return TwistedMorphism(shift(self.source, n), shift(self.target, n), self.entries,
                               self.degree)

    def check(self):
        return _entry_violations(self.A, self.entries, self.source.gens, self.target.gens,
                                 self.degree, "morphism")


def morphism_diff(g):
    """``d(g) = d_entrywise(g) + beta g - g alpha``."""
    A = g.A
    e = (entrywise_d(A, g.entries) + matmul(A, g.target.alpha, g.entries)
         - matmul(A, g.entries, g.source.alpha)) % A.p
    return TwistedMorphism(g.source, g.target, e, g.degree + 2)


def compose(g, f):
    """``g after f``."""
    if f.target.gens != g.source.gens:
        raise gflin.DimensionError("morphisms are not composable")
    return TwistedMorphism(f.source, g.target, matmul(f.A, g.entries, f.entries),
                           f.degree + g.degree)


def identity(X):
    A = X.A
    e = np.zeros((X.size, X.size, A.n), dtype=np.int64)
    for m, (i, _) in enumerate(X.gens):
        e[m, m] = A.idempotents[i]
    return TwistedMorphism(X, X, e, 0)


def zero_morphism(X, Y, degree=0):
    return TwistedMorphism(X, Y, np.zeros((Y.size, X.size, X.A.n), dtype=np.int64), degree)


def _block_diag(A, mats):
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols, A.n), dtype=np.int64)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def direct_sum(*objs):
    A = objs[0].A
    gens = [g for X in objs for g in X.gens]
    return TwistedObject(A, gens, _block_diag(A, [X.alpha for X in objs]))


def direct_sum_maps(*objs):
    """Injections and projections of ``direct_sum(*objs)``."""
    S = direct_sum(*objs)
    ident = identity(S).entries
    inj, proj = [], []
    off = 0
    for X in objs:
        sl = slice(off, off + X.size)
        inj.append(TwistedMorphism(X, S, ident[:, sl], 0))
        proj.append(TwistedMorphism(S, X, ident[sl, :], 0))
        off += X.size
    return S, inj, proj


def shift(X, n):
    """``X<n>``."""
    return TwistedObject(X.A, [(i, s + n) for i, s in X.gens], X.alpha, X.keys)


def jordan_chain(A, idem, i, s):
    """The object ``X_idem (x) V_i<s>``: ``i+1`` copies linked by identities."""
    return tensor_h(TwistedObject(A, [(idem, 0)]), [(i, s)])


def tensor_h(X, V):
    """``X (x) V`` for an H-module ``V``.

    ``V`` is either a list of ``(i, s)`` meaning ``V_i<s>`` or an
    :class:`~pdgcat.pdgalg.HModule`.  For each summand the generators of
    ``X`` are replaced by ``i+1`` shifted copies ordered by decreasing
    internal degree, with twist ``alpha (x) I + id (x) J``.
    """
    if not isinstance(V, (list, tuple)):
        V = h_decompose(V)
    A = X.A
    parts = []
    for i, s in V:
        if not 0 <= i < A.p:
            raise ValueError(f"V_{i} does not exist for p={A.p}")
        w = i + 1
        gens = [(g, sh + s - 2 * (i - j)) for g, sh in X.gens for j in range(w)]
        size = X.size * w
        alpha = np.zeros((size, size, A.n), dtype=np.int64)
        for k in range(X.size):
            for l in range(X.size):
                for j in range(w):
                    alpha[k * w + j, l * w + j] = X.alpha[k, l]
        for m, (g, _) in enumerate(X.gens):
            for j in range(i):
                alpha[m * w + j, m * w + j + 1] = A.idempotents[g]
        parts.append(TwistedObject(A, gens, alpha))
    if not parts:
        return TwistedObject(A, [])
    return direct_sum(*parts)


class HomSpace:
    """Coordinates on all matrices ``X -> Y`` over ``A``.

    Basis elements are triples ``(n, m, row)`` where ``row`` indexes the
    basis of the piece ``e_{j_n} A e_{i_m}``; the recorded degree is the
    morphism-degree.
    """

    def __init__(self, X, Y):
        self.X, self.Y = X, Y
        A = self.A = X.A
        self.index = []
        self.degrees = []
        self.slices = {}
        off = 0
        for n, (j, t) in enumerate(Y.gens):
            for m, (i, s) in enumerate(X.gens):
                pc = A.piece(j, i)
                self.slices[n, m] = (off, pc)
                for row, d in enumerate(pc.degrees):
                    self.index.append((n, m, row))
                    self.degrees.append(d + s - t)
                off += pc.dim
        self.dim = off
        self._diff = None
        self._powers = {}

    def degree_indices(self, d):
        return [k for k, e in enumerate(self.degrees) if e == d]

    def present_degrees(self):
        return sorted(set(self.degrees))

    def to_coords(self, entries):
        entries = np.asarray(entries) if not isinstance(entries, TwistedMorphism) else entries.entries
        v = np.zeros(self.dim, dtype=np.int64)
        for (n, m), (off, pc) in self.slices.items():
            if pc.dim:
                v[off:off + pc.dim] = pc.coords(entries[n, m])
        return v

    def from_coords(self, v, degree=None):
        A = self.A
        e = np.zeros((self.Y.size, self.X.size, A.n), dtype=np.int64)
        for (n, m), (off, pc) in self.slices.items():
            if pc.dim:
                e[n, m] = (np.asarray(v[off:off + pc.dim]) @ pc.basis) % A.p
        if degree is None:
            nz = [self.degrees[k] for k in np.nonzero(np.asarray(v) % A.p)[0]]
            degree = nz[0] if nz else 0
        return TwistedMorphism(self.X, self.Y, e, degree)

    def basis_morphism(self, k):
        v = np.zeros(self.dim, dtype=np.int64)
        v[k] = 1
        return self.from_coords(v, self.degrees[k])

    def diff_matrix(self):
        """Matrix of the conjugated differential in these coordinates."""
        if self._diff is None:
            A = self.A
            p = A.p
            t, s = self.Y.size, self.X.size
            # all basis morphisms at once: B[k] is the entry array of basis element k
            B = np.zeros((self.dim, t, s, A.n), dtype=np.int64)
            for (n, m), (off, pc) in self.slices.items():
                if pc.dim:
                    B[off:off + pc.dim, n, m] = pc.basis
            dB = np.tensordot(B, A.diff, axes=([3], [1]))
            if t and s:
                beta = np.einsum("njx,xyz->njyz", self.Y.alpha, A.mul) % p
                dB += np.tensordot(B, beta, axes=([1, 3], [1, 2])).transpose(0, 2, 1, 3)
                alpha = np.einsum("jmy,xyz->jmxz", self.X.alpha, A.mul) % p
                dB -= np.tensordot(B, alpha, axes=([2, 3], [0, 2]))
            dB %= p
            D = np.zeros((self.dim, self.dim), dtype=np.int64)
            for (n, m), (off, pc) in self.slices.items():
                if pc.dim:
                    D[off:off + pc.dim, :] = dB[:, n, m][:, list(pc.pivots)].T
            self._diff = D % p
        return self._diff

    def diff_power(self, k):
        if k not in self._powers:
            self._powers[k] = gflin.matpow(self.diff_matrix(), k, self.A.p)
        return self._powers[k]

    def cycles(self, d):
        """Coordinates (rows) of degree-``d`` morphisms killed by the differential."""
        idx = self.degree_indices(d)
        if not idx:
            return np.zeros((0, self.dim), dtype=np.int64)
        D = self.diff_matrix()[:, idx]
        ker = gflin.kernel(D, self.A.p, len(idx))
        out = np.zeros((ker.shape[0], self.dim), dtype=np.int64)
        out[:, idx] = ker
        return out


@dataclass
class IsoResult:
    status: str  # "isomorphic", "not-isomorphic" or "unknown"
    g: TwistedMorphism = None
    g_inv: TwistedMorphism = None

    def __bool__(self):
        return self.status == "isomorphic"


def _realized(g):
    """Matrix of ``g`` acting on the column modules ``(+) e_i A``."""
    A = g.A
    t, s = g.target.size, g.source.size
    M = np.zeros((t * A.n, s * A.n), dtype=np.int64)
    for n in range(t):
        for m in range(s):
            if np.any(g.entries[n, m]):
                M[n * A.n:(n + 1) * A.n, m * A.n:(m + 1) * A.n] = A.left_matrix(g.entries[n, m])
    return M % A.p


def _column_module_basis(X):
    A = X.A
    blocks = []
    for m, (i, _) in enumerate(X.gens):
        # right ideal e_i A
        b = gflin.span_basis(A.left_matrix(A.idempotents[i]).T, A.p, A.n)
        full = np.zeros((b.shape[0], X.size * A.n), dtype=np.int64)
        full[:, m * A.n:(m + 1) * A.n] = b
        blocks.append(full)
    if not blocks:
        return np.zeros((0, 0), dtype=np.int64)
    return np.vstack(blocks)


def is_invertible(g):
    """Whether ``g`` is invertible as a morphism of the underlying generator lists."""
    A = g.A
    src = _column_module_basis(g.source)
    tgt = _column_module_basis(g.target)
    if src.shape[0] != tgt.shape[0]:
        return False
    if src.shape[0] == 0:
        return True
    img = (_realized(g) @ src.T) % A.p
    return gflin.rank(img, A.p) == src.shape[0]


def _generator_profile(X, classes):
    cls = {k: c for c, members in enumerate(classes) for k in members}
    return Counter((cls[i], s) for i, s in X.gens)


def pdg_iso(X, Y, seed=0, samples=200):
    """Search for a degree-0, d-closed invertible ``g: X -> Y``.

    Returns an :class:`IsoResult`.  ``not-isomorphic`` is only reported when
    the generator multisets differ; exhausting the search gives ``unknown``.
    """
    A = X.A
    p = A.p
    classes = iso_classes(A)
    if _generator_profile(X, classes) != _generator_profile(Y, classes):
        return IsoResult("not-isomorphic")
    if X.size == 0:
        z = zero_morphism(X, Y)
        return IsoResult("isomorphic", z, zero_morphism(Y, X))
    H = HomSpace(X, Y)
    Z = H.cycles(0)
    if Z.shape[0] == 0:
        return IsoResult("unknown")
    rng = np.random.default_rng(seed)
    candidates = list(Z) + [Z.sum(axis=0) % p]
    for _ in range(samples):
        candidates.append((rng.integers(0, p, Z.shape[0]) @ Z) % p)
    Hinv = HomSpace(Y, X)
    for c in candidates:
        g = H.from_coords(c, 0)
        if not is_invertible(g):
            continue
        h = _inverse_of(g, Hinv)
        if h is not None:
            return IsoResult("isomorphic", g, h)
    return IsoResult("unknown")


def _inverse_of(g, Hinv):
    """Solve ``h g = id`` and ``g h = id`` among degree-0 maps ``Y -> X``."""
    A = g.A
    p = A.p
    idx = Hinv.degree_indices(0)
    X, Y = g.source, g.target
    idX, idY = identity(X).entries.reshape(-1), identity(Y).entries.reshape(-1)
    cols = []
    for k in idx:
        h = Hinv.basis_morphism(k)
        cols.append(np.concatenate([matmul(A, h.entries, g.entries).reshape(-1),
                                    matmul(A, g.entries, h.entries).reshape(-1)]))
    if not cols:
        return None
    M = np.array(cols).T % p
    sol = gflin.solve(M, np.concatenate([idX, idY]), p)
    if sol is None:
        return None
    v = np.zeros(Hinv.dim, dtype=np.int64)
    v[idx] = sol
    return Hinv.from_coords(v, 0)
