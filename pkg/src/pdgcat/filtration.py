"""Fantastic filtrations, subquotient idempotents and presented modules."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gflin
from .pdgalg import PdgAlgebra, Violation, make_piece
from .twisted import (
    HomSpace,
    TwistedMorphism,
    TwistedObject,
    compose,
    identity,
    morphism_diff,
    zero_morphism,
)

__all__ = [
    "FantasticCertificate",
    "verify_fantastic",
    "canonical_filtration",
    "end_algebra",
    "generator_projection",
    "SubquotientIdempotent",
    "subquotient_violations",
    "check_subquotient",
    "restricted_diff",
    "restricted_diff_matrix",
    "degree0_idempotents",
    "subquotient_pairs",
    "split_completion",
    "PresentedModule",
    "PresentedHom",
    "presented_hom",
]


@dataclass
class FantasticCertificate:
    obj: TwistedObject
    pieces: list
    u: list  # X -> X_i
    v: list  # X_i -> X


def _is_id(f):
    return np.array_equal(f.entries, identity(f.source).entries)


def verify_fantastic(cert):
    """``None`` when all four conditions hold, else the first failure as a Violation.

    Indices in witnesses are 1-based.
    """
    X, u, v = cert.obj, cert.u, cert.v
    m = len(cert.pieces)
    for i in range(m):
        for j in range(m):
            uv = compose(u[i], v[j])
            if (i == j and not _is_id(uv)) or (i != j and not uv.is_zero()):
                return Violation("orthogonality", (i + 1, j + 1), "u_i v_j is not delta_ij id")
    total = zero_morphism(X, X)
    for j in range(m):
        total = total + compose(v[j], u[j])
    if not _is_id(total):
        return Violation("completeness", (), "sum of v_j u_j is not the identity")
    for i in range(m):
        if not compose(morphism_diff(u[i]), v[i]).is_zero():
            return Violation("closed-pieces", (i + 1,), "d(u_i) v_i is nonzero")
    for i in range(m):
        w = compose(morphism_diff(v[i]), u[i])
        # the image lies in F_{i-1} iff every later projection kills it
        for j in range(i, m):
            if not compose(u[j], w).is_zero():
                return Violation("containment", (i + 1, j + 1),
                                 "image of d(v_i) u_i escapes F_{i-1}")
    return None


def canonical_filtration(X, order=None):
    """Filtration of ``X`` by its generators, in ``order`` (default: generator order)."""
    A = X.A
    order = list(range(X.size)) if order is None else list(order)
    idX = identity(X).entries
    pieces, us, vs = [], [], []
    for k in order:
        P = TwistedObject(A, [X.gens[k]])
        pieces.append(P)
        us.append(TwistedMorphism(X, P, idX[k:k + 1, :], 0))
        vs.append(TwistedMorphism(P, X, idX[:, k:k + 1], 0))
    return FantasticCertificate(X, pieces, us, vs)


def end_algebra(X):
    """``End(X)`` as a p-dg algebra."""
    H = HomSpace(X, X)
    A = X.A
    p = A.p
    N = H.dim
    basis = [H.basis_morphism(k) for k in range(N)]
    mul = np.zeros((N, N, N), dtype=np.int64)
    for i in range(N):
        for j in range(N):
            if basis[i].entries.any() and basis[j].entries.any():
                c = compose(basis[i], basis[j])
                mul[i, j] = H.to_coords(c.entries)
    diff = H.diff_matrix().copy()
    labels = [f"{n + 1}<-{m + 1}:{A.labels[int(np.nonzero(H.slices[n, m][1].basis[r])[0][0])]}"
              for n, m, r in H.index]
    # generator projections need not be closed, so only the unit is declared
    unit = H.to_coords(identity(X).entries)
    return PdgAlgebra(p, labels, list(H.degrees), mul, diff, unit, [unit], name="End")


def generator_projection(X, k):
    """The projection onto generator ``k`` as an element of :func:`end_algebra`."""
    e = np.zeros((X.size, X.size, X.A.n), dtype=np.int64)
    e[k, k] = X.A.idempotents[X.gens[k][0]]
    return HomSpace(X, X).to_coords(e)


@dataclass
class SubquotientIdempotent:
    e: np.ndarray
    w: np.ndarray


def subquotient_violations(e, w, A):
    """Names of the failing identities among the five defining ones."""
    p = A.p
    e = np.asarray(e) % p
    w = np.asarray(w) % p
    bad = []
    if not np.array_equal(A.mult(e, e), e):
        bad.append("e^2 = e")
    if not np.array_equal(A.mult(w, w), w):
        bad.append("w^2 = w")
    if not (np.array_equal(A.mult(w, e), e) and np.array_equal(A.mult(e, w), e)):
        bad.append("we = ew = e")
    if np.any(A.mult(w, A.d(w))):
        bad.append("w d(w) = 0")
    c = (w - e) % p
    if np.any(A.mult(c, A.d(c))):
        bad.append("(w-e) d(w-e) = 0")
    return bad


def check_subquotient(e, w, A):
    return not subquotient_violations(e, w, A)


def restricted_diff(f, g, e, A):
    """``f d(f g e) e``."""
    return A.mult(A.mult(f, A.d(A.mult(A.mult(f, g), e))), e)


def _corner(A, f, e):
    imgs = np.array([A.mult(A.mult(f, A.basis_vector(i)), e) for i in range(A.n)])
    return make_piece(imgs, A.degrees, A.p, A.n)


def restricted_diff_matrix(f, e, A):
    """The restricted differential on ``f A e`` in a row-reduced basis; returns ``(piece, matrix)``."""
    pc = _corner(A, f, e)
    cols = [pc.coords(restricted_diff(f, b, e, A)) for b in pc.basis]
    M = np.array(cols, dtype=np.int64).T if cols else np.zeros((0, 0), dtype=np.int64)
    return pc, M % A.p


def degree0_idempotents(A, limit=20000):
    """All idempotents of degree 0, by enumeration (refuses large searches)."""
    p = A.p
    idx = [i for i, d in enumerate(A.degrees) if d == 0]
    if p ** len(idx) > limit:
        raise ValueError(f"degree-0 part too large to enumerate ({p}^{len(idx)})")
    out = []
    for coeffs in itertools.product(range(p), repeat=len(idx)):
        v = np.zeros(A.n, dtype=np.int64)
        v[idx] = coeffs
        if np.array_equal(A.mult(v, v), v):
            out.append(v)
    return out


def subquotient_pairs(A, limit=20000):
    """All subquotient pairs ``(e, w)`` with ``e`` and ``w`` of degree 0."""
    ids = degree0_idempotents(A, limit)
    return [SubquotientIdempotent(e, w) for e in ids for w in ids if check_subquotient(e, w, A)]


def split_completion(A, pairs):
    """Adjoin a new object for each subquotient pair.

    The result has one idempotent per old idempotent followed by one per
    pair; its hom pieces are ``f A e`` with the restricted differential.
    Further subquotient idempotents of the result can be found again with
    :func:`subquotient_pairs`.
    """
    p = A.p
    for k, pr in enumerate(pairs):
        bad = subquotient_violations(pr.e, pr.w, A)
        if bad:
            raise ValueError(f"pair {k + 1} is not a subquotient idempotent: {', '.join(bad)}")
    objs = [np.asarray(x) % p for x in A.idempotents] + [np.asarray(pr.e) % p for pr in pairs]
    pieces, offsets, labels, degrees, elems = {}, {}, [], [], []
    for a, fa in enumerate(objs):
        for b, fb in enumerate(objs):
            pc = _corner(A, fa, fb)
            pieces[a, b] = pc
            offsets[a, b] = len(labels)
            for r in range(pc.dim):
                labels.append(f"{a + 1}<-{b + 1}#{r}")
                degrees.append(pc.degrees[r])
                elems.append((a, b, pc.basis[r]))
    N = len(labels)
    mul = np.zeros((N, N, N), dtype=np.int64)
    diff = np.zeros((N, N), dtype=np.int64)
    for i, (a, b, x) in enumerate(elems):
        dx = A.mult(A.mult(objs[a], A.d(x)), objs[b])
        o = offsets[a, b]
        diff[o:o + pieces[a, b].dim, i] = pieces[a, b].coords(dx)
        for j, (b2, c, y) in enumerate(elems):
            if b2 != b:
                continue
            o = offsets[a, c]
            mul[i, j, o:o + pieces[a, c].dim] = pieces[a, c].coords(A.mult(x, y))
    idem = []
    for a, fa in enumerate(objs):
        v = np.zeros(N, dtype=np.int64)
        o = offsets[a, a]
        v[o:o + pieces[a, a].dim] = pieces[a, a].coords(fa)
        idem.append(v)
    return PdgAlgebra(p, labels, degrees, mul, diff, sum(idem) % p, idem,
                      name=f"{A.name}+split")


@dataclass
class PresentedModule:
    """The cokernel-style object presented by a closed degree-0 ``f: X -> Y``."""

    f: TwistedMorphism

    def __post_init__(self):
        if self.f.degree != 0 or not morphism_diff(self.f).is_zero():
            raise ValueError("a presentation needs a closed degree-0 morphism")


@dataclass
class PresentedHom:
    """Per degree: valid pairs, null pairs and quotient representatives."""

    source: PresentedModule
    target: PresentedModule
    h0: HomSpace
    h1: HomSpace
    valid: dict
    null: dict
    reps: dict

    def graded_dim(self):
        return {d: len(r) for d, r in self.reps.items() if r}

    def split(self, v):
        k = self.h0.dim
        return (self.h0.from_coords(v[:k]), self.h1.from_coords(v[k:]))

    def join(self, phi0, phi1):
        return np.concatenate([self.h0.to_coords(phi0.entries), self.h1.to_coords(phi1.entries)])

    def diff_vector(self, v):
        k = self.h0.dim
        p = self.h0.A.p
        return np.concatenate([self.h0.diff_matrix() @ v[:k], self.h1.diff_matrix() @ v[k:]]) % p

    def is_null(self, v, degree):
        return gflin.in_span(self.null[degree], v, self.h0.A.p)

    def diff_on_quotient(self, degree):
        """Matrix of the differential from degree ``degree`` to ``degree + 2`` on representatives."""
        p = self.h0.A.p
        src = self.reps.get(degree, [])
        tgt = self.reps.get(degree + 2, [])
        null = list(self.null.get(degree + 2, []))
        cols = []
        for r in src:
            dv = self.diff_vector(r)
            rows = list(tgt) + null
            if not rows:
                cols.append(np.zeros(0, dtype=np.int64))
                continue
            sol = gflin.solve(np.array(rows).T, dv, p)
            cols.append(sol[:len(tgt)])
        return np.array(cols, dtype=np.int64).T.reshape(len(tgt), len(src))


def presented_hom(M, N):
    """Pairs ``(phi0, phi1)`` with ``phi1 f = f' phi0`` modulo ``phi1 = f' eta``."""
    f, g = M.f, N.f
    X, Y = f.source, f.target
    X2, Y2 = g.source, g.target
    A = X.A
    p = A.p
    h0, h1, he = HomSpace(X, X2), HomSpace(Y, Y2), HomSpace(Y, X2)
    hc = HomSpace(X, Y2)
    degs = sorted(set(h0.degrees) | set(h1.degrees))
    valid, null, reps = {}, {}, {}
    for d in degs:
        i0, i1, ie = h0.degree_indices(d), h1.degree_indices(d), he.degree_indices(d)
        # constraint columns on (phi0, phi1)
        cols = []
        for k in i0:
            cols.append((-hc.to_coords(compose(g, h0.basis_morphism(k)).entries)) % p)
        for k in i1:
            cols.append(hc.to_coords(compose(h1.basis_morphism(k), f).entries))
        full = h0.dim + h1.dim
        if not cols:
            valid[d] = np.zeros((0, full), dtype=np.int64)
        else:
            K = gflin.kernel(np.array(cols).T, p, len(cols))
            V = np.zeros((K.shape[0], full), dtype=np.int64)
            V[:, i0] = K[:, :len(i0)]
            V[:, [h0.dim + k for k in i1]] = K[:, len(i0):]
            valid[d] = V
        # null pairs: (phi0, g eta) with g eta f = g phi0
        ncols, imgs = [], []
        for k in i0:
            phi0 = h0.basis_morphism(k)
            ncols.append((-hc.to_coords(compose(g, phi0).entries)) % p)
            imgs.append(np.concatenate([h0.to_coords(phi0.entries), np.zeros(h1.dim, np.int64)]))
        for k in ie:
            eta = he.basis_morphism(k)
            ge = compose(g, eta)
            ncols.append(hc.to_coords(compose(ge, f).entries))
            imgs.append(np.concatenate([np.zeros(h0.dim, np.int64), h1.to_coords(ge.entries)]))
        if ncols:
            K = gflin.kernel(np.array(ncols).T, p, len(ncols))
            Nv = (K @ np.array(imgs)) % p if K.shape[0] else np.zeros((0, full), np.int64)
            null[d] = gflin.span_basis(Nv, p, full)
        else:
            null[d] = np.zeros((0, full), dtype=np.int64)
        _, r = gflin.subspace_quotient(full, null[d], list(valid[d]), p)
        reps[d] = r
    return PresentedHom(M, N, h0, h1, valid, null, reps)
