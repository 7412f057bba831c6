"""Null-homotopies, stable hom spaces, cones and the shift functor.

A morphism is null-homotopic when it equals ``d^{p-1}(g)`` for some ``g``;
equivalently it factors through ``X (x) H<2p-2>`` along the inclusion of
the socle.  Stable homs are cycles modulo these.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gflin
from .twisted import (
    HomSpace,
    TwistedMorphism,
    TwistedObject,
    compose,
    identity,
    morphism_diff,
    tensor_h,
)

__all__ = [
    "NotACycle",
    "HomComplex",
    "hom_complex",
    "StableHom",
    "stable_hom",
    "stable_homs",
    "stable_total",
    "is_null_homotopic",
    "factors_through_contractible",
    "contractible_cover",
    "blocked_sigma",
    "Cone",
    "cone",
    "mediate",
    "sigma",
]


class NotACycle(ValueError):
    pass


@dataclass
class HomComplex:
    source: TwistedObject
    target: TwistedObject
    hom: HomSpace
    space: gflin.GradedSpace
    diff: gflin.LinearMap


def hom_complex(X, Y):
    H = HomSpace(X, Y)
    space = gflin.GradedSpace(tuple(H.index), tuple(H.degrees))
    D = gflin.LinearMap(space, space, H.diff_matrix(), 2, X.A.p)
    return HomComplex(X, Y, H, space, D)


@dataclass
class StableHom:
    degree: int
    cycle_basis: np.ndarray
    boundary_basis: np.ndarray
    representatives: list
    hom: HomSpace

    @property
    def dim(self):
        return len(self.representatives)

    def morphisms(self):
        return [self.hom.from_coords(r, self.degree) for r in self.representatives]

    def is_boundary(self, f):
        v = self.hom.to_coords(f)
        return gflin.in_span(self.boundary_basis, v, self.hom.A.p)

    def class_of(self, f):
        """Coordinates of the stable class of cycle ``f`` in the representative basis."""
        p = self.hom.A.p
        v = self.hom.to_coords(f)
        k = self.dim
        rows = list(self.representatives) + list(self.boundary_basis)
        if not rows:
            if np.any(v):
                raise NotACycle("morphism is not a cycle of this degree")
            return np.zeros(0, dtype=np.int64)
        sol = gflin.solve(np.array(rows).T, v, p)
        if sol is None:
            raise NotACycle("morphism is not a cycle of this degree")
        return sol[:k]


def _boundaries(H, d, p):
    src = H.degree_indices(d - 2 * (p - 1))
    if not src:
        return np.zeros((0, H.dim), dtype=np.int64)
    Dp = H.diff_power(p - 1)
    return gflin.span_basis(Dp[:, src].T, p, H.dim)


def stable_hom(X, Y, degree, hom=None):
    """Cycles of the given degree modulo the image of ``d^{p-1}``."""
    H = hom or HomSpace(X, Y)
    p = X.A.p
    Z = H.cycles(degree)
    B = _boundaries(H, degree, p)
    _, reps = gflin.subspace_quotient(H.dim, B, list(Z), p)
    return StableHom(degree, Z, B, reps, H)


def stable_homs(X, Y, degrees=None):
    """Stable homs in every degree where the hom space is nonzero."""
    H = HomSpace(X, Y)
    degs = H.present_degrees() if degrees is None else degrees
    return {d: stable_hom(X, Y, d, H) for d in degs}


def stable_total(X, Y):
    """Dimension of the stable hom summed over all degrees (``up to shift``)."""
    return sum(s.dim for s in stable_homs(X, Y).values())


def _require_cycle(f):
    if not morphism_diff(f).is_zero():
        raise NotACycle("morphism is not annihilated by the differential")


def is_null_homotopic(f):
    """``(True, g)`` with ``d^{p-1}(g) = f`` or ``(False, None)``."""
    _require_cycle(f)
    X, Y = f.source, f.target
    p = X.A.p
    H = HomSpace(X, Y)
    src = H.degree_indices(f.degree - 2 * (p - 1))
    target = H.to_coords(f)
    if not np.any(target):
        return True, TwistedMorphism(X, Y, np.zeros_like(f.entries), f.degree - 2 * (p - 1))
    if not src:
        return False, None
    Dp = H.diff_power(p - 1)[:, src]
    sol = gflin.solve(Dp, target, p)
    if sol is None:
        return False, None
    v = np.zeros(H.dim, dtype=np.int64)
    v[src] = sol
    return True, H.from_coords(v, f.degree - 2 * (p - 1))


def contractible_cover(X):
    """``X (x) H<2p-2>`` written as ``X + X<2> + ... + X<2p-2>`` with the socle inclusion.

    Returns ``(XH, iota)`` where ``iota = id (x) d^{p-1}<2p-2>`` embeds ``X``
    as the first block.
    """
    A = X.A
    p = A.p
    s = X.size
    gens = [(i, sh + 2 * b) for b in range(p) for i, sh in X.gens]
    alpha = np.zeros((p * s, p * s, A.n), dtype=np.int64)
    for b in range(p):
        alpha[b * s:(b + 1) * s, b * s:(b + 1) * s] = X.alpha
        if b + 1 < p:
            alpha[b * s:(b + 1) * s, (b + 1) * s:(b + 2) * s] = identity(X).entries
    XH = TwistedObject(A, gens, alpha)
    iota = np.zeros((p * s, s, A.n), dtype=np.int64)
    iota[:s] = identity(X).entries
    return XH, TwistedMorphism(X, XH, iota, 0)


def blocked_sigma(X):
    """``X<2> + ... + X<2p-2>`` with identity links; isomorphic to :func:`sigma`."""
    A = X.A
    p = A.p
    s = X.size
    gens = [(i, sh + 2 * b) for b in range(1, p) for i, sh in X.gens]
    m = (p - 1) * s
    alpha = np.zeros((m, m, A.n), dtype=np.int64)
    for b in range(p - 1):
        alpha[b * s:(b + 1) * s, b * s:(b + 1) * s] = X.alpha
        if b + 1 < p - 1:
            alpha[b * s:(b + 1) * s, (b + 1) * s:(b + 2) * s] = identity(X).entries
    return TwistedObject(A, gens, alpha)


def factors_through_contractible(f):
    """``(True, h)`` with ``h`` closed of degree 0 and ``h iota = f``, else ``(False, None)``.

    Shifts ``f`` to degree 0 first, so any degree is accepted.
    """
    _require_cycle(f)
    X, Y = f.source, f.target
    A = X.A
    p = A.p
    # a map of degree d from X is a map of degree 0 from X<-d>... realised by shifting X
    Xs = TwistedObject(A, [(i, s - f.degree) for i, s in X.gens], X.alpha)
    f0 = TwistedMorphism(Xs, Y, f.entries, 0)
    XH, iota = contractible_cover(Xs)
    H = HomSpace(XH, Y)
    Z = H.cycles(0)
    want = f0.entries.reshape(-1)
    if not np.any(want):
        return True, H.from_coords(np.zeros(H.dim, dtype=np.int64), 0)
    if Z.shape[0] == 0:
        return False, None
    cols = [compose(H.from_coords(z, 0), iota).entries.reshape(-1) for z in Z]
    sol = gflin.solve(np.array(cols).T, want, p)
    if sol is None:
        return False, None
    return True, H.from_coords((sol @ Z) % p, 0)


@dataclass
class Cone:
    obj: TwistedObject
    v: TwistedMorphism
    r: TwistedMorphism
    u: TwistedMorphism
    q: TwistedMorphism
    cover: TwistedObject
    iota: TwistedMorphism
    shifted: TwistedObject


def cone(f):
    """The cone ``Y + X<2> + ... + X<2p-2>`` of a closed degree-0 ``f: X -> Y``."""
    _require_cycle(f)
    if f.degree != 0:
        raise NotACycle("cone needs a degree-0 morphism")
    X, Y = f.source, f.target
    A = X.A
    p = A.p
    s, t = X.size, Y.size
    size = t + (p - 1) * s
    gens = list(Y.gens) + [(i, sh + 2 * b) for b in range(1, p) for i, sh in X.gens]
    alpha = np.zeros((size, size, A.n), dtype=np.int64)
    alpha[:t, :t] = Y.alpha
    if s:
        alpha[:t, t:t + s] = f.entries
    idX = identity(X).entries
    for b in range(p - 1):
        o = t + b * s
        alpha[o:o + s, o:o + s] = X.alpha
        if b + 1 < p - 1:
            alpha[o:o + s, o + s:o + 2 * s] = idX
    C = TwistedObject(A, gens, alpha)
    idC = identity(C).entries
    v = TwistedMorphism(Y, C, idC[:, :t], 0)
    XH, iota = contractible_cover(X)
    S = blocked_sigma(X)
    r = TwistedMorphism(C, S, idC[t:, :], 0)
    ue = np.zeros((size, p * s, A.n), dtype=np.int64)
    ue[:t, :s] = f.entries
    ue[t:, s:] = idC[t:, t:]
    u = TwistedMorphism(XH, C, ue, 0)
    idXH = identity(XH).entries
    q = TwistedMorphism(XH, S, idXH[s:, :], 0)
    return Cone(C, v, r, u, q, XH, iota, S)


def mediate(cn, tau, gamma):
    """Solve ``rho u = gamma`` and ``rho v = tau`` among degree-0 maps out of the cone.

    Returns ``(rho, unique)``; ``rho`` is ``None`` when the system has no
    solution.
    """
    C = cn.obj
    Z = tau.target
    A = C.A
    p = A.p
    H = HomSpace(C, Z)
    idx = H.degree_indices(0)
    want = np.concatenate([gamma.entries.reshape(-1), tau.entries.reshape(-1)])
    if not idx:
        ok = not np.any(want)
        return (H.from_coords(np.zeros(H.dim, dtype=np.int64), 0) if ok else None), True
    cols = []
    for k in idx:
        rho = H.basis_morphism(k)
        cols.append(np.concatenate([compose(rho, cn.u).entries.reshape(-1),
                                    compose(rho, cn.v).entries.reshape(-1)]))
    M = np.array(cols).T % p
    sol = gflin.solve(M, want, p)
    unique = gflin.rank(M, p) == len(idx)
    if sol is None:
        return None, unique
    v = np.zeros(H.dim, dtype=np.int64)
    v[idx] = sol
    return H.from_coords(v, 0), unique


def sigma(X):
    """``X (x) V_{p-2}<2p-2>``."""
    p = X.A.p
    return tensor_h(X, [(p - 2, 2 * p - 2)]) if X.size else X
