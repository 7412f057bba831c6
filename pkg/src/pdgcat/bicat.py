"""The 2-category of projective p-dg bimodules over a p-dg algebra.

Objects are the blocks of the algebra ``A``.  Generating 1-morphisms are
the identities ``Id(b)`` (the bimodule ``A_b``) and ``P(s, t) = A e_s (x) e_t A``
from the block of ``t`` to the block of ``s``.  Every bimodule is realised
concretely: elements of ``A_b`` are vectors of length ``dim A`` and elements
of ``P(s, t)`` are ``dim A x dim A`` coefficient matrices on ``b_i (x) b_j``,
flattened.  A 2-morphism out of ``P(s, t)`` is recorded by the image of
``e_s (x) e_t``; one out of ``Id(b)`` by the image of the block unit.

For each pair of objects the generators span a p-dg algebra ``E`` (their
joint endomorphism algebra), so 1-morphisms are twisted objects over ``E``
and 2-hom spaces are their hom complexes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gflin
from .homotopy import stable_homs
from .pdgalg import PdgAlgebra, center, iso_classes, make_piece
from .twisted import (
    HomSpace,
    TwistedMorphism,
    TwistedObject,
    check_twisted,
    identity,
)

__all__ = [
    "Gen",
    "BiCategory",
    "HomCategory",
    "OneMorphism",
    "TwoHom",
    "ObjectMismatch",
    "hcompose",
    "hcompose_2",
    "two_hom",
    "stable_two_hom",
    "IdentityCellAmbiguity",
    "CellStructure",
    "compute_cells",
    "strong_regularity",
    "Preorder",
]


class ObjectMismatch(ValueError):
    pass


class IdentityCellAmbiguity(ValueError):
    pass


@dataclass(frozen=True)
class Gen:
    """``Gen("id", b)`` or ``Gen("proj", s, t)``; indices are 0-based."""

    kind: str
    a: int
    b: int = -1

    def label(self):
        if self.kind == "id":
            return f"Id({self.a + 1})"
        return f"P({self.a + 1},{self.b + 1})"

    def __str__(self):
        return self.label()


class BiCategory:
    """The 2-category ``C_A`` for a validated algebra ``A``."""

    def __init__(self, A):
        self.A = A
        self.p = A.p
        self.n = A.n
        self._homs = {}
        self._unit_mats = None
        blocks = A.blocks()
        self.nobjects = len(blocks)
        self.block_units = [A.block_unit(b) for b in range(self.nobjects)]
        n = A.n
        eye = np.eye(n, dtype=np.int64)
        self.L = np.array([A.left_matrix(eye[i]) for i in range(n)])
        self.R = np.array([A.right_matrix(eye[i]) for i in range(n)])
        self.In = eye

    # concrete bimodules

    def source(self, g):
        return g.a if g.kind == "id" else self.A.block_of(g.b)

    def target(self, g):
        return g.a if g.kind == "id" else self.A.block_of(g.a)

    def amb_dim(self, g):
        return self.n if g.kind == "id" else self.n * self.n

    def amb_degrees(self, g):
        d = np.array(self.A.degrees)
        return d if g.kind == "id" else (d[:, None] + d[None, :]).reshape(-1)

    def act_left(self, g, a):
        """Matrix of ``x -> b_a x`` on the ambient space of ``g``."""
        if g.kind == "id":
            return self.L[a]
        return np.kron(self.L[a], self.In)

    def act_right(self, g, a):
        if g.kind == "id":
            return self.R[a]
        return np.kron(self.In, self.R[a])

    def act_left_elem(self, g, v):
        return np.tensordot(np.asarray(v), np.array([self.act_left(g, a) for a in range(self.n)]),
                            axes=1) % self.p

    def diff_matrix(self, g):
        D = self.A.diff
        if g.kind == "id":
            return D
        return (np.kron(D, self.In) + np.kron(self.In, D)) % self.p

    def generator_element(self, g):
        A = self.A
        if g.kind == "id":
            return self.block_units[g.a].copy()
        return np.outer(A.idempotents[g.a], A.idempotents[g.b]).reshape(-1) % self.p

    def concrete_basis(self, g):
        A = self.A
        if g.kind == "id":
            u = self.block_units[g.a]
            return gflin.span_basis(A.left_matrix(u).T, self.p, self.n)
        left = gflin.span_basis(A.right_matrix(A.idempotents[g.a]).T, self.p, self.n)
        right = gflin.span_basis(A.left_matrix(A.idempotents[g.b]).T, self.p, self.n)
        rows = [np.outer(x, y).reshape(-1) for x in left for y in right]
        return (np.array(rows) % self.p if rows
                else np.zeros((0, self.n * self.n), dtype=np.int64))

    def hom_images(self, src, tgt):
        """Basis (as a Piece) of generator images of bimodule maps ``src -> tgt``."""
        p = self.p
        C = self.concrete_basis(tgt)
        degs = self.amb_degrees(tgt)
        if C.shape[0] == 0:
            return make_piece(np.zeros((0, self.amb_dim(tgt)), dtype=np.int64), degs, p,
                              self.amb_dim(tgt))
        A = self.A
        if src.kind == "proj":
            es = [i for i in range(self.n)]
            Ls = self.act_left_elem(tgt, A.idempotents[src.a])
            Rt = np.tensordot(A.idempotents[src.b],
                              np.array([self.act_right(tgt, a) for a in es]), axes=1) % p
            imgs = (C @ Ls.T @ Rt.T) % p
            return make_piece(imgs, degs, p, self.amb_dim(tgt))
        cons = []
        for a in range(self.n):
            M = (self.act_left(tgt, a) - self.act_right(tgt, a)) % p
            cons.append((M @ C.T) % p)
        K = gflin.kernel(np.vstack(cons), p, C.shape[0])
        imgs = (K @ C) % p
        return make_piece(imgs, degs, p, self.amb_dim(tgt))

    def apply(self, src, tgt, img, x):
        """Apply the bimodule map ``src -> tgt`` with generator image ``img`` to ``x``."""
        p = self.p
        n = self.n
        if src.kind == "id":
            return (self.act_left_elem(tgt, x) @ img) % p
        X = np.asarray(x).reshape(n, n)
        W = np.array([self.act_right(tgt, b) @ img for b in range(n)]) % p
        U = (X @ W) % p
        Ls = np.array([self.act_left(tgt, a) for a in range(n)])
        return np.einsum("aij,aj->i", Ls, U) % p

    # hom categories

    def hom(self, src, tgt):
        key = (src, tgt)
        if key not in self._homs:
            self._homs[key] = HomCategory(self, src, tgt)
        return self._homs[key]

    def gens_between(self, src, tgt):
        A = self.A
        blocks = A.blocks()
        out = []
        if src == tgt:
            out.append(Gen("id", src))
        for s in blocks[tgt]:
            for t in blocks[src]:
                out.append(Gen("proj", s, t))
        return out

    # expansions of composites of generators

    def middle(self, g, h):
        """Middle basis of ``g h`` for two projective generators, by decreasing degree."""
        pc = self.A.piece(g.b, h.a)
        order = sorted(range(pc.dim), key=lambda k: (-pc.degrees[k], k))
        return pc, order

    def expansion(self, g, h):
        """Summands of ``g h`` as ``(gen, relative shift, middle index)`` and its internal twist."""
        if g.kind == "id":
            return [(h, 0, None)], []
        if h.kind == "id":
            return [(g, 0, None)], []
        pc, order = self.middle(g, h)
        out = Gen("proj", g.a, h.b)
        summands = [(out, -pc.degrees[k], pos) for pos, k in enumerate(order)]
        pos_of = {k: pos for pos, k in enumerate(order)}
        twist = []
        for pos, k in enumerate(order):
            db = self.A.d(pc.basis[k])
            c = pc.coords(db)
            for k2 in np.nonzero(c)[0]:
                twist.append((pos_of[int(k2)], pos, int(c[k2])))
        return summands, twist

    def split_pair(self, g, h, pos):
        """Elements ``(x, y)`` with ``x (x)_A y`` the generator of summand ``pos`` of ``g h``."""
        if g.kind == "proj" and h.kind == "proj":
            pc, order = self.middle(g, h)
            b = pc.basis[order[pos]]
            x = np.outer(self.A.idempotents[g.a], b).reshape(-1) % self.p
            return x, self.generator_element(h)
        return self.generator_element(g), self.generator_element(h)

    def tensor_elems(self, g, h, x, y):
        """``x (x)_A y`` in the ambient model of ``g h``; returns the summand components."""
        p, n = self.p, self.n
        if g.kind == "id" and h.kind == "id":
            return [self.A.mult(x, y)]
        if g.kind == "id":
            return [self.act_left_elem(h, x) @ y % p]
        if h.kind == "id":
            # right action of the algebra element y on x
            acts = np.tensordot(np.asarray(y), np.array([self.act_right(g, a) for a in range(n)]),
                                axes=1) % p
            return [acts @ x % p]
        X = np.asarray(x).reshape(n, n)
        Y = np.asarray(y).reshape(n, n)
        Z = np.einsum("ab,cd,bcm->amd", X, Y, self.A.mul) % p
        pc, order = self.middle(g, h)
        comps = []
        for k in order:
            c = Z[:, list(pc.pivots), :][:, k, :] if pc.dim else None
            comps.append(c.reshape(-1) % p)
        return comps


class HomCategory:
    """Generators of ``C_A(src, tgt)`` and their endomorphism algebra ``E``."""

    def __init__(self, bc, src, tgt):
        self.bc = bc
        self.src, self.tgt = src, tgt
        self.gens = bc.gens_between(src, tgt)
        self.index = {g: k for k, g in enumerate(self.gens)}
        p = bc.p
        pieces = {}
        for k, gk in enumerate(self.gens):
            for l, gl in enumerate(self.gens):
                pieces[k, l] = bc.hom_images(gl, gk)
        self.pieces = pieces
        labels, degrees, meta, images = [], [], [], []
        self.offsets = {}
        for (k, l), pc in pieces.items():
            self.offsets[k, l] = len(labels)
            for row in range(pc.dim):
                labels.append(f"{self.gens[l]}->{self.gens[k]}#{row}")
                degrees.append(pc.degrees[row])
                meta.append((k, l, row))
                images.append(pc.basis[row])
        N = len(labels)
        self.meta = meta
        self.images = images
        mul = np.zeros((N, N, N), dtype=np.int64)
        for i, (j, k, _) in enumerate(meta):
            for i2, (k2, l, _) in enumerate(meta):
                if k2 != k:
                    continue
                img = bc.apply(self.gens[k], self.gens[j], images[i], images[i2])
                off = self.offsets[j, l]
                c = pieces[j, l].coords(img)
                mul[i, i2, off:off + len(c)] = c
        diff = np.zeros((N, N), dtype=np.int64)
        for i, (k, l, _) in enumerate(meta):
            dimg = bc.diff_matrix(self.gens[k]) @ images[i] % p
            off = self.offsets[k, l]
            c = pieces[k, l].coords(dimg)
            diff[off:off + len(c), i] = c
        idem = [self.element(k, k, bc.generator_element(g)) for k, g in enumerate(self.gens)]
        unit = sum(idem) % p if idem else np.zeros(N, dtype=np.int64)
        name = f"E({src + 1}->{tgt + 1})"
        self.E = PdgAlgebra(p, labels, degrees, mul, diff, unit, idem, name=name)

    def element(self, k, l, img):
        """E-vector of the map ``gens[l] -> gens[k]`` with generator image ``img``."""
        N = len(self.meta)
        v = np.zeros(N, dtype=np.int64)
        pc = self.pieces[k, l]
        if pc.dim == 0:
            if np.any(np.asarray(img) % self.bc.p):
                raise ValueError("image is not a bimodule map")
            return v
        if not gflin.in_span(pc.basis, img, self.bc.p):
            raise ValueError("image is not a bimodule map between these generators")
        off = self.offsets[k, l]
        v[off:off + pc.dim] = pc.coords(img)
        return v

    def image(self, k, l, vec):
        """Generator image of the E-vector ``vec`` restricted to ``gens[l] -> gens[k]``."""
        pc = self.pieces[k, l]
        if pc.dim == 0:
            return np.zeros(self.bc.amb_dim(self.gens[k]), dtype=np.int64)
        off = self.offsets[k, l]
        return (np.asarray(vec[off:off + pc.dim]) @ pc.basis) % self.bc.p

    def one(self, gen, shift=0):
        """A single generator as a 1-morphism."""
        return OneMorphism(self, TwistedObject(self.E, [(self.index[gen], shift)], keys=[((0,), ())]))

    def describe_element(self, vec):
        terms = []
        for i in np.nonzero(np.asarray(vec) % self.bc.p)[0]:
            c = int(vec[i]) % self.bc.p
            terms.append((f"{c}*" if c != 1 else "") + self.E.labels[i])
        return " + ".join(terms) or "0"


@dataclass
class OneMorphism:
    """A twisted object over the generator algebra of one hom category."""

    cat: HomCategory
    obj: TwistedObject

    @property
    def source(self):
        return self.cat.src

    @property
    def target(self):
        return self.cat.tgt

    @property
    def summands(self):
        return [(self.cat.gens[i], s) for i, s in self.obj.gens]

    def keys(self):
        if self.obj.keys is not None:
            return list(self.obj.keys)
        return [((m,), ()) for m in range(self.obj.size)]

    def __str__(self):
        parts = []
        for g, s in self.summands:
            parts.append(f"{g}<{s}>" if s else str(g))
        return " + ".join(parts) if parts else "0"

    def describe(self):
        lines = [str(self)]
        E = self.cat
        for k in range(self.obj.size):
            for l in range(self.obj.size):
                v = self.obj.alpha[k, l]
                if np.any(v):
                    lines.append(f"  twist[{k + 1},{l + 1}] = {E.describe_element(v)}")
        return "\n".join(lines)

    def is_valid(self):
        return not check_twisted(self.obj)


def _sorted_object(E, entries, alpha, keys):
    order = sorted(range(len(keys)), key=lambda k: keys[k])
    gens = [entries[k] for k in order]
    a = alpha[np.ix_(order, order)] if len(order) else alpha
    obj = TwistedObject(E, gens, a, [keys[k] for k in order])
    for k in range(len(order)):
        for l in range(k + 1):
            if np.any(obj.alpha[k, l]):
                raise ValueError("composite twist is not strictly upper triangular")
    return obj, order


def _hcomp_gen(bc, catL, k1, k2, gvec, catR, m1, m2, tvec, catO):
    """Horizontal composite of generator-level 2-morphisms as a block over ``catO.E``.

    ``gvec`` maps ``catL.gens[k1] -> catL.gens[k2]`` and ``tvec`` maps
    ``catR.gens[m1] -> catR.gens[m2]``.  Rows index the expansion of the
    target composite, columns the expansion of the source composite.
    """
    g1, g2 = catL.gens[k1], catL.gens[k2]
    h1, h2 = catR.gens[m1], catR.gens[m2]
    src_exp, _ = bc.expansion(g1, h1)
    tgt_exp, _ = bc.expansion(g2, h2)
    gimg = catL.image(k2, k1, gvec)
    timg = catR.image(m2, m1, tvec)
    out = np.zeros((len(tgt_exp), len(src_exp), catO.E.n), dtype=np.int64)
    if not np.any(gimg) or not np.any(timg):
        return out
    for c, (sg, _, _) in enumerate(src_exp):
        x, y = bc.split_pair(g1, h1, c)
        gx = bc.apply(g1, g2, gimg, x)
        ty = bc.apply(h1, h2, timg, y)
        comps = bc.tensor_elems(g2, h2, gx, ty)
        for r, (tg, _, _) in enumerate(tgt_exp):
            out[r, c] = catO.element(catO.index[tg], catO.index[sg], comps[r])
    return out


@dataclass
class _Composite:
    obj: TwistedObject
    order: list
    blocks: list  # for each (m, n) pair, the positions (pre-sort) of its expansion


def _compose_lists(bc, M, N):
    catL, catR = M.cat, N.cat
    catO = bc.hom(catR.src, catL.tgt)
    E = catO.E
    keysM, keysN = M.keys(), N.keys()
    entries, keys, owners = [], [], []
    blocks = {}
    for m, (gm, am) in enumerate(M.obj.gens):
        for nn, (gn, an) in enumerate(N.obj.gens):
            g, h = catL.gens[gm], catR.gens[gn]
            exp, _ = bc.expansion(g, h)
            pos = []
            for (sg, rel, mid) in exp:
                pos.append(len(entries))
                entries.append((catO.index[sg], am + an + rel))
                km, kn = keysM[m], keysN[nn]
                mids = km[1] + ((mid,) if mid is not None else ()) + kn[1]
                keys.append((km[0] + kn[0], mids))
            blocks[m, nn] = pos
    return catO, entries, keys, blocks


def hcompose(bc, M, N):
    """``M N`` for ``M: j -> k`` and ``N: i -> j`` with the twist combination rule."""
    if M.cat.src != N.cat.tgt:
        raise ObjectMismatch(f"source {M.cat.src + 1} of the left factor differs from "
                             f"target {N.cat.tgt + 1} of the right factor")
    catL, catR = M.cat, N.cat
    catO, entries, keys, blocks = _compose_lists(bc, M, N)
    E = catO.E
    size = len(entries)
    alpha = np.zeros((size, size, E.n), dtype=np.int64)
    for (m, nn), pos in blocks.items():
        g, h = catL.gens[M.obj.gens[m][0]], catR.gens[N.obj.gens[nn][0]]
        _, twist = bc.expansion(g, h)
        for r, c, coef in twist:
            sg = entries[pos[c]][0]
            alpha[pos[r], pos[c]] = (alpha[pos[r], pos[c]] + coef * E.idempotents[sg]) % bc.p
    idL = identity(M.obj).entries
    idR = identity(N.obj).entries
    for (m, nn), pos in blocks.items():
        for (m2, n2), pos2 in blocks.items():
            if n2 == nn and np.any(M.obj.alpha[m2, m]):
                blk = _hcomp_gen(bc, catL, M.obj.gens[m][0], M.obj.gens[m2][0], M.obj.alpha[m2, m],
                                 catR, N.obj.gens[nn][0], N.obj.gens[nn][0], idR[nn, nn], catO)
                alpha[np.ix_(pos2, pos)] = (alpha[np.ix_(pos2, pos)] + blk) % bc.p
            if m2 == m and np.any(N.obj.alpha[n2, nn]):
                blk = _hcomp_gen(bc, catL, M.obj.gens[m][0], M.obj.gens[m][0], idL[m, m],
                                 catR, N.obj.gens[nn][0], N.obj.gens[n2][0], N.obj.alpha[n2, nn],
                                 catO)
                alpha[np.ix_(pos2, pos)] = (alpha[np.ix_(pos2, pos)] + blk) % bc.p
    obj, _ = _sorted_object(E, entries, alpha, keys)
    return OneMorphism(catO, obj)


def hcompose_2(bc, gamma, M1, M2, tau, N1, N2):
    """Horizontal composite ``gamma o_0 tau : M1 N1 -> M2 N2``.

    ``gamma`` and ``tau`` are twisted morphisms over the generator algebras
    of ``M1 -> M2`` and ``N1 -> N2``.
    """
    S = hcompose(bc, M1, N1)
    T = hcompose(bc, M2, N2)
    catO, e_s, k_s, b_s = _compose_lists(bc, M1, N1)
    _, e_t, k_t, b_t = _compose_lists(bc, M2, N2)
    E = catO.E
    out = np.zeros((len(e_t), len(e_s), E.n), dtype=np.int64)
    for (k, m), pos_t in b_t.items():
        for (l, nn), pos_s in b_s.items():
            gv = gamma.entries[k, l]
            tv = tau.entries[m, nn]
            if not np.any(gv) or not np.any(tv):
                continue
            blk = _hcomp_gen(bc, M1.cat, M1.obj.gens[l][0], M2.obj.gens[k][0], gv,
                             N1.cat, N1.obj.gens[nn][0], N2.obj.gens[m][0], tv, catO)
            out[np.ix_(pos_t, pos_s)] = (out[np.ix_(pos_t, pos_s)] + blk) % bc.p
    os_ = sorted(range(len(k_s)), key=lambda k: k_s[k])
    ot = sorted(range(len(k_t)), key=lambda k: k_t[k])
    out = out[np.ix_(ot, os_)] if len(ot) and len(os_) else out
    return TwistedMorphism(S.obj, T.obj, out, gamma.degree + tau.degree)


@dataclass
class TwoHom:
    source: OneMorphism
    target: OneMorphism
    hom: HomSpace

    @property
    def space(self):
        return gflin.GradedSpace(tuple(self.hom.index), tuple(self.hom.degrees))

    @property
    def diff(self):
        return gflin.LinearMap(self.space, self.space, self.hom.diff_matrix(), 2,
                               self.hom.A.p)

    def graded_dim(self):
        return self.space.graded_dim()

    def realization(self, k):
        """Concrete bimodule-map images of basis element ``k`` (entrywise)."""
        cat = self.source.cat
        f = self.hom.basis_morphism(k)
        out = {}
        for (n, m) in zip(*np.nonzero(np.any(f.entries, axis=2))):
            gk = self.target.obj.gens[n][0]
            gl = self.source.obj.gens[m][0]
            out[int(n), int(m)] = cat.image(gk, gl, f.entries[n, m])
        return out


def two_hom(bc, M, N):
    if (M.cat.src, M.cat.tgt) != (N.cat.src, N.cat.tgt):
        raise ObjectMismatch("1-morphisms have different sources or targets")
    return TwoHom(M, N, HomSpace(M.obj, N.obj))


def stable_two_hom(bc, M, N):
    """Stable 2-homs per degree between two 1-morphisms."""
    two_hom(bc, M, N)
    return stable_homs(M.obj, N.obj)


# cells


@dataclass
class Preorder:
    """A preorder on ``range(n)`` stored as its set of pairs ``(a, b)`` with ``a >= b``."""

    n: int
    pairs: set

    def geq(self, a, b):
        return (a, b) in self.pairs

    def classes(self):
        seen, out = set(), []
        for a in range(self.n):
            if a in seen:
                continue
            cls = [b for b in range(self.n) if self.geq(a, b) and self.geq(b, a)]
            seen.update(cls)
            out.append(cls)
        return out


def _closure(n, rel):
    pairs = {(a, a) for a in range(n)} | set(rel)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(pairs):
            for (c, d) in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    return Preorder(n, pairs)


@dataclass
class CellStructure:
    indecomposables: list
    left: Preorder
    right: Preorder
    two_sided: Preorder
    left_cells: list
    right_cells: list
    two_sided_cells: list
    identifications: dict = field(default_factory=dict)

    def label(self, k):
        return self.indecomposables[k].label()

    def cell_of(self, cells, k):
        for c, members in enumerate(cells):
            if k in members:
                return c
        raise IndexError(k)

    def two_sided_order(self):
        """Pairs ``(J1, J2)`` of distinct two-sided cells with ``J1 > J2``."""
        out = set()
        for a, J1 in enumerate(self.two_sided_cells):
            for b, J2 in enumerate(self.two_sided_cells):
                if a != b and self.two_sided.geq(J1[0], J2[0]):
                    out.add((a, b))
        return out


def _is_local_center(A, b):
    p = A.p
    u = A.block_unit(b)
    Z = center(A)
    Zb = gflin.span_basis(np.array([A.mult(u, z) for z in Z]), p, A.n) if Z.shape[0] else Z
    if Zb.shape[0] == 0:
        return False
    for z in Zb:
        ok = False
        for c in range(p):
            a = (z - c * u) % p
            x = a.copy()
            for _ in range(A.n):
                x = A.mult(x, a)
            if not np.any(x):
                ok = True
                break
        if not ok:
            return False
    return True


def _proj_is_identity(A, s, b):
    """Whether multiplication ``A e_s (x) e_s A -> A_b`` is bijective."""
    p = A.p
    u = A.block_unit(b)
    left = gflin.span_basis(A.right_matrix(A.idempotents[s]).T, p, A.n)
    right = gflin.span_basis(A.left_matrix(A.idempotents[s]).T, p, A.n)
    blockdim = gflin.rank(A.left_matrix(u), p)
    if left.shape[0] * right.shape[0] != blockdim:
        return False
    imgs = [A.mult(x, y) for x in left for y in right]
    return gflin.rank(np.array(imgs), p) == blockdim


def compute_cells(A, classes=None):
    """Cell structure of ``C_A`` via the multiplicity of ``P(s,v)`` in ``P(s,t) P(u,v)``."""
    classes = classes or iso_classes(A)
    rep = {k: c[0] for c in classes for k in c}
    reps = [c[0] for c in classes]
    nb = len(A.blocks())
    for b in range(nb):
        if not _is_local_center(A, b):
            raise IdentityCellAmbiguity(
                f"the center of block {b + 1} is not local; restrict to a block first")
    inds = []
    index = {}
    ident = {}
    for b in range(nb):
        g = Gen("id", b)
        index[g] = len(inds)
        inds.append(g)
    for s in reps:
        for t in reps:
            g = Gen("proj", s, t)
            bs, bt = A.block_of(s), A.block_of(t)
            if s == t and _proj_is_identity(A, s, bs):
                ident[g] = Gen("id", bs)
                index[g] = index[Gen("id", bs)]
                continue
            index[g] = len(inds)
            inds.append(g)

    def canon(g):
        if g.kind == "proj":
            g = Gen("proj", rep[g.a], rep[g.b])
        return index[g]

    def compose_summands(g, h):
        # indecomposables appearing in g h, with g after h
        if g.kind == "id":
            return [h] if g.a == (h.a if h.kind == "id" else A.block_of(h.a)) else []
        if h.kind == "id":
            return [g] if A.block_of(g.b) == h.a else []
        if A.piece(g.b, h.a).dim:
            return [Gen("proj", g.a, h.b)]
        return []

    gens_all = [Gen("id", b) for b in range(nb)] + [Gen("proj", s, t) for s in reps for t in reps]
    lrel, rrel = set(), set()
    for F in gens_all:
        for H in gens_all:
            for G in compose_summands(H, F):
                lrel.add((canon(G), canon(F)))
            for G in compose_summands(F, H):
                rrel.add((canon(G), canon(F)))
    n = len(inds)
    left = _closure(n, lrel)
    right = _closure(n, rrel)
    two = _closure(n, left.pairs | right.pairs)
    return CellStructure(inds, left, right, two, left.classes(), right.classes(), two.classes(),
                         {str(k): str(v) for k, v in ident.items()})


def strong_regularity(cs):
    """Incomparable left (right) cells inside each two-sided cell and singleton intersections."""
    for J in cs.two_sided_cells:
        Ls = [c for c in cs.left_cells if c[0] in J]
        Rs = [c for c in cs.right_cells if c[0] in J]
        for a in Ls:
            for b in Ls:
                if a is not b and cs.left.geq(a[0], b[0]):
                    return False
        for a in Rs:
            for b in Rs:
                if a is not b and cs.right.geq(a[0], b[0]):
                    return False
        for L in Ls:
            for R in Rs:
                if len(set(L) & set(R)) != 1:
                    return False
    return True
