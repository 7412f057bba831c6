"""Cell 2-representations of ``C_A`` and the natural representation.

For the left cell ``L = {P(-, t)}`` the 2-representation ``R_L`` has, at
object ``j``, the generators ``P(s, t)`` with ``s`` in block ``j``.  Its
hom spaces are ``e_s A e_s' (x) e_t A e_t`` and the maximal ideal is
``J = e_s A e_s' (x) rad(e_t A e_t)``; the quotient is compared with the
natural representation through ``c (x) d -> c chi(d)``, where ``chi`` reads
off ``d`` modulo the radical.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gflin
from .bicat import Gen, ObjectMismatch, _hcomp_gen, _sorted_object, stable_two_hom
from .homotopy import stable_hom
from .pdgalg import UnsupportedShape, center, radical
from .report import qpoly as _qpoly
from .twisted import TwistedMorphism, TwistedObject, compose

__all__ = [
    "AssumptionViolation",
    "CellRepData",
    "HomPair",
    "build_cell_rep",
    "natural_rep_apply",
    "PairReport",
    "compare_with_natural",
    "maximality_check",
    "stable_two_hom",
    "stable_compose",
    "KxStableData",
    "kx_stable_data",
    "kx_relations",
    "identity_cell_quotient",
]


class AssumptionViolation(ValueError):
    pass


# natural representation


def natural_rep_apply(bc, M, Y):
    """Apply the 1-morphism ``M`` to a twisted object ``Y`` over ``A^op``.

    ``Y`` lives in the natural representation at the source of ``M``: its
    generators ``X_u = A e_u`` must have ``u`` in that block.  Morphisms
    ``X_u -> X_u'`` are right multiplications by elements of ``e_u A e_u'``.
    """
    A = bc.A
    p = A.p
    Aop = A.opposite()
    cat = M.cat
    for u, _ in Y.gens:
        if A.block_of(u) != cat.src:
            raise ObjectMismatch(f"generator X_{u + 1} is not at object {cat.src + 1}")
    ykeys = list(Y.keys) if Y.keys is not None else [((), y, ()) for y in range(Y.size)]
    mkeys = M.keys()
    entries, keys, pos = [], [], {}
    for m, (gi, a) in enumerate(M.obj.gens):
        g = cat.gens[gi]
        for y, (u, c) in enumerate(Y.gens):
            km, ky = mkeys[m], ykeys[y]
            if g.kind == "id":
                pos[m, y, None] = len(entries)
                entries.append((u, a + c))
                keys.append((km[0] + ky[0], ky[1], km[1] + ky[2]))
                continue
            pc, order = bc.middle(g, Gen("proj", u, u))
            for r, k in enumerate(order):
                pos[m, y, r] = len(entries)
                entries.append((g.a, a + c - pc.degrees[k]))
                keys.append((km[0] + ky[0], ky[1], km[1] + (r,) + ky[2]))
    size = len(entries)
    alpha = np.zeros((size, size, A.n), dtype=np.int64)

    def add(r, c, v):
        alpha[r, c] = (alpha[r, c] + v) % p

    def mid(g, u):
        # ordered middle basis of e_t A e_u and coordinates in that order
        pc, order = bc.middle(g, Gen("proj", u, u))
        return pc, order

    def mid_coords(pc, order, v):
        c = pc.coords(v) if pc.dim else np.zeros(0, dtype=np.int64)
        return np.array([c[k] for k in order], dtype=np.int64)

    for m, (gi, _) in enumerate(M.obj.gens):
        g = cat.gens[gi]
        for y, (u, _) in enumerate(Y.gens):
            if g.kind == "proj":
                pc, order = mid(g, u)
                es = A.idempotents[g.a]
                for r, k in enumerate(order):
                    cs = mid_coords(pc, order, A.d(pc.basis[k]))
                    for r2 in np.nonzero(cs)[0]:
                        add(pos[m, y, int(r2)], pos[m, y, r], cs[r2] * es)
            for y2, (u2, _) in enumerate(Y.gens):
                beta = Y.alpha[y2, y]
                if not np.any(beta):
                    continue
                if g.kind == "id":
                    add(pos[m, y2, None], pos[m, y, None], beta)
                    continue
                pc, order = mid(g, u)
                pc2, order2 = mid(g, u2)
                es = A.idempotents[g.a]
                for r, k in enumerate(order):
                    cs = mid_coords(pc2, order2, A.mult(pc.basis[k], beta))
                    for r2 in np.nonzero(cs)[0]:
                        add(pos[m, y2, int(r2)], pos[m, y, r], cs[r2] * es)
    for m, (gi, _) in enumerate(M.obj.gens):
        for m2, (gi2, _) in enumerate(M.obj.gens):
            vec = M.obj.alpha[m2, m]
            if not np.any(vec):
                continue
            g, g2 = cat.gens[gi], cat.gens[gi2]
            img = cat.image(gi2, gi, vec)
            for y, (u, _) in enumerate(Y.gens):
                eu = A.idempotents[u]
                if g.kind == "proj" and g2.kind == "proj":
                    pc, order = mid(g, u)
                    pc2, order2 = mid(g2, u)
                    G = img.reshape(A.n, A.n)
                    for r, k in enumerate(order):
                        C = np.array([mid_coords(pc2, order2, A.mult(A.basis_vector(d), pc.basis[k]))
                                      for d in range(A.n)]).reshape(A.n, len(order2))
                        ent = (G @ C) % p
                        for r2 in range(len(order2)):
                            add(pos[m2, y, r2], pos[m, y, r], ent[:, r2])
                elif g.kind == "proj":
                    pc, order = mid(g, u)
                    for r, k in enumerate(order):
                        add(pos[m2, y, None], pos[m, y, r], A.mult(img, pc.basis[k]))
                elif g2.kind == "proj":
                    pc2, order2 = mid(g2, u)
                    Z = img.reshape(A.n, A.n)
                    C = np.array([mid_coords(pc2, order2, A.mult(A.basis_vector(d), eu))
                                  for d in range(A.n)]).reshape(A.n, len(order2))
                    ent = (Z @ C) % p
                    for r2 in range(len(order2)):
                        add(pos[m2, y, r2], pos[m, y, None], A.mult(eu, ent[:, r2]))
                else:
                    add(pos[m2, y, None], pos[m, y, None], A.mult(eu, img))
    obj, _ = _sorted_object(Aop, entries, alpha, keys)
    return obj


# cell 2-representation


@dataclass
class HomPair:
    """``Hom(P(s,t), P(s2,t))`` inside ``R_L`` in local coordinates of its piece."""

    block: int
    s: int
    s2: int
    k: int  # index of P(s2, t) in the hom category
    l: int  # index of P(s, t)
    dim: int
    degrees: tuple
    ideal: np.ndarray
    reps: list


@dataclass
class CellRepData:
    bc: object
    t: int
    block: int
    objects: dict  # target block -> list of idempotents s
    pairs: dict = field(default_factory=dict)  # (s, s2) -> HomPair
    chi: np.ndarray = None
    checks: dict = field(default_factory=dict)

    @property
    def label(self):
        return f"P(-,{self.t + 1})"

    def cat(self, j):
        return self.bc.hom(self.block, j)

    def quotient_graded_dim(self, s, s2):
        hp = self.pairs[s, s2]
        out = {}
        for v in hp.reps:
            d = _vec_degree(v, hp.degrees)
            out[d] = out.get(d, 0) + 1
        return out


def _vec_degree(v, degrees):
    nz = np.nonzero(v)[0]
    return int(degrees[nz[0]]) if len(nz) else 0


def _chi(A, t, rad_t):
    """Linear form on ``A`` reading ``e_t x e_t`` modulo ``rad(e_t A e_t)``."""
    p = A.p
    et = A.idempotents[t]
    rows = np.vstack([et.reshape(1, -1), rad_t]) if rad_t.shape[0] else et.reshape(1, -1)
    out = np.zeros(A.n, dtype=np.int64)
    for b in range(A.n):
        v = A.mult(A.mult(et, A.basis_vector(b)), et)
        sol = gflin.solve(rows.T, v, p)
        if sol is None:
            raise UnsupportedShape(f"e_{t + 1} A e_{t + 1} is not local with one-dimensional top")
        out[b] = sol[0]
    return out


def build_cell_rep(bc, t, check_action=True):
    """Cell 2-representation data for the left cell ``{P(-, t)}``.

    Raises :class:`AssumptionViolation` when the radical is not closed under
    the differential.
    """
    A = bc.A
    p = A.p
    rad = radical(A)
    if not rad.diff_stable:
        raise AssumptionViolation(
            f"the radical is not closed under d: d({A.fmt(rad.witness)}) leaves it")
    et = A.idempotents[t]
    rad_t = (gflin.span_basis(np.array([A.mult(A.mult(et, r), et) for r in rad.basis]), p, A.n)
             if rad.dim else np.zeros((0, A.n), dtype=np.int64))
    iL = A.block_of(t)
    data = CellRepData(bc, t, iL, {})
    data.chi = _chi(A, t, rad_t)
    blocks = A.blocks()
    for j in range(len(blocks)):
        data.objects[j] = list(blocks[j])
        cat = bc.hom(iL, j)
        for s in blocks[j]:
            for s2 in blocks[j]:
                l = cat.index[Gen("proj", s, t)]
                k = cat.index[Gen("proj", s2, t)]
                pc = cat.pieces[k, l]
                cs = A.piece(s, s2)
                J = []
                for c in cs.basis:
                    for r in rad_t:
                        J.append(pc.coords(np.outer(c, r).reshape(-1)))
                J = (gflin.span_basis(np.array(J), p, pc.dim) if J
                     else np.zeros((0, pc.dim), dtype=np.int64))
                eye = np.eye(pc.dim, dtype=np.int64)
                _, reps = gflin.subspace_quotient(pc.dim, J, list(eye), p)
                data.pairs[s, s2] = HomPair(j, s, s2, k, l, pc.dim, pc.degrees, J, reps)
    data.checks = ideal_checks(data, check_action)
    return data


def _evec(cat, k, l, local):
    v = np.zeros(cat.E.n, dtype=np.int64)
    off = cat.offsets[k, l]
    v[off:off + len(local)] = local
    return v


def _local(cat, k, l, evec):
    off = cat.offsets[k, l]
    return np.asarray(evec[off:off + cat.pieces[k, l].dim]) % cat.bc.p


def _pair_of(data, cat, k, l):
    gk, gl = cat.gens[k], cat.gens[l]
    if gk.kind != "proj" or gl.kind != "proj" or gk.b != data.t or gl.b != data.t:
        return None
    return data.pairs.get((gl.a, gk.a))


def _action_images(data, j, hp, vec):
    """All entries of ``gamma o_0 x`` for generator-level basis ``gamma`` out of block ``j``."""
    bc = data.bc
    catR = data.cat(j)
    x = _evec(catR, hp.k, hp.l, vec)
    out = []
    for j2 in range(bc.nobjects):
        catL = bc.hom(j, j2)
        catO = data.cat(j2)
        for (k1, k2, _), gam in zip(catL.meta, np.eye(catL.E.n, dtype=np.int64)):
            k1, k2 = k2, k1  # meta records (target, source)
            blk = _hcomp_gen(bc, catL, k1, k2, gam, catR, hp.l, hp.k, x, catO)
            src_exp, _ = bc.expansion(catL.gens[k1], catR.gens[hp.l])
            tgt_exp, _ = bc.expansion(catL.gens[k2], catR.gens[hp.k])
            for r, (tg, _, _) in enumerate(tgt_exp):
                for c, (sg, _, _) in enumerate(src_exp):
                    ent = blk[r, c]
                    if np.any(ent):
                        kk, ll = catO.index[tg], catO.index[sg]
                        out.append((j2, kk, ll, _local(catO, kk, ll, ent)))
    return out


def ideal_checks(data, check_action=True):
    """Closure of ``J`` under the differential, vertical composition and the action."""
    bc = data.bc
    p = bc.p
    res = {"d-stable": True, "composition-stable": True, "action-stable": True,
           "identity-free": True}
    for (s, s2), hp in data.pairs.items():
        j = hp.block
        cat = data.cat(j)
        idv = np.outer(bc.A.idempotents[s], bc.A.idempotents[data.t]).reshape(-1)
        if s == s2 and gflin.in_span(hp.ideal, cat.pieces[hp.k, hp.l].coords(idv), p):
            res["identity-free"] = False
        for row in hp.ideal:
            x = _evec(cat, hp.k, hp.l, row)
            dx = cat.E.d(x)
            if not gflin.in_span(hp.ideal, _local(cat, hp.k, hp.l, dx), p):
                res["d-stable"] = False
            for (s3, s4), hp2 in data.pairs.items():
                if hp2.block != j:
                    continue
                for b in np.eye(hp2.dim, dtype=np.int64):
                    y = _evec(cat, hp2.k, hp2.l, b)
                    if s3 == s2:
                        z = cat.E.mult(y, x)
                        tgt = data.pairs[s, s4]
                        if not gflin.in_span(tgt.ideal, _local(cat, tgt.k, tgt.l, z), p):
                            res["composition-stable"] = False
                    if s4 == s:
                        z = cat.E.mult(x, y)
                        tgt = data.pairs[s3, s2]
                        if not gflin.in_span(tgt.ideal, _local(cat, tgt.k, tgt.l, z), p):
                            res["composition-stable"] = False
            if check_action:
                for j2, kk, ll, loc in _action_images(data, j, hp, row):
                    tp = _pair_of(data, data.cat(j2), kk, ll)
                    if tp is None or not gflin.in_span(tp.ideal, loc, p):
                        res["action-stable"] = False
    return res


def maximality_check(data):
    """For each closed morphism outside ``J``, the ideal it generates with ``J`` hits an identity.

    Returns a list of ``(pair, vector, reached)``; the closure is computed
    exhaustively under the differential, vertical composition and the
    generator-level action.
    """
    bc = data.bc
    p = bc.p
    out = []
    for key, hp in data.pairs.items():
        cat = data.cat(hp.block)
        Dloc = []
        for b in np.eye(hp.dim, dtype=np.int64):
            Dloc.append(_local(cat, hp.k, hp.l, cat.E.d(_evec(cat, hp.k, hp.l, b))))
        D = np.array(Dloc, dtype=np.int64).T.reshape(hp.dim, hp.dim)
        Z = gflin.kernel(D, p, hp.dim) if hp.dim else np.zeros((0, 0), dtype=np.int64)
        _, cands = gflin.subspace_quotient(hp.dim, hp.ideal, list(Z), p)
        for v in cands:
            out.append((key, v, _closure_hits_identity(data, key, v)))
    return out


def _closure_hits_identity(data, key, v):
    bc = data.bc
    A = bc.A
    p = bc.p
    spaces = {k: hp.ideal.copy() for k, hp in data.pairs.items()}
    spaces[key] = gflin.span_basis(np.vstack([spaces[key], v.reshape(1, -1)]), p,
                                   data.pairs[key].dim)
    byblock = {}
    for k, hp in data.pairs.items():
        byblock.setdefault(hp.block, []).append(k)

    def has_identity():
        for (s, s2), S in spaces.items():
            if s == s2:
                hp = data.pairs[s, s2]
                cat = data.cat(hp.block)
                idv = np.outer(A.idempotents[s], A.idempotents[data.t]).reshape(-1)
                if gflin.in_span(S, cat.pieces[hp.k, hp.l].coords(idv), p):
                    return True
        return False

    changed = True
    while changed:
        if has_identity():
            return True
        changed = False
        new = {k: [] for k in spaces}
        for (s, s2), S in spaces.items():
            hp = data.pairs[s, s2]
            cat = data.cat(hp.block)
            for row in S:
                x = _evec(cat, hp.k, hp.l, row)
                new[s, s2].append(_local(cat, hp.k, hp.l, cat.E.d(x)))
                for k2 in byblock[hp.block]:
                    hp2 = data.pairs[k2]
                    for b in np.eye(hp2.dim, dtype=np.int64):
                        y = _evec(cat, hp2.k, hp2.l, b)
                        if k2[0] == s2:
                            tgt = data.pairs[s, k2[1]]
                            new[s, k2[1]].append(_local(cat, tgt.k, tgt.l, cat.E.mult(y, x)))
                        if k2[1] == s:
                            tgt = data.pairs[k2[0], s2]
                            new[k2[0], s2].append(_local(cat, tgt.k, tgt.l, cat.E.mult(x, y)))
                for j2, kk, ll, loc in _action_images(data, hp.block, hp, row):
                    tp = _pair_of(data, data.cat(j2), kk, ll)
                    if tp is not None:
                        new[tp.s, tp.s2].append(loc)
        for k, vecs in new.items():
            if not vecs:
                continue
            dim = data.pairs[k].dim
            rows = [spaces[k]] if spaces[k].shape[0] else []
            merged = gflin.span_basis(np.vstack(rows + [np.array(vecs).reshape(-1, dim)]), p, dim)
            if merged.shape[0] > spaces[k].shape[0]:
                spaces[k] = merged
                changed = True
    return has_identity()


@dataclass
class PairReport:
    block: int
    s: int
    s2: int
    quotient: dict
    natural: dict
    diff_ok: bool
    bijective: bool

    @property
    def ok(self):
        return self.quotient == self.natural and self.diff_ok and self.bijective

    def line(self):
        return (f"P({self.s + 1},t) -> P({self.s2 + 1},t) at object {self.block + 1}: "
                f"quotient {_qpoly(self.quotient)}, natural {_qpoly(self.natural)}, "
                f"d {'agrees' if self.diff_ok else 'DIFFERS'}"
                f"{'' if self.bijective else ', correspondence not bijective'}")


def _phi(data, img):
    n = data.bc.n
    return (img.reshape(n, n) @ data.chi) % data.bc.p


def compare_with_natural(data):
    """Per pair, quotient hom dims against ``e_s A e_s2`` and ``d`` under ``c (x) d -> c chi(d)``."""
    bc = data.bc
    A = bc.A
    p = A.p
    out = []
    for (s, s2), hp in data.pairs.items():
        cat = data.cat(hp.block)
        natural = {}
        pcn = A.piece(s, s2)
        for d in pcn.degrees:
            natural[d] = natural.get(d, 0) + 1
        quotient = data.quotient_graded_dim(s, s2)
        imgs = [_phi(data, cat.image(hp.k, hp.l, _evec(cat, hp.k, hp.l, v))) for v in hp.reps]
        bij = (len(imgs) == pcn.dim and
               (not imgs or gflin.rank(np.array(imgs), p) == pcn.dim))
        ok = True
        for row in hp.ideal:
            if np.any(_phi(data, cat.image(hp.k, hp.l, _evec(cat, hp.k, hp.l, row)))):
                ok = False
        for b in np.eye(hp.dim, dtype=np.int64):
            x = _evec(cat, hp.k, hp.l, b)
            lhs = _phi(data, cat.image(hp.k, hp.l, cat.E.d(x)))
            rhs = A.d(_phi(data, cat.image(hp.k, hp.l, x)))
            if not np.array_equal(lhs, rhs):
                ok = False
        out.append(PairReport(hp.block, s, s2, quotient, natural, ok, bij))
    return out


# stable data for the truncated polynomial example


def stable_compose(g, f, target_stable):
    """Stable class of ``g f`` in the representative basis of ``target_stable``."""
    return target_stable.class_of(compose(g, f))


@dataclass
class KxStableData:
    bc: object
    one: object
    F: object
    morphisms: dict
    stable: dict


def kx_stable_data(bc):
    """Named stable 2-morphisms for ``A = k[x]/(x^3)`` with ``d(x) = x^2``.

    ``p`` is multiplication ``F -> 1``, ``t = x^2`` on ``1``, and on ``F``
    the maps ``l = x^2 (x) 1``, ``r = 1 (x) x^2`` and
    ``s = x^2 (x) x - x (x) x^2``.
    """
    A = bc.A
    n = A.n
    if n != 3 or A.r != 1:
        raise UnsupportedShape("expects the three-dimensional truncated polynomial algebra")
    cat = bc.hom(0, 0)
    one = cat.one(Gen("id", 0))
    F = cat.one(Gen("proj", 0, 0))
    iI, iF = cat.index[Gen("id", 0)], cat.index[Gen("proj", 0, 0)]
    e, x, x2 = np.eye(3, dtype=np.int64)

    def tens(a, b):
        return np.outer(a, b).reshape(-1) % A.p

    def mor(src, tgt, k, l, img, deg):
        v = cat.element(k, l, img)
        return TwistedMorphism(src.obj, tgt.obj, v.reshape(1, 1, -1), deg)

    dx = A.degrees[1]
    mors = {
        "1": mor(one, one, iI, iI, e, 0),
        "t": mor(one, one, iI, iI, x2, 2 * dx),
        "p": mor(F, one, iI, iF, e, 0),
        "id_F": mor(F, F, iF, iF, tens(e, e), 0),
        "l": mor(F, F, iF, iF, tens(x2, e), 2 * dx),
        "r": mor(F, F, iF, iF, tens(e, x2), 2 * dx),
        "s": mor(F, F, iF, iF, (tens(x2, x) - tens(x, x2)) % A.p, 3 * dx),
    }
    mors["tp"] = mor(F, one, iI, iF, x2, 2 * dx)
    stable = {}
    for name, (M, N) in {"End(1)": (one, one), "Hom(F,1)": (F, one),
                         "End(F)": (F, F), "Hom(1,F)": (one, F)}.items():
        stable[name] = stable_two_hom(bc, M, N)
    return KxStableData(bc, one, F, mors, stable)


def kx_relations(data):
    """The fifteen stable relations; returns ``{name: bool}``."""
    m = data.morphisms

    def sh(src, tgt, deg):
        return stable_hom(src, tgt, deg)

    F, one = data.F.obj, data.one.obj

    def zero(g, f):
        h = compose(g, f)
        st = sh(h.source, h.target, h.degree)
        return st.is_boundary(h)

    def equal(a, b):
        if a.degree != b.degree:
            return False
        st = sh(a.source, a.target, a.degree)
        return st.is_boundary(a - b)

    p, l, r, s, t = m["p"], m["l"], m["r"], m["s"], m["t"]
    pl, pr, tp = compose(p, l), compose(p, r), compose(t, p)
    rel = {
        "pl = pr": equal(pl, pr),
        "pr = tp": equal(pr, tp),
        "pl = tp": equal(pl, tp),
        "tp != 0": not sh(F, one, tp.degree).is_boundary(tp),
        "ps = 0": zero(p, s),
        "lr = 0": zero(l, r),
        "rl = 0": zero(r, l),
        "sl = 0": zero(s, l),
        "ls = 0": zero(l, s),
        "rs = 0": zero(r, s),
        "sr = 0": zero(s, r),
        "l^2 = 0": zero(l, l),
        "r^2 = 0": zero(r, r),
        "s^2 = 0": zero(s, s),
        "t^2 = 0": zero(t, t),
    }
    return rel


def identity_cell_quotient(bc, block):
    """``End(Id)`` modulo its radical for a local center: graded dims of the quotient."""
    A = bc.A
    p = A.p
    u = A.block_unit(block)
    Z = center(A)
    Zb = gflin.span_basis(np.array([A.mult(u, z) for z in Z]), p, A.n)
    nil = []
    for z in Zb:
        for c in range(p):
            a = (z - c * u) % p
            x = a.copy()
            for _ in range(A.n):
                x = A.mult(x, a)
            if not np.any(x):
                nil.append(a)
                break
    R = gflin.span_basis(np.array(nil), p, A.n) if nil else np.zeros((0, A.n), np.int64)
    _, reps = gflin.subspace_quotient(A.n, R, list(Zb), p)
    return {0: len(reps)} if reps else {}
