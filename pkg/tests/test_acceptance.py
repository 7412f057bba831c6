"""Acceptance criteria, one test per criterion with its runtime budget."""
import itertools
import time

import numpy as np
import pytest

from pdgcat import builtin
from pdgcat.bicat import BiCategory, Gen, compute_cells, hcompose, hcompose_2, strong_regularity
from pdgcat.cellrep import build_cell_rep, compare_with_natural, kx_relations, kx_stable_data
from pdgcat.filtration import (
    canonical_filtration,
    end_algebra,
    restricted_diff_matrix,
    subquotient_pairs,
    verify_fantastic,
)
from pdgcat.homotopy import (
    cone,
    factors_through_contractible,
    is_null_homotopic,
    mediate,
    stable_hom,
    stable_homs,
    stable_total,
)
from pdgcat.twisted import (
    HomSpace,
    TwistedObject,
    check_twisted,
    compose,
    identity,
    morphism_diff,
)
from support import (
    algebras,
    all_vectors,
    matrix_power_mod,
    random_cycle,
    random_morphism,
    random_twisted,
    random_valid_twisted,
    rank_plain,
    realization_valid,
)

K = builtin.kx(3, 3)
VARIANT = builtin.kx_paper_variant(3)
ALGS = algebras()


class Timer:
    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t


def total_stable_dim_by_ranks(X, Y):
    """``dim ker D - rank D^(p-1)`` on the whole hom complex, by plain elimination."""
    D = HomSpace(X, Y).diff_matrix()
    p = X.A.p
    if D.size == 0:
        return 0
    return D.shape[0] - rank_plain(D, p) - rank_plain(matrix_power_mod(D, p - 1, p), p)


@pytest.mark.criterion(1, "stable 2-hom dimensions and bases over K")
def test_criterion_1_stable_two_homs():
    with Timer() as t:
        data = kx_stable_data(BiCategory(K))
        st = data.stable
        dims = {k: sum(s.dim for s in v.values()) for k, v in st.items()}
        assert dims == {"End(1)": 2, "Hom(F,1)": 2, "End(F)": 4, "Hom(1,F)": 0}
        # the listed morphisms are independent stable classes, hence bases
        m = data.morphisms
        bases = {"End(1)": ["1", "t"], "Hom(F,1)": ["p", "tp"],
                 "End(F)": ["id_F", "l", "r", "s"]}
        for name, keys in bases.items():
            for key in keys:
                f = m[key]
                assert morphism_diff(f).is_zero()
                assert not st[name][f.degree].is_boundary(f)
            for d in {m[k].degree for k in keys}:
                same = [m[k] for k in keys if m[k].degree == d]
                rows = np.array([st[name][d].class_of(f) for f in same])
                assert rank_plain(rows, 3) == len(same) == st[name][d].dim
    assert t.elapsed < 1.0
    # second route: totals from ranks of D and D^(p-1)
    one, F = data.one.obj, data.F.obj
    assert [total_stable_dim_by_ranks(X, Y) for X, Y in ((one, one), (F, one), (F, F), (one, F))] \
        == [2, 2, 4, 0]
    # the variant with d(x) = 1 and deg x = -2 collapses End(1): 2x^2 is a witness
    bcp = BiCategory(VARIANT)
    Ip = bcp.hom(0, 0).one(Gen("id", 0))
    assert sum(s.dim for s in stable_homs(Ip.obj, Ip.obj).values()) == 0
    ok, g = is_null_homotopic(identity(Ip.obj))
    assert ok and np.array_equal(g.entries[0, 0], bcp.hom(0, 0).element(0, 0, [0, 0, 2]))


@pytest.mark.criterion(2, "fifteen stable composition relations")
def test_criterion_2_relations():
    with Timer() as t:
        rel = kx_relations(kx_stable_data(BiCategory(K)))
    assert t.elapsed < 1.0
    assert len(rel) == 15
    assert all(rel.values()), [k for k, v in rel.items() if not v]


@pytest.mark.criterion(3, "validity agrees with the realized operator")
def test_criterion_3_validity_oracle():
    rng = np.random.default_rng(2024)
    names = sorted(ALGS)
    n_valid = 0
    with Timer() as t:
        for k in range(240):
            A = ALGS[names[k % len(names)]]
            X = random_twisted(A, rng, max_gens=4)
            ok = not check_twisted(X)
            assert ok == realization_valid(X), X
            n_valid += ok
    assert t.elapsed < 10.0
    # both outcomes are exercised
    assert 0 < n_valid < 240


def _z_morphisms(X, Y, rng, cap=243):
    S = stable_hom(X, Y, 0)
    Z = S.cycle_basis
    if Z.shape[0] == 0:
        return [S.hom.from_coords(np.zeros(S.hom.dim, dtype=np.int64), 0)]
    p = X.A.p
    if p ** Z.shape[0] <= cap:
        coeffs = all_vectors(Z.shape[0], p)
    else:
        coeffs = (rng.integers(0, p, Z.shape[0]) for _ in range(cap))
    return [S.hom.from_coords((np.asarray(c) @ Z) % p, 0) for c in coeffs]


@pytest.mark.criterion(4, "null-homotopy criteria agree")
def test_criterion_4_null_homotopy_cross_check():
    rng = np.random.default_rng(7)
    checked = null = 0
    with Timer() as t:
        for name in ("kx", "kx-zero", "kx2", "semisimple"):
            A = ALGS[name]
            for _ in range(25):
                X = random_valid_twisted(A, rng, 3)
                Y = random_valid_twisted(A, rng, 3)
                for f in _z_morphisms(X, Y, rng):
                    a = is_null_homotopic(f)[0]
                    b = factors_through_contractible(f)[0]
                    assert a == b
                    checked += 1
                    null += a
    assert t.elapsed < 10.0
    assert checked >= 200 and 0 < null < checked


@pytest.mark.criterion(5, "cone suite")
def test_criterion_5_cones():
    rng = np.random.default_rng(11)
    names = ["kx", "kx-zero", "semisimple", "coinvariant", "kx5"]
    count = 0
    with Timer() as t:
        while count < 60:
            A = ALGS[names[count % len(names)]]
            X, Y = random_valid_twisted(A, rng, 2), random_valid_twisted(A, rng, 2)
            f = random_cycle(X, Y, rng)
            cn = cone(f)
            assert check_twisted(cn.obj) == []
            for m in (cn.v, cn.r, cn.u, cn.q):
                assert morphism_diff(m).is_zero()
            assert compose(cn.r, cn.v).is_zero()
            assert compose(cn.q, cn.iota).is_zero()
            W = random_valid_twisted(A, rng, 2)
            rho0 = random_cycle(cn.obj, W, rng)
            rho, unique = mediate(cn, compose(rho0, cn.v), compose(rho0, cn.u))
            assert unique and np.array_equal(rho.entries, rho0.entries)
            assert stable_total(cone(identity(X)).obj, cone(identity(X)).obj) == 0
            count += 1
    assert t.elapsed < 10.0


@pytest.mark.criterion(6, "fantastic filtrations")
def test_criterion_6_filtrations():
    rng = np.random.default_rng(5)
    names = sorted(ALGS)
    with Timer() as t:
        for k in range(220):
            X = random_valid_twisted(ALGS[names[k % len(names)]], rng, 4)
            cert = canonical_filtration(X)
            assert verify_fantastic(cert) is None
            assert len(cert.pieces) == X.size
        bc = BiCategory(VARIANT)
        cat = bc.hom(0, 0)
        F = cat.one(Gen("proj", 0, 0))
        F2 = hcompose(bc, F, F)
        cert = canonical_filtration(F2.obj)
        assert verify_fantastic(cert) is None
        iF = cat.index[Gen("proj", 0, 0)]
        assert [P.gens for P in cert.pieces] == [((iF, 0),), ((iF, 2),), ((iF, 4),)]
    assert t.elapsed < 5.0


@pytest.mark.criterion(7, "cell structures")
def test_criterion_7_cells():
    with Timer() as t:
        cs = compute_cells(K)
        cc = compute_cells(builtin.coinvariant(3, 2))
    assert t.elapsed < 1.0
    assert len(cs.two_sided_cells) == 2
    F = cs.cell_of(cs.two_sided_cells, [g.label() for g in cs.indecomposables].index("P(1,1)"))
    I = cs.cell_of(cs.two_sided_cells, [g.label() for g in cs.indecomposables].index("Id(1)"))
    assert cs.two_sided_order() == {(F, I)}
    assert strong_regularity(cc)
    # every projective indecomposable lies in one two-sided cell, forming the grid
    proj = [k for k, g in enumerate(cc.indecomposables) if g.kind == "proj"]
    J = {cc.cell_of(cc.two_sided_cells, k) for k in proj}
    assert len(J) == 1
    for k in proj:
        g = cc.indecomposables[k]
        for k2 in proj:
            g2 = cc.indecomposables[k2]
            assert (cc.cell_of(cc.left_cells, k) == cc.cell_of(cc.left_cells, k2)) == (g.b == g2.b)
            assert (cc.cell_of(cc.right_cells, k) == cc.cell_of(cc.right_cells, k2)) == \
                (g.a == g2.a)


@pytest.mark.criterion(8, "cell 2-representation matches the natural one")
def test_criterion_8_cell_reps():
    with Timer() as t:
        for A in (K, builtin.semisimple(3, 2), builtin.coinvariant(3, 2)):
            bc = BiCategory(A)
            for tt in range(A.r):
                data = build_cell_rep(bc, tt)
                assert all(data.checks.values())
                bad = [r.line() for r in compare_with_natural(data) if not r.ok]
                assert bad == []
    assert t.elapsed < 5.0


def _leibniz_and_nilpotent_algebras():
    for A in list(ALGS.values()) + [VARIANT, builtin.kx_squared(3, 3), builtin.matrix_algebra(3, 2)]:
        for i, j in itertools.product(range(A.n), repeat=2):
            a, b = A.basis_vector(i), A.basis_vector(j)
            assert np.array_equal(A.d(A.mult(a, b)),
                                  (A.mult(A.d(a), b) + A.mult(a, A.d(b))) % A.p)
        assert not np.any(matrix_power_mod(A.diff, A.p, A.p))


def _morphism_suites(rng):
    names = sorted(ALGS)
    for k in range(60):
        A = ALGS[names[k % len(names)]]
        X, Y, Z = (random_valid_twisted(A, rng, 3) for _ in range(3))
        f, g = random_morphism(X, Y, rng), random_morphism(Y, Z, rng)
        if f is None or g is None:
            continue
        lhs = morphism_diff(compose(g, f))
        rhs = compose(morphism_diff(g), f) + compose(g, morphism_diff(f))
        assert np.array_equal(lhs.entries, rhs.entries)
        h = f
        for _ in range(A.p):
            h = morphism_diff(h)
        assert h.is_zero()


def _bicategory_suites(rng):
    for A in (K, VARIANT):
        bc = BiCategory(A)
        cat = bc.hom(0, 0)
        I, F = cat.one(Gen("id", 0)), cat.one(Gen("proj", 0, 0))
        pool = [I, F, hcompose(bc, F, F)]
        for M, N, L in itertools.product(pool[:2], repeat=3):
            assert hcompose(bc, hcompose(bc, M, N), L).obj == hcompose(bc, M, hcompose(bc, N, L)).obj
        for _ in range(15):
            M1, M2, M3, N1, N2, N3 = (pool[k] for k in rng.integers(0, 3, 6))
            g, g2 = random_morphism(M1.obj, M2.obj, rng), random_morphism(M2.obj, M3.obj, rng)
            t, t2 = random_morphism(N1.obj, N2.obj, rng), random_morphism(N2.obj, N3.obj, rng)
            if None in (g, g2, t, t2):
                continue
            lhs = hcompose_2(bc, compose(g2, g), M1, M3, compose(t2, t), N1, N3)
            rhs = compose(hcompose_2(bc, g2, M2, M3, t2, N2, N3),
                          hcompose_2(bc, g, M1, M2, t, N1, N2))
            assert np.array_equal(lhs.entries, rhs.entries)
            d = morphism_diff(hcompose_2(bc, g, M1, M2, t, N1, N2))
            e = hcompose_2(bc, morphism_diff(g), M1, M2, t, N1, N2) + \
                hcompose_2(bc, g, M1, M2, morphism_diff(t), N1, N2)
            assert np.array_equal(d.entries, e.entries)


def _subquotient_suite():
    genuine = 0
    for A in (K, VARIANT):
        E = end_algebra(TwistedObject(A, [(0, 0), (0, 2 if A is K else 4)]))
        pairs = subquotient_pairs(E)
        genuine += sum(1 for q in pairs
                       if not np.array_equal(q.e, q.w) and np.any(E.d(q.e)))
        idems = {tuple(q.e) for q in pairs}
        for f, e in itertools.product(idems, repeat=2):
            pc, M = restricted_diff_matrix(np.array(f), np.array(e), E)
            if 0 < pc.dim <= 16:
                assert not np.any(matrix_power_mod(M, E.p, E.p))
    assert genuine > 0


@pytest.mark.criterion(9, "axiom property suites")
def test_criterion_9_property_suites():
    rng = np.random.default_rng(9)
    with Timer() as t:
        _leibniz_and_nilpotent_algebras()
        _morphism_suites(rng)
        _bicategory_suites(rng)
        _subquotient_suite()
    assert t.elapsed < 30.0
