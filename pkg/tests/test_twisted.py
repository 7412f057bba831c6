import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdgcat import builtin
from pdgcat.pdgalg import HModule
from pdgcat.twisted import (
    HomSpace,
    InvalidTwisted,
    TwistedMorphism,
    TwistedObject,
    check_twisted,
    compose,
    direct_sum,
    direct_sum_maps,
    identity,
    is_invertible,
    jordan_chain,
    matmul,
    morphism_diff,
    pdg_iso,
    shift,
    tensor_h,
    validate_twisted,
)
from support import algebras, random_morphism, random_twisted, random_valid_twisted, \
    realization_valid

K = builtin.kx(3, 3)
ALGS = algebras()
seeds = st.integers(0, 2 ** 32 - 1)


def chain(A, n, start=0, idem=0):
    """``n`` copies of one generator at climbing shifts linked by identities."""
    gens = [(idem, start + 2 * k) for k in range(n)]
    alpha = np.zeros((n, n, A.n), dtype=np.int64)
    for k in range(n - 1):
        alpha[k, k + 1] = A.idempotents[idem]
    return TwistedObject(A, gens, alpha)


def test_zero_twist_is_valid():
    X = TwistedObject(K, [(0, 0), (0, 4), (0, -2)])
    assert check_twisted(X) == []


def test_three_chain_valid_four_chain_invalid():
    assert check_twisted(chain(K, 3)) == []
    bad = check_twisted(chain(K, 4))
    assert [(v.axiom, v.witness) for v in bad] == [("p-differential", (1, 4))]
    with pytest.raises(InvalidTwisted):
        validate_twisted(chain(K, 4))


def test_shape_violations_are_named():
    A = builtin.semisimple(3, 2)
    alpha = np.zeros((2, 2, 2), dtype=np.int64)
    alpha[1, 0] = A.idempotents[0]
    assert check_twisted(TwistedObject(A, [(0, 0), (0, 2)], alpha))[0].axiom == "triangular"
    alpha = np.zeros((2, 2, 2), dtype=np.int64)
    alpha[0, 1] = A.idempotents[0]
    bad = check_twisted(TwistedObject(A, [(0, 0), (1, 2)], alpha))
    assert bad[0].axiom == "alpha-piece" and bad[0].witness == (1, 2)
    bad = check_twisted(TwistedObject(A, [(0, 0), (0, 4)], alpha))
    assert bad[0].axiom == "alpha-degree"


def test_diff_of_identity_and_projection():
    X = chain(K, 3)
    assert morphism_diff(identity(X)).is_zero()
    Y = TwistedObject(K, [X.gens[0]])
    proj = TwistedMorphism(X, Y, identity(X).entries[:1], 0)
    d = morphism_diff(proj)
    assert d.degree == 2
    # beta = 0, so the differential is minus the first row of alpha
    assert np.array_equal(d.entries[0], (-X.alpha[0]) % 3)


def test_diff_of_x_times_identity():
    X = TwistedObject(K, [(0, 0)])
    g = TwistedMorphism(X, X, [[[0, 1, 0]]], 2)
    assert np.array_equal(morphism_diff(g).entries, [[[0, 0, 1]]])


def _random_pair(rng, name=None):
    names = sorted(ALGS)
    A = ALGS[name or names[rng.integers(len(names))]]
    return A, random_valid_twisted(A, rng, 3), random_valid_twisted(A, rng, 3)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_leibniz_for_composition(seed):
    rng = np.random.default_rng(seed)
    A, X, Y = _random_pair(rng)
    Z = random_valid_twisted(A, rng, 3)
    f, g = random_morphism(X, Y, rng), random_morphism(Y, Z, rng)
    if f is None or g is None:
        return
    lhs = morphism_diff(compose(g, f))
    rhs = compose(morphism_diff(g), f) + compose(g, morphism_diff(f))
    assert np.array_equal(lhs.entries, rhs.entries)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_diff_p_times_is_zero(seed):
    rng = np.random.default_rng(seed)
    A, X, Y = _random_pair(rng)
    f = random_morphism(X, Y, rng)
    if f is None:
        return
    for _ in range(A.p):
        f = morphism_diff(f)
    assert f.is_zero()


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_random_objects_agree_with_realization(seed):
    rng = np.random.default_rng(seed)
    A = ALGS[sorted(ALGS)[rng.integers(len(ALGS))]]
    X = random_twisted(A, rng)
    assert (not check_twisted(X)) == realization_valid(X)


def test_direct_sum_properties():
    X, Y, Z = chain(K, 2), TwistedObject(K, [(0, 4)]), chain(K, 3, -2)
    assert direct_sum(X, TwistedObject(K, [])) == X
    S, inj, proj = direct_sum_maps(X, Y)
    for i in inj + proj:
        assert morphism_diff(i).is_zero() and i.degree == 0
    assert np.array_equal(compose(proj[0], inj[0]).entries, identity(X).entries)
    assert compose(proj[1], inj[0]).is_zero()
    assert direct_sum(direct_sum(X, Y), Z).gens == direct_sum(X, direct_sum(Y, Z)).gens
    assert direct_sum(direct_sum(X, Y), Z) == direct_sum(X, Y, Z)


def test_tensor_h_examples():
    X = chain(K, 2)
    assert tensor_h(X, [(0, 0)]) == X
    C = jordan_chain(K, 0, 2, 0)
    assert C.gens == ((0, -4), (0, -2), (0, 0))
    assert check_twisted(C) == []
    assert np.array_equal(C.alpha[0, 1], K.unit) and np.array_equal(C.alpha[1, 2], K.unit)
    # an H-module is decomposed before tensoring; this one is V_2<4>
    M = HModule((-4, -2, 0), np.diag([1, 1], -1), 3)
    assert tensor_h(TwistedObject(K, [(0, 0)]), M) == jordan_chain(K, 0, 2, 4)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_tensor_h_valid_and_additive(seed):
    rng = np.random.default_rng(seed)
    A, X, _ = _random_pair(rng)
    V = [(int(rng.integers(0, A.p)), 2 * int(rng.integers(-2, 3)))]
    W = [(int(rng.integers(0, A.p)), 2 * int(rng.integers(-2, 3)))]
    XV, XW = tensor_h(X, V), tensor_h(X, W)
    assert check_twisted(XV) == [] and check_twisted(XW) == []
    assert XV.size == X.size * (V[0][0] + 1)
    res = pdg_iso(tensor_h(X, W + V), direct_sum(XV, XW))
    assert res.status == "isomorphic"
    _check_certificate(res)


def _check_certificate(res):
    g, h = res.g, res.g_inv
    assert g.degree == 0 and h.degree == 0
    assert morphism_diff(g).is_zero() and morphism_diff(h).is_zero()
    assert np.array_equal(compose(h, g).entries, identity(g.source).entries)
    assert np.array_equal(compose(g, h).entries, identity(g.target).entries)


def test_pdg_iso_examples():
    X, Y = chain(K, 3), TwistedObject(K, [(0, 8)])
    res = pdg_iso(X, X)
    assert res and is_invertible(res.g)
    _check_certificate(res)
    res = pdg_iso(direct_sum(X, Y), direct_sum(Y, X))
    assert res.status == "isomorphic"
    _check_certificate(res)
    assert pdg_iso(X, Y).status == "not-isomorphic"


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_pdg_iso_recovers_a_conjugated_object(seed):
    rng = np.random.default_rng(seed)
    A, X, _ = _random_pair(rng)
    p = A.p
    # an upper unitriangular change of basis of degree 0 keeps alpha strictly upper
    H = HomSpace(X, X)
    v = np.zeros(H.dim, dtype=np.int64)
    for k in H.degree_indices(0):
        n, m, _ = H.index[k]
        if n < m:
            v[k] = rng.integers(0, p)
    g = H.from_coords(v, 0) + identity(X).scale(int(rng.integers(1, p)))
    ginv = _unitriangular_inverse(g)
    # alpha_Y = (g alpha_X - d g) g^-1 makes g closed
    dg = (np.einsum("zx,nmx->nmz", A.diff, g.entries)) % p
    aY = matmul(A, (matmul(A, g.entries, X.alpha) - dg) % p, ginv)
    Y = TwistedObject(A, X.gens, aY)
    assert check_twisted(Y) == []
    assert morphism_diff(TwistedMorphism(X, Y, g.entries, 0)).is_zero()
    res = pdg_iso(X, Y)
    assert res.status == "isomorphic"
    _check_certificate(res)


def _unitriangular_inverse(g):
    """Inverse of ``c * id + N`` with ``N`` strictly upper, by the geometric series."""
    A = g.A
    p = A.p
    n = g.entries.shape[0]
    ident = identity(g.source).entries
    c = next(int(v) for v in g.entries[0, 0] if v) if n else 1
    cinv = pow(c, p - 2, p)
    N = (g.entries * cinv - ident) % p
    out, term = ident.copy(), ident.copy()
    for _ in range(n):
        term = (-matmul(A, term, N)) % p
        out = (out + term) % p
    return (out * cinv) % p


def test_shift_and_morphism_degrees():
    X = chain(K, 2)
    Xs = shift(X, 4)
    assert Xs.shifts == [4, 6] and check_twisted(Xs) == []
    H = HomSpace(X, Xs)
    # the identity entries now have morphism-degree -4
    assert sorted(set(H.degrees)) == [-6, -4, -2, 0, 2]
