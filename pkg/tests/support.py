"""Independent oracles and random generators shared by the tests.

The oracles here deliberately avoid the library's own row reduction: they
enumerate vectors or build explicit operators, so agreement with the
library is a genuine second route.
"""
import itertools

import numpy as np

from pdgcat import builtin
from pdgcat.twisted import TwistedObject, check_twisted


def algebras():
    return {
        "kx": builtin.kx(3, 3),
        "kx-zero": builtin.kx(3, 3, "zero"),
        "kx2": builtin.kx(3, 2),
        "semisimple": builtin.semisimple(3, 2),
        "coinvariant": builtin.coinvariant(3, 2),
        "kx5": builtin.kx(5, 3),
    }


# brute-force linear algebra


def all_vectors(n, p):
    for c in itertools.product(range(p), repeat=n):
        yield np.array(c, dtype=np.int64)


def brute_rank(m, p):
    """Rank as log_p of the size of the row space (enumerates combinations)."""
    m = np.asarray(m, dtype=np.int64) % p
    if m.size == 0:
        return 0
    seen = {tuple((c @ m) % p) for c in all_vectors(m.shape[0], p)}
    return int(round(np.log(len(seen)) / np.log(p)))


def brute_kernel_size(m, p):
    m = np.asarray(m, dtype=np.int64) % p
    return sum(1 for v in all_vectors(m.shape[1], p) if not np.any((m @ v) % p))


# realization of twisted objects


def realized_operator(X):
    """Matrix of ``d + alpha`` on the column module ``(+)_m e_{i_m} A``.

    A column ``(v_m)`` is sent to ``d(v_k) + sum_l alpha_{k,l} v_l``.
    """
    A = X.A
    p = A.p
    blocks = []
    for i, _ in X.gens:
        e = A.idempotents[i]
        rows = [(A.mult(e, A.basis_vector(b))) for b in range(A.n)]
        blocks.append(_row_basis(np.array(rows) % p, p))
    offs = np.cumsum([0] + [b.shape[0] for b in blocks])
    N = int(offs[-1])
    D = np.zeros((N, N), dtype=np.int64)
    for l, Bl in enumerate(blocks):
        for c, v in enumerate(Bl):
            col = offs[l] + c
            out = [np.zeros(A.n, dtype=np.int64) for _ in blocks]
            out[l] = (out[l] + A.d(v)) % p
            for k in range(X.size):
                out[k] = (out[k] + A.mult(X.alpha[k, l], v)) % p
            for k, Bk in enumerate(blocks):
                D[offs[k]:offs[k + 1], col] = _coords(Bk, out[k], p)
    return D


def _row_basis(rows, p):
    """Greedy basis of the span of ``rows``, testing independence by enumeration."""
    basis = []
    for r in rows:
        if not np.any(r % p):
            continue
        trial = basis + [r % p]
        if _independent(trial, p):
            basis.append(r % p)
    return np.array(basis, dtype=np.int64).reshape(len(basis), rows.shape[1])


def _independent(vecs, p):
    k = len(vecs)
    M = np.array(vecs) % p
    for c in itertools.product(range(p), repeat=k):
        if any(c) and not np.any((np.array(c) @ M) % p):
            return False
    return True


def _coords(B, v, p):
    if B.shape[0] == 0:
        assert not np.any(v % p)
        return np.zeros(0, dtype=np.int64)
    for c in itertools.product(range(p), repeat=B.shape[0]):
        if np.array_equal((np.array(c) @ B) % p, v % p):
            return np.array(c, dtype=np.int64)
    raise AssertionError("vector outside the column module")


def matrix_power_mod(M, k, p):
    out = np.eye(M.shape[0], dtype=np.int64)
    for _ in range(k):
        out = (out @ M) % p
    return out


def realization_valid(X):
    p = X.A.p
    for k in range(X.size):
        for l in range(k + 1):
            if np.any(X.alpha[k, l]):
                return False
    D = realized_operator(X)
    return not np.any(matrix_power_mod(D, p, p))


# random twisted objects


def random_twisted(A, rng, max_gens=4, density=0.7):
    """A random object with homogeneous degree-2 twist entries and shifts in [-6, 6].

    Entries are drawn from the right graded piece so the only possible
    failure is the p-differential condition.
    """
    size = int(rng.integers(1, max_gens + 1))
    if rng.random() < 0.5:
        # a chain on one idempotent with shifts climbing by 2 admits unit
        # entries, so long chains tend to break the p-differential condition
        size = max(size, int(rng.integers(2, max_gens + 1)))
        i, s0 = int(rng.integers(0, A.r)), 2 * int(rng.integers(-3, 4 - size))
        gens = [(i, s0 + 2 * k) for k in range(size)]
        density = 1.0
    else:
        gens = [(int(rng.integers(0, A.r)), 2 * int(rng.integers(-3, 4)))
                for _ in range(size)]
    alpha = np.zeros((size, size, A.n), dtype=np.int64)
    for k in range(size):
        for l in range(k + 1, size):
            if rng.random() > density:
                continue
            (i, s), (j, t) = gens[k], gens[l]
            pc = A.piece(i, j)
            want = 2 + s - t
            idx = [r for r, d in enumerate(pc.degrees) if d == want]
            if not idx:
                continue
            c = rng.integers(1 if density == 1.0 else 0, A.p, size=len(idx))
            alpha[k, l] = (c @ pc.basis[idx]) % A.p
    return TwistedObject(A, gens, alpha)


def random_valid_twisted(A, rng, max_gens=4, tries=200):
    for _ in range(tries):
        X = random_twisted(A, rng, max_gens)
        if not check_twisted(X):
            return X
    return TwistedObject(A, [(0, 0)])


# brute-force bimodule maps


def bimodule_hom_dim(p, src, tgt):
    """Dimension of bimodule maps between two concrete bimodules by a direct linear solve.

    A bimodule is ``(basis rows, left actions, right actions)`` with the
    actions given as matrices on an ambient space.  The unknowns are all
    linear maps between the spans and the constraints are commutation with
    every basis element acting on either side.
    """
    (Bs, Ls, Rs), (Bt, Lt, Rt) = src, tgt
    Bs, piv = _rref_plain(Bs, p)
    Bt, _ = _rref_plain(Bt, p)
    ds, dt = Bs.shape[0], Bt.shape[0]
    if ds == 0 or dt == 0:
        return 0
    # unknown W (ds x dt): phi(b_i) = sum_j W[i, j] c_j
    rows = []
    for acts in ((Ls, Lt), (Rs, Rt)):
        for act_s, act_t in zip(*acts):
            aC = (act_t @ Bt.T) % p
            for i in range(ds):
                img = (act_s @ Bs[i]) % p
                ci = img[piv]
                assert np.array_equal((ci @ Bs) % p, img), "source is not a submodule"
                block = np.zeros((Bt.shape[1], ds, dt), dtype=np.int64)
                block += np.einsum("k,aj->akj", ci, Bt.T)
                block[:, i, :] -= aC
                rows.append(block.reshape(Bt.shape[1], ds * dt) % p)
    return ds * dt - rank_plain(np.vstack(rows), p)


def _rref_plain(M, p):
    """Textbook Gauss-Jordan elimination, written independently of the library."""
    M = np.asarray(M, dtype=np.int64).copy() % p
    r = 0
    rows, cols = M.shape
    piv = []
    for c in range(cols):
        if r == rows:
            break
        k = next((i for i in range(r, rows) if M[i, c]), None)
        if k is None:
            continue
        M[[r, k]] = M[[k, r]]
        M[r] = (M[r] * pow(int(M[r, c]), p - 2, p)) % p
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        piv.append(c)
        r += 1
    return M[:r], piv


def rank_plain(M, p):
    return _rref_plain(M, p)[0].shape[0]


def concrete_bimodule(bc, g):
    """``(basis, left actions, right actions)`` for a generator of the 2-category."""
    B = bc.concrete_basis(g)
    L = [bc.act_left(g, a) for a in range(bc.n)]
    R = [bc.act_right(g, a) for a in range(bc.n)]
    return B, L, R


# random morphisms


def random_morphism(X, Y, rng, degree=None):
    """A random homogeneous morphism ``X -> Y``; ``None`` if the degree is empty."""
    from pdgcat.twisted import HomSpace

    H = HomSpace(X, Y)
    degs = H.present_degrees()
    if degree is None:
        if not degs:
            return None
        degree = int(rng.choice(degs))
    idx = H.degree_indices(degree)
    v = np.zeros(H.dim, dtype=np.int64)
    if idx:
        v[idx] = rng.integers(0, X.A.p, size=len(idx))
    return H.from_coords(v, degree)


def random_cycle(X, Y, rng, degree=0):
    """A random closed morphism of the given degree (possibly zero)."""
    from pdgcat.twisted import HomSpace

    H = HomSpace(X, Y)
    Z = H.cycles(degree)
    if Z.shape[0] == 0:
        return H.from_coords(np.zeros(H.dim, dtype=np.int64), degree)
    c = rng.integers(0, X.A.p, size=Z.shape[0])
    return H.from_coords((c @ Z) % X.A.p, degree)
