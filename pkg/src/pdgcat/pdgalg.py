"""Finite-dimensional graded p-dg algebras over F_p.

An algebra is stored through its structure constants on a homogeneous
basis: ``mul[i, j, k]`` is the coefficient of ``b_k`` in ``b_i b_j`` and
``diff[k, i]`` the coefficient of ``b_k`` in ``d(b_i)``.  The differential
has degree 2, satisfies the Leibniz rule and ``d^p = 0``.  A complete set of
orthogonal idempotents killed by ``d`` is part of the data; the idempotents
play the role of the objects of a p-dg category.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import gflin

__all__ = [
    "Violation",
    "InvalidAlgebra",
    "UnsupportedShape",
    "PdgAlgebra",
    "Piece",
    "check_algebra",
    "validate_algebra",
    "Radical",
    "radical",
    "verify_radical",
    "iso_classes",
    "center",
    "HModule",
    "InvalidModule",
    "h_decompose",
    "tensor_algebras",
    "product_algebras",
]


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    detail: str = ""

    def __str__(self):
        w = ",".join(str(x) for x in self.witness)
        return f"{self.axiom} at ({w})" + (f": {self.detail}" if self.detail else "")


class InvalidAlgebra(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations[:5]))


class UnsupportedShape(ValueError):
    pass


@dataclass(frozen=True)
class Piece:
    """A homogeneous basis of a graded subspace, in row-reduced form.

    Coordinates of a vector lying in the span are read off at ``pivots``.
    """

    basis: np.ndarray
    degrees: tuple
    pivots: tuple

    @property
    def dim(self):
        return len(self.degrees)

    def coords(self, v):
        return np.asarray(v, dtype=np.int64)[list(self.pivots)]

    def in_degree(self, d):
        return [i for i, e in enumerate(self.degrees) if e == d]


def make_piece(vectors, degrees_of_coords, p, n):
    """Row-reduce homogeneous ``vectors`` and record the degree of each row."""
    r = gflin.span_basis(vectors, p, n)
    piv = []
    degs = []
    for row in r:
        c = int(np.nonzero(row)[0][0])
        piv.append(c)
        degs.append(int(degrees_of_coords[c]))
    return Piece(r.reshape(len(piv), n), tuple(degs), tuple(piv))


class PdgAlgebra:
    """Structure constants of a p-dg algebra with an idempotent decomposition.

    The constructor stores data only; use :func:`validate_algebra` to check
    the axioms.
    """

    def __init__(self, p, labels, degrees, mul, diff, unit, idempotents,
                 declared_radical=None, name=""):
        self.p = int(p)
        self.labels = tuple(str(x) for x in labels)
        self.degrees = tuple(int(d) for d in degrees)
        n = len(self.labels)
        self.n = n
        self.mul = np.asarray(mul, dtype=np.int64).reshape(n, n, n) % self.p
        self.diff = np.asarray(diff, dtype=np.int64).reshape(n, n) % self.p
        self.unit = np.asarray(unit, dtype=np.int64).reshape(n) % self.p
        self.idempotents = [np.asarray(e, dtype=np.int64).reshape(n) % self.p for e in idempotents]
        self.declared_radical = (
            None if declared_radical is None
            else [np.asarray(v, dtype=np.int64).reshape(n) % self.p for v in declared_radical]
        )
        self.name = name
        self._cache = {}

    @classmethod
    def from_tables(cls, p, basis, mul_triples, diff_pairs, unit, idempotents,
                    declared_radical=None, name=""):
        """Build from sparse tables.

        ``basis`` is a list of ``(label, degree)``; ``mul_triples`` holds
        ``(i, j, k, c)`` and ``diff_pairs`` holds ``(i, k, c)``.
        """
        n = len(basis)
        mul = np.zeros((n, n, n), dtype=np.int64)
        for i, j, k, c in mul_triples:
            mul[i, j, k] += c
        d = np.zeros((n, n), dtype=np.int64)
        for i, k, c in diff_pairs:
            d[k, i] += c
        return cls(p, [b[0] for b in basis], [b[1] for b in basis], mul, d,
                   unit, idempotents, declared_radical, name)

    # element arithmetic

    @property
    def dim(self):
        return self.n

    @property
    def r(self):
        return len(self.idempotents)

    def zero(self):
        return np.zeros(self.n, dtype=np.int64)

    def basis_vector(self, i):
        v = self.zero()
        v[i] = 1
        return v

    def mult(self, a, b):
        return np.einsum("i,j,ijk->k", a, b, self.mul) % self.p

    def d(self, a):
        return (self.diff @ a) % self.p

    def left_matrix(self, a):
        """Matrix of ``x -> a x``."""
        return np.einsum("i,ijk->kj", a, self.mul) % self.p

    def right_matrix(self, b):
        """Matrix of ``x -> x b``."""
        return np.einsum("j,ijk->ki", b, self.mul) % self.p

    def degree_of(self, v):
        """Degree of a nonzero homogeneous vector, ``None`` for zero."""
        nz = np.nonzero(np.asarray(v) % self.p)[0]
        if nz.size == 0:
            return None
        degs = {self.degrees[i] for i in nz}
        if len(degs) != 1:
            raise ValueError("element is not homogeneous")
        return degs.pop()

    def fmt(self, v):
        terms = []
        for i in np.nonzero(np.asarray(v) % self.p)[0]:
            c = int(v[i]) % self.p
            terms.append(self.labels[i] if c == 1 else f"{c}*{self.labels[i]}")
        return " + ".join(terms) if terms else "0"

    # Peirce pieces

    def piece(self, k, l):
        """Homogeneous basis of ``e_k A e_l``."""
        key = ("piece", k, l)
        if key not in self._cache:
            ek, el = self.idempotents[k], self.idempotents[l]
            m = self.right_matrix(el) @ self.left_matrix(ek) % self.p
            self._cache[key] = make_piece(m.T, self.degrees, self.p, self.n)
        return self._cache[key]

    def piece_graded_dim(self, k, l):
        out = {}
        for d in self.piece(k, l).degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def blocks(self):
        """Partition of idempotent indices into blocks linked by nonzero pieces."""
        if "blocks" not in self._cache:
            parent = list(range(self.r))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for k in range(self.r):
                for l in range(self.r):
                    if k != l and self.piece(k, l).dim:
                        parent[find(k)] = find(l)
            groups = {}
            for k in range(self.r):
                groups.setdefault(find(k), []).append(k)
            self._cache["blocks"] = sorted(groups.values())
        return self._cache["blocks"]

    def block_of(self, k):
        for b, members in enumerate(self.blocks()):
            if k in members:
                return b
        raise IndexError(k)

    def block_unit(self, b):
        out = self.zero()
        for k in self.blocks()[b]:
            out = (out + self.idempotents[k]) % self.p
        return out

    def opposite(self):
        """``A^op``; cached so twisted objects over it compare equal."""
        if "opposite" not in self._cache:
            mul = np.transpose(self.mul, (1, 0, 2))
            self._cache["opposite"] = PdgAlgebra(
                self.p, self.labels, self.degrees, mul, self.diff, self.unit,
                self.idempotents, self.declared_radical,
                name=(self.name + "^op") if self.name else "")
        return self._cache["opposite"]

    def diff_power(self, k):
        return gflin.matpow(self.diff, k, self.p)

    def __repr__(self):
        return f"PdgAlgebra({self.name or 'unnamed'}, p={self.p}, dim={self.n}, r={self.r})"


def check_algebra(A):
    """All axiom violations of ``A``, each with a witness."""
    p, n = A.p, A.n
    out = []
    degs = np.array(A.degrees)
    for i, j, k in zip(*np.nonzero(A.mul)):
        if degs[k] != degs[i] + degs[j]:
            out.append(Violation("grading", (int(i), int(j), int(k)),
                                 f"deg {A.labels[i]}*{A.labels[j]} has a term {A.labels[k]}"))
    for k, i in zip(*np.nonzero(A.diff)):
        if degs[k] != degs[i] + 2:
            out.append(Violation("grading", (int(i), int(k)),
                                 f"d({A.labels[i]}) has a term {A.labels[k]} of the wrong degree"))
    # associativity
    left = np.einsum("ijm,mkr->ijkr", A.mul, A.mul) % p
    right = np.einsum("jkm,imr->ijkr", A.mul, A.mul) % p
    bad = np.argwhere((left - right) % p)
    seen = set()
    for i, j, k, _ in bad:
        if (i, j, k) not in seen:
            seen.add((i, j, k))
            out.append(Violation("associativity", (int(i), int(j), int(k))))
    # unit
    eye = np.eye(n, dtype=np.int64)
    for i in range(n):
        if np.any((A.mult(A.unit, eye[i]) - eye[i]) % p) or np.any((A.mult(eye[i], A.unit) - eye[i]) % p):
            out.append(Violation("unit", (i,)))
    # Leibniz
    dprod = np.einsum("ijm,km->ijk", A.mul, A.diff)
    t1 = np.einsum("ai,ajk->ijk", A.diff, A.mul)
    t2 = np.einsum("bj,ibk->ijk", A.diff, A.mul)
    bad = np.argwhere((dprod - t1 - t2) % p)
    seen = set()
    for i, j, _ in bad:
        if (i, j) not in seen:
            seen.add((i, j))
            out.append(Violation("leibniz", (int(i), int(j)),
                                 f"d({A.labels[i]}*{A.labels[j]})"))
    dp = A.diff_power(p)
    if np.any(dp):
        col = int(np.argwhere(dp)[0][1])
        out.append(Violation("nilpotency", (col,), f"d^{p}({A.labels[col]}) != 0"))
    # idempotents
    es = A.idempotents
    total = A.zero()
    for a, e in enumerate(es):
        total = (total + e) % p
        if np.any(A.d(e)):
            out.append(Violation("idempotent-closed", (a,), "d(e) != 0"))
        try:
            homogeneous = A.degree_of(e) in (0, None)
        except ValueError:
            homogeneous = False
        if not homogeneous:
            out.append(Violation("idempotent-degree", (a,)))
        for b, f in enumerate(es):
            want = e if a == b else A.zero()
            if np.any((A.mult(e, f) - want) % p):
                out.append(Violation("idempotent-orthogonality", (a, b)))
    if es and np.any((total - A.unit) % p):
        out.append(Violation("idempotent-sum", tuple(range(len(es)))))
    if not es:
        out.append(Violation("idempotent-sum", (), "no idempotents declared"))
    return out


def validate_algebra(A):
    """Return ``A`` if it satisfies every axiom, else raise :class:`InvalidAlgebra`."""
    bad = check_algebra(A)
    if bad:
        raise InvalidAlgebra(bad)
    return A


def center(A):
    """Basis (rows) of the center ``Z(A)``."""
    rows = [(A.left_matrix(A.basis_vector(i)) - A.right_matrix(A.basis_vector(i))) % A.p
            for i in range(A.n)]
    return gflin.kernel(np.vstack(rows), A.p, A.n)


# radical


@dataclass
class Radical:
    basis: np.ndarray
    diff_stable: bool
    witness: object = None

    @property
    def dim(self):
        return self.basis.shape[0]


def _local_radical(A, k):
    """Radical of the local piece ``e_k A e_k`` by eigenvalue search."""
    pc = A.piece(k, k)
    e = A.idempotents[k]
    dim = pc.dim
    out = []
    for row in pc.basis:
        found = None
        for c in range(A.p):
            a = (row - c * e) % A.p
            x = a.copy()
            for _ in range(dim):
                x = A.mult(x, a)
            if not np.any(x):
                found = a
                break
        if found is None:
            raise UnsupportedShape(
                f"e_{k} A e_{k} is not split local: no scalar makes {A.fmt(row)} nilpotent")
        out.append(found)
    rad = gflin.span_basis(np.array(out), A.p, A.n) if out else np.zeros((0, A.n), dtype=np.int64)
    if rad.shape[0] != dim - 1:
        raise UnsupportedShape(f"e_{k} A e_{k} is not local")
    return rad


def radical(A):
    """Jacobson radical of ``A`` together with its ``d``-stability.

    Uses the declared radical when present (after verification); otherwise
    each idempotent corner must be split local.  Off-diagonal parts are cut
    out by ``x in e_k J e_l`` iff ``x e_l A e_k`` lies in ``rad(e_k A e_k)``.
    """
    p = A.p
    if A.declared_radical is not None:
        basis = gflin.span_basis(np.array(A.declared_radical).reshape(-1, A.n), p, A.n)
        problem = verify_radical(A, basis)
        if problem is not None:
            raise InvalidAlgebra([problem])
    else:
        local = [_local_radical(A, k) for k in range(A.r)]
        parts = []
        for k in range(A.r):
            for l in range(A.r):
                pkl = A.piece(k, l)
                if pkl.dim == 0:
                    continue
                if k == l:
                    parts.append(local[k])
                    continue
                plk = A.piece(l, k)
                # coefficient constraints: for each y in e_l A e_k, x*y must lie in rad(e_k A e_k)
                rad_k = local[k]
                pk = A.piece(k, k)
                # linear functional killing rad_k inside e_k A e_k
                if pk.dim:
                    coords_rad = np.array([pk.coords(v) for v in rad_k]).reshape(-1, pk.dim)
                    annih = gflin.kernel(coords_rad, p, pk.dim)
                else:
                    annih = np.zeros((0, 0), dtype=np.int64)
                cons = []
                for y in plk.basis:
                    prod = np.array([pk.coords(A.mult(x, y)) for x in pkl.basis]).T
                    cons.append((annih @ prod) % p)
                if cons:
                    m = np.vstack(cons)
                    sol = gflin.kernel(m, p, pkl.dim)
                else:
                    sol = np.eye(pkl.dim, dtype=np.int64)
                if sol.shape[0]:
                    parts.append((sol @ pkl.basis) % p)
        basis = (gflin.span_basis(np.vstack(parts), p, A.n) if parts
                 else np.zeros((0, A.n), dtype=np.int64))
    witness = None
    stable = True
    for v in basis:
        dv = A.d(v)
        if not gflin.in_span(basis, dv, p):
            stable = False
            witness = v
            break
    return Radical(basis, stable, witness)


def verify_radical(A, basis):
    """``None`` when ``basis`` spans the radical, else the first failed check."""
    p = A.p
    basis = np.asarray(basis, dtype=np.int64).reshape(-1, A.n)
    eye = np.eye(A.n, dtype=np.int64)
    for a, v in enumerate(basis):
        for i in range(A.n):
            for prod in (A.mult(eye[i], v), A.mult(v, eye[i])):
                if not gflin.in_span(basis, prod, p):
                    return Violation("radical-ideal", (a, i), "not a two-sided ideal")
    power = basis
    for step in range(A.n + 1):
        if power.shape[0] == 0:
            break
        prods = [A.mult(x, y) for x in power for y in basis]
        power = gflin.span_basis(np.array(prods), p, A.n)
    if power.shape[0]:
        return Violation("radical-nilpotent", (), "the declared ideal is not nilpotent")
    classes = iso_classes(A)
    cls_of = {k: c for c, members in enumerate(classes) for k in members}
    for k in range(A.r):
        for l in range(A.r):
            pkl = A.piece(k, l)
            proj = [v for v in pkl.basis]
            qdim, _ = gflin.subspace_quotient(A.n, basis, proj, p)
            want = 1 if cls_of[k] == cls_of[l] else 0
            if qdim != want:
                return Violation("radical-semisimple-quotient", (k, l),
                                 f"e_{k}(A/N)e_{l} has dimension {qdim}")
    return None


# isomorphism classes of idempotents


def iso_classes(A, bound=3, declared=None):
    """Partition of idempotent indices into k-isomorphism classes.

    ``e_k ~ e_l`` iff there are degree-0 elements ``a`` in ``e_k A e_l`` and
    ``b`` in ``e_l A e_k`` with ``ab = e_k`` and ``ba = e_l``.  Pieces of degree
    0 larger than ``bound`` are refused unless a partition is ``declared``.
    """
    if declared is not None:
        return [sorted(c) for c in declared]
    p = A.p
    parent = list(range(A.r))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for k in range(A.r):
        for l in range(k + 1, A.r):
            if find(k) == find(l):
                continue
            pkl, plk = A.piece(k, l), A.piece(l, k)
            ikl, ilk = pkl.in_degree(0), plk.in_degree(0)
            if not ikl or not ilk:
                continue
            if len(ikl) > bound or len(ilk) > bound:
                raise UnsupportedShape(
                    f"degree-0 pieces between e_{k} and e_{l} exceed the search bound {bound}")
            bk, bl = pkl.basis[ikl], plk.basis[ilk]
            ek, el = A.idempotents[k], A.idempotents[l]
            hit = False
            for ca in itertools.product(range(p), repeat=len(ikl)):
                a = (np.array(ca) @ bk) % p
                if not np.any(a):
                    continue
                for cb in itertools.product(range(p), repeat=len(ilk)):
                    b = (np.array(cb) @ bl) % p
                    if (not np.any((A.mult(a, b) - ek) % p)
                            and not np.any((A.mult(b, a) - el) % p)):
                        hit = True
                        break
                if hit:
                    break
            if hit:
                parent[find(l)] = find(k)
    groups = {}
    for k in range(A.r):
        groups.setdefault(find(k), []).append(k)
    return sorted(groups.values())


# graded H-modules


class InvalidModule(ValueError):
    pass


@dataclass(frozen=True)
class HModule:
    """A graded vector space with a degree-2 operator ``action``."""

    degrees: tuple
    action: np.ndarray
    p: int

    @property
    def dim(self):
        return len(self.degrees)


def h_decompose(M):
    """Jordan type of the operator as a sorted list of ``(i, shift)``.

    Each chain of length ``i+1`` contributes ``V_i<shift>``, where the chain
    starts (its generator sits) in degree ``-shift``.
    """
    p = M.p
    D = np.asarray(M.action, dtype=np.int64) % p
    degs = list(M.degrees)
    for k, i in zip(*np.nonzero(D)):
        if degs[k] != degs[i] + 2:
            raise InvalidModule(f"operator entry ({k},{i}) is not of degree 2")
    if np.any(gflin.matpow(D, p, p)):
        raise InvalidModule("operator is not annihilated by its p-th power")
    if not degs:
        return []
    levels = sorted(set(degs))

    def rk(k, d):
        # rank of D^k from degree d to degree d+2k
        src = [i for i, e in enumerate(degs) if e == d]
        tgt = [i for i, e in enumerate(degs) if e == d + 2 * k]
        if not src or not tgt:
            return 0
        Dk = gflin.matpow(D, k, p)
        return gflin.rank(Dk[np.ix_(tgt, src)], p)

    out = []
    for d in levels:
        # n_ge[k]: chains whose generator sits in degree d and whose length exceeds k
        n_ge = [rk(k, d) - rk(k + 1, d - 2) for k in range(p + 1)]
        for k in range(p):
            exact = n_ge[k] - n_ge[k + 1]
            out.extend([(k, -d)] * exact)
    return sorted(out)


# constructions


def tensor_algebras(A, B, name=""):
    """``A (x) B`` with the Leibniz differential and idempotents ``e_i (x) f_j``."""
    if A.p != B.p:
        raise ValueError("algebras over different primes")
    p = A.p
    n = A.n * B.n
    labels = [f"{a}|{b}" for a in A.labels for b in B.labels]
    degrees = [da + db for da in A.degrees for db in B.degrees]
    mul = np.einsum("ijk,abc->iajbkc", A.mul, B.mul).reshape(n, n, n) % p
    diff = (np.kron(A.diff, np.eye(B.n, dtype=np.int64))
            + np.kron(np.eye(A.n, dtype=np.int64), B.diff)) % p
    unit = np.kron(A.unit, B.unit) % p
    idem = [np.kron(e, f) % p for e in A.idempotents for f in B.idempotents]
    return PdgAlgebra(p, labels, degrees, mul, diff, unit, idem, name=name)


def product_algebras(algebras, name=""):
    """Direct product; the idempotents of the factors are concatenated."""
    p = algebras[0].p
    n = sum(A.n for A in algebras)
    mul = np.zeros((n, n, n), dtype=np.int64)
    diff = np.zeros((n, n), dtype=np.int64)
    unit = np.zeros(n, dtype=np.int64)
    labels, degrees, idem = [], [], []
    off = 0
    for t, A in enumerate(algebras):
        sl = slice(off, off + A.n)
        mul[sl, sl, sl] = A.mul
        diff[sl, sl] = A.diff
        unit[sl] = A.unit
        labels += [f"{lab}@{t}" for lab in A.labels]
        degrees += list(A.degrees)
        for e in A.idempotents:
            v = np.zeros(n, dtype=np.int64)
            v[sl] = e
            idem.append(v)
        off += A.n
    return PdgAlgebra(p, labels, degrees, mul, diff, unit, idem, name=name)
