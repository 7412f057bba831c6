"""Built-in example algebras."""
from __future__ import annotations

import numpy as np

from .pdgalg import PdgAlgebra, product_algebras, tensor_algebras

__all__ = [
    "truncated_polynomial",
    "kx",
    "kx_paper_variant",
    "semisimple",
    "coinvariant",
    "matrix_algebra",
    "kx_squared",
    "builtin_example",
    "EXAMPLE_NAMES",
]

EXAMPLE_NAMES = ("kx", "kx-paper-variant", "semisimple", "coinvariant")


def truncated_polynomial(p, n, deg_x, diff, name=""):
    """``k[x]/(x^n)`` with ``deg x = deg_x`` and ``d(x^j) = j x^{j-1} d(x)``.

    ``diff`` maps the exponent of ``d(x)``: ``2`` for ``d(x) = x^2``, ``0`` for
    ``d(x) = 1`` and ``None`` for the zero differential.
    """
    basis = [("1" if j == 0 else ("x" if j == 1 else f"x^{j}"), j * deg_x) for j in range(n)]
    mul = [(i, j, i + j, 1) for i in range(n) for j in range(n) if i + j < n]
    d = []
    if diff is not None:
        for j in range(1, n):
            k = j - 1 + diff
            if 0 <= k < n and j % p:
                d.append((j, k, j % p))
    unit = np.eye(n, dtype=np.int64)[0]
    return PdgAlgebra.from_tables(p, basis, mul, d, unit, [unit], name=name)


def kx(p=3, n=3, diff="xsq"):
    if not 1 <= n <= p:
        raise ValueError(f"need 1 <= n <= p, got n={n}, p={p}")
    if diff not in ("xsq", "zero"):
        raise ValueError(f"unknown differential {diff!r}")
    return truncated_polynomial(p, n, 2, 2 if diff == "xsq" else None,
                                name=f"k[x]/(x^{n})")


def kx_paper_variant(p=3, n=None):
    """``k[x]/(x^p)`` with ``deg x = -2`` and ``d(x) = 1``; only ``n = p`` is consistent."""
    n = p if n is None else n
    if n != p:
        raise ValueError("d(x) = 1 forces n = p, since d(x^n) = n x^(n-1) must vanish")
    return truncated_polynomial(p, n, -2, 0, name=f"k[x]/(x^{n}), d(x)=1")


def semisimple(p=3, r=2):
    if r < 1:
        raise ValueError("r must be positive")
    n = r
    mul = [(i, i, i, 1) for i in range(n)]
    eye = np.eye(n, dtype=np.int64)
    return PdgAlgebra.from_tables(p, [(f"e{i + 1}", 0) for i in range(n)], mul, [],
                                  eye.sum(axis=0), list(eye), name=f"F_{p}^{r}")


def coinvariant(p=3, lam=2):
    """Product of the small coinvariant pieces for weight ``lam``.

    The outer factors are ``F_p`` and the next ones ``k[x]/(x^lam)`` with
    ``d(x) = x^2``.  Weights needing the middle pieces are refused.
    """
    if lam < 1:
        raise ValueError("lambda must be positive")
    if lam > 2:
        raise ValueError(
            f"lambda={lam} needs coinvariant pieces with 2 <= j <= lambda-2 or a user file")
    pieces = []
    for j in range(lam + 1):
        if j in (0, lam):
            pieces.append(truncated_polynomial(p, 1, 2, None))
        else:
            pieces.append(truncated_polynomial(p, lam, 2, 2))
    return product_algebras(pieces, name=f"coinvariant(lambda={lam})")


def matrix_algebra(p=3, n=2):
    """``M_n(F_p)`` in degree 0 with zero differential and the diagonal idempotents."""
    labels = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    idx = {(i, j): i * n + j for i in range(n) for j in range(n)}
    mul = [(idx[i, j], idx[j, k], idx[i, k], 1)
           for i in range(n) for j in range(n) for k in range(n)]
    eye = np.eye(n * n, dtype=np.int64)
    idem = [eye[idx[i, i]] for i in range(n)]
    return PdgAlgebra.from_tables(p, [(l, 0) for l in labels], mul, [],
                                  sum(idem) % p, idem, name=f"M_{n}(F_{p})")


def kx_squared(p=3, n=3):
    """``K (x) K`` for ``K = kx(p, n)``."""
    K = kx(p, n)
    return tensor_algebras(K, K, name="K(x)K")


def builtin_example(name, p=3, n=3, diff="xsq", r=2, lam=2):
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"p={p} is not prime")
    if name == "kx":
        return kx(p, n, diff)
    if name == "kx-paper-variant":
        return kx_paper_variant(p)
    if name == "semisimple":
        return semisimple(p, r)
    if name == "coinvariant":
        return coinvariant(p, lam)
    raise ValueError(f"unknown example {name!r}; choose from {', '.join(EXAMPLE_NAMES)}")
