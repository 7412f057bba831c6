"""Small text helpers shared by reports."""
from __future__ import annotations


def qpoly(dims):
    """Graded dimension ``{degree: dim}`` as a polynomial in ``q``."""
    terms = []
    for d in sorted(dims):
        c = dims[d]
        if not c:
            continue
        if d == 0:
            mono = str(c)
        else:
            q = "q" if d == 1 else f"q^{d}" if d > 0 else f"q^({d})"
            mono = q if c == 1 else f"{c}{q}"
        terms.append(mono)
    return " + ".join(terms) if terms else "0"
