"""JSON algebra files.

Elements are written as ``{label: coefficient}`` maps.  Structure constants
are sparse: ``mul`` holds ``[a, b, c, k]`` meaning ``a b`` has coefficient
``k`` on ``c`` and ``diff`` holds ``[a, c, k]`` meaning ``d(a)`` has
coefficient ``k`` on ``c``.  All integers are reduced mod ``p`` on load.
Row, column and idempotent indices in objects are 1-based.
See ``docs/file-format.md`` for the full schema.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .bicat import Gen, OneMorphism
from .pdgalg import PdgAlgebra
from .twisted import TwistedMorphism, TwistedObject

__all__ = [
    "FileFormatError",
    "AlgebraFile",
    "OneMorphismSpec",
    "load",
    "loads",
    "read_path",
    "from_dict",
    "to_dict",
    "dumps",
    "elem_to_dict",
    "elem_from_dict",
]


class FileFormatError(ValueError):
    pass


@dataclass
class OneMorphismSpec:
    """A named twisted 1-morphism as written in a file (0-based internally)."""

    source: int
    target: int
    summands: list  # [(Gen, shift)]
    twist: list  # [(row, col, image)] with 0-based row, col

    def build(self, bc):
        cat = bc.hom(self.source, self.target)
        gens = []
        for g, s in self.summands:
            if g not in cat.index:
                raise FileFormatError(f"{g} is not a 1-morphism from {self.source + 1} "
                                      f"to {self.target + 1}")
            gens.append((cat.index[g], s))
        size = len(gens)
        alpha = np.zeros((size, size, cat.E.n), dtype=np.int64)
        for r, c, img in self.twist:
            k, l = gens[r][0], gens[c][0]
            try:
                alpha[r, c] = cat.element(k, l, img)
            except ValueError as exc:
                raise FileFormatError(f"twist entry ({r + 1},{c + 1}): {exc}") from None
        return OneMorphism(cat, TwistedObject(cat.E, gens, alpha,
                                              keys=[((m,), ()) for m in range(size)]))


@dataclass
class AlgebraFile:
    algebra: PdgAlgebra
    objects: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)  # name -> (source, target, TwistedMorphism)
    one_morphisms: dict = field(default_factory=dict)


def elem_to_dict(A, v):
    v = np.asarray(v) % A.p
    return {A.labels[i]: int(v[i]) for i in np.nonzero(v)[0]}


def elem_from_dict(A, d, where, index):
    if not isinstance(d, dict):
        raise FileFormatError(f"{where}: expected an element as {{label: coefficient}}")
    v = np.zeros(A.n, dtype=np.int64)
    for lab, c in d.items():
        if lab not in index:
            raise FileFormatError(f"{where}: unknown basis label {lab!r}")
        v[index[lab]] = _int(c, where) % A.p
    return v


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise FileFormatError(f"{where}: expected an integer, got {x!r}")
    return x


def _get(d, key, where, kind=None, default=...):
    if key not in d:
        if default is ...:
            raise FileFormatError(f"{where}: missing field {key!r}")
        return default
    val = d[key]
    if kind is not None and not isinstance(val, kind):
        raise FileFormatError(f"{where}.{key}: wrong type {type(val).__name__}")
    return val


def _gen_from_text(s, where):
    from .expr import ExprSyntaxError, Id, Proj, Shift, parse_expr

    try:
        e = parse_expr(s)
    except ExprSyntaxError as exc:
        raise FileFormatError(f"{where}: {exc}") from None
    shift = 0
    if isinstance(e, Shift):
        shift, e = e.n, e.inner
    if isinstance(e, Id):
        return Gen("id", e.i - 1), shift
    if isinstance(e, Proj):
        return Gen("proj", e.s - 1, e.t - 1), shift
    raise FileFormatError(f"{where}: summand must be Id(i) or P(s,t) with an optional <n>")


def _gen_to_text(g, s):
    return f"{g.label()}<{s}>" if s else g.label()


def from_dict(d):
    if not isinstance(d, dict):
        raise FileFormatError("top level must be an object")
    p = _int(_get(d, "p", "file"), "p")
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise FileFormatError(f"p={p} is not prime")
    basis = _get(d, "basis", "file", list)
    labels, degrees = [], []
    for k, b in enumerate(basis):
        if not (isinstance(b, list) and len(b) == 2 and isinstance(b[0], str)):
            raise FileFormatError(f"basis[{k}]: expected [label, degree]")
        labels.append(b[0])
        degrees.append(_int(b[1], f"basis[{k}]"))
    if len(set(labels)) != len(labels):
        raise FileFormatError("basis labels must be distinct")
    n = len(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    mul = np.zeros((n, n, n), dtype=np.int64)
    for k, row in enumerate(_get(d, "mul", "file", list)):
        if not (isinstance(row, list) and len(row) == 4):
            raise FileFormatError(f"mul[{k}]: expected [a, b, c, coefficient]")
        a, b, c = (_lab(x, index, f"mul[{k}]") for x in row[:3])
        mul[a, b, c] = (mul[a, b, c] + _int(row[3], f"mul[{k}]")) % p
    diff = np.zeros((n, n), dtype=np.int64)
    for k, row in enumerate(_get(d, "diff", "file", list, [])):
        if not (isinstance(row, list) and len(row) == 3):
            raise FileFormatError(f"diff[{k}]: expected [a, c, coefficient]")
        a, c = (_lab(x, index, f"diff[{k}]") for x in row[:2])
        diff[c, a] = (diff[c, a] + _int(row[2], f"diff[{k}]")) % p
    shell = PdgAlgebra(p, labels, degrees, mul, diff, np.zeros(n, dtype=np.int64), [])
    unit = elem_from_dict(shell, _get(d, "unit", "file"), "unit", index)
    idem = [elem_from_dict(shell, e, f"idempotents[{k}]", index)
            for k, e in enumerate(_get(d, "idempotents", "file", list))]
    rad = d.get("radical")
    declared = None
    if rad is not None:
        declared = [elem_from_dict(shell, e, f"radical[{k}]", index) for k, e in enumerate(rad)]
        declared = np.array(declared, dtype=np.int64).reshape(-1, n)
    A = PdgAlgebra(p, labels, degrees, mul, diff, unit, idem, declared,
                   name=d.get("name", ""))
    out = AlgebraFile(A)
    r = len(idem)
    for name, od in _get(d, "objects", "file", dict, {}).items():
        where = f"objects.{name}"
        gens = []
        for k, g in enumerate(_get(od, "generators", where, list)):
            if not (isinstance(g, list) and len(g) == 2):
                raise FileFormatError(f"{where}.generators[{k}]: expected [idempotent, shift]")
            i = _int(g[0], where)
            if not 1 <= i <= r:
                raise FileFormatError(f"{where}: idempotent {i} out of range 1..{r}")
            gens.append((i - 1, _int(g[1], where)))
        alpha = np.zeros((len(gens), len(gens), n), dtype=np.int64)
        for k, ent in enumerate(_get(od, "twist", where, list, [])):
            rr, cc = _rc(ent, len(gens), f"{where}.twist[{k}]")
            alpha[rr, cc] = elem_from_dict(A, _get(ent, "value", where), where, index)
        out.objects[name] = TwistedObject(A, gens, alpha)
    for name, md in _get(d, "morphisms", "file", dict, {}).items():
        where = f"morphisms.{name}"
        src, tgt = _get(md, "source", where, str), _get(md, "target", where, str)
        for o in (src, tgt):
            if o not in out.objects:
                raise FileFormatError(f"{where}: unknown object {o!r}")
        X, Y = out.objects[src], out.objects[tgt]
        ent = np.zeros((Y.size, X.size, n), dtype=np.int64)
        for k, e in enumerate(_get(md, "entries", where, list, [])):
            rr, cc = _rc(e, Y.size, f"{where}.entries[{k}]", X.size)
            ent[rr, cc] = elem_from_dict(A, _get(e, "value", where), where, index)
        deg = _int(_get(md, "degree", where, default=0), where)
        out.morphisms[name] = (src, tgt, TwistedMorphism(X, Y, ent, deg))
    for name, md in _get(d, "one_morphisms", "file", dict, {}).items():
        where = f"one_morphisms.{name}"
        src = _int(_get(md, "source", where), where) - 1
        tgt = _int(_get(md, "target", where), where) - 1
        summ = [_gen_from_text(s, where) for s in _get(md, "summands", where, list)]
        twist = []
        for k, e in enumerate(_get(md, "twist", where, list, [])):
            rr, cc = _rc(e, len(summ), f"{where}.twist[{k}]")
            tg = summ[rr][0]
            img = _get(e, "image", where)
            if tg.kind == "id":
                twist.append((rr, cc, elem_from_dict(A, img, where, index)))
            else:
                T = np.zeros((n, n), dtype=np.int64)
                for tri in img:
                    if not (isinstance(tri, list) and len(tri) == 3):
                        raise FileFormatError(f"{where}: tensor image needs [left, right, coeff]")
                    T[_lab(tri[0], index, where), _lab(tri[1], index, where)] += _int(tri[2], where)
                twist.append((rr, cc, T.reshape(-1) % p))
        out.one_morphisms[name] = OneMorphismSpec(src, tgt, summ, twist)
    return out


def _lab(x, index, where):
    if not isinstance(x, str) or x not in index:
        raise FileFormatError(f"{where}: unknown basis label {x!r}")
    return index[x]


def _rc(ent, rows, where, cols=None):
    cols = rows if cols is None else cols
    if not isinstance(ent, dict):
        raise FileFormatError(f"{where}: expected an object with row, col")
    r = _int(_get(ent, "row", where), where)
    c = _int(_get(ent, "col", where), where)
    if not (1 <= r <= rows and 1 <= c <= cols):
        raise FileFormatError(f"{where}: index ({r},{c}) out of range")
    return r - 1, c - 1


def to_dict(f):
    A = f.algebra
    n = A.n
    d = {"p": A.p}
    if A.name:
        d["name"] = A.name
    d["basis"] = [[lab, int(deg)] for lab, deg in zip(A.labels, A.degrees)]
    d["unit"] = elem_to_dict(A, A.unit)
    d["idempotents"] = [elem_to_dict(A, e) for e in A.idempotents]
    d["mul"] = [[A.labels[a], A.labels[b], A.labels[c], int(A.mul[a, b, c])]
                for a, b, c in zip(*np.nonzero(A.mul))]
    d["diff"] = [[A.labels[a], A.labels[c], int(A.diff[c, a])]
                 for c, a in sorted(zip(*np.nonzero(A.diff)), key=lambda t: (t[1], t[0]))]
    if A.declared_radical is not None:
        d["radical"] = [elem_to_dict(A, v) for v in np.asarray(A.declared_radical).reshape(-1, n)]
    if f.objects:
        d["objects"] = {}
        for name, X in f.objects.items():
            tw = [{"row": int(r) + 1, "col": int(c) + 1, "value": elem_to_dict(A, X.alpha[r, c])}
                  for r, c in zip(*np.nonzero(np.any(X.alpha, axis=2)))]
            od = {"generators": [[int(i) + 1, int(s)] for i, s in X.gens]}
            if tw:
                od["twist"] = tw
            d["objects"][name] = od
    if f.morphisms:
        d["morphisms"] = {}
        for name, (src, tgt, g) in f.morphisms.items():
            ent = [{"row": int(r) + 1, "col": int(c) + 1, "value": elem_to_dict(A, g.entries[r, c])}
                   for r, c in zip(*np.nonzero(np.any(g.entries, axis=2)))]
            d["morphisms"][name] = {"source": src, "target": tgt, "degree": int(g.degree),
                                    "entries": ent}
    if f.one_morphisms:
        d["one_morphisms"] = {}
        for name, sp in f.one_morphisms.items():
            tw = []
            for r, c, img in sp.twist:
                if sp.summands[r][0].kind == "id":
                    im = elem_to_dict(A, img)
                else:
                    T = np.asarray(img).reshape(n, n) % A.p
                    im = [[A.labels[a], A.labels[b], int(T[a, b])] for a, b in zip(*np.nonzero(T))]
                tw.append({"row": r + 1, "col": c + 1, "image": im})
            md = {"source": sp.source + 1, "target": sp.target + 1,
                  "summands": [_gen_to_text(g, s) for g, s in sp.summands]}
            if tw:
                md["twist"] = tw
            d["one_morphisms"][name] = md
    return d


def _compact(x, ind=0):
    # lists of scalars and small element maps stay on one line
    pad = " " * ind
    if isinstance(x, dict):
        if not x:
            return "{}"
        if all(not isinstance(v, (dict, list)) for v in x.values()) and len(x) <= 6:
            return json.dumps(x)
        items = [f'{pad} {json.dumps(k)}: {_compact(v, ind + 1)}' for k, v in x.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(x, list):
        if all(not isinstance(v, (dict, list)) for v in x):
            return json.dumps(x)
        if all(isinstance(v, list) and all(not isinstance(w, (dict, list)) for w in v) for v in x) \
                or all(isinstance(v, dict) and all(not isinstance(w, (dict, list)) for w in v.values())
                       for v in x):
            return "[\n" + ",\n".join(f"{pad} {json.dumps(v)}" for v in x) + f"\n{pad}]"
        return "[\n" + ",\n".join(f"{pad} {_compact(v, ind + 1)}" for v in x) + f"\n{pad}]"
    return json.dumps(x)


def dumps(f):
    return _compact(to_dict(f))


def loads(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"not valid JSON: {exc}") from None
    return from_dict(d)


def read_path(path):
    """Read an algebra file; ``-`` means standard input."""
    if path == "-":
        return loads(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc.strerror}") from None


load = read_path
