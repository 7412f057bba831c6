"""Command-line entry point.

Exit codes: 0 success, 1 a domain error or reported violation, 2 a usage
error (bad flags, unreadable file, syntax error in an expression).
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import builtin
from .bicat import (
    BiCategory,
    IdentityCellAmbiguity,
    ObjectMismatch,
    compute_cells,
    stable_two_hom,
    strong_regularity,
    two_hom,
)
from .cellrep import (
    AssumptionViolation,
    build_cell_rep,
    compare_with_natural,
    identity_cell_quotient,
    maximality_check,
)
from .expr import ExprSyntaxError, evaluate
from .fileformat import AlgebraFile, FileFormatError, dumps, read_path
from .filtration import canonical_filtration, verify_fantastic
from .homotopy import NotACycle, cone, stable_homs
from .pdgalg import UnsupportedShape, check_algebra, radical
from .report import qpoly
from .twisted import check_twisted, tensor_h

__all__ = ["main", "run_command", "UsageError", "DomainError"]


class UsageError(Exception):
    pass


class DomainError(Exception):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


_INDEXED = {"grading", "associativity", "unit", "leibniz", "nilpotency"}


def describe_violation(A, v):
    if v.axiom in _INDEXED:
        w = ", ".join(A.labels[i] for i in v.witness)
    else:
        w = ", ".join(str(i + 1) for i in v.witness)
    return f"{v.axiom} at ({w})" + (f": {v.detail}" if v.detail else "")


def _graded(degrees):
    out = {}
    for d in degrees:
        out[int(d)] = out.get(int(d), 0) + 1
    return out


def _load(path, need_valid=True):
    try:
        f = read_path(path)
    except FileFormatError as exc:
        raise UsageError(str(exc)) from None
    if need_valid:
        bad = check_algebra(f.algebra)
        if bad:
            raise DomainError("algebra fails the axioms: "
                              + "; ".join(describe_violation(f.algebra, v) for v in bad[:5]),
                              {"violations": [describe_violation(f.algebra, v) for v in bad]})
    return f


def _one_morphisms(f, bc):
    out = {}
    for name, sp in f.one_morphisms.items():
        try:
            out[name] = sp.build(bc)
        except FileFormatError as exc:
            raise UsageError(f"1-morphism {name}: {exc}") from None
    return out


def _expr(text, bc, names):
    try:
        return evaluate(text, bc, names)
    except ExprSyntaxError as exc:
        raise UsageError(str(exc)) from None
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _named_object(f, name):
    if name not in f.objects:
        raise UsageError(f"unknown object {name!r}; the file defines "
                         f"{', '.join(f.objects) or 'none'}")
    return f.objects[name]


# commands


def cmd_validate(args):
    f = _load(args.file, need_valid=False)
    A = f.algebra
    rep = {"algebra": A.name, "p": A.p, "dim": A.n, "idempotents": A.r,
           "graded_dim": qpoly(_graded(A.degrees))}
    lines = [f"algebra {A.name or '(unnamed)'}: p={A.p}, dimension {A.n}, "
             f"{A.r} idempotent(s), graded dimension {qpoly(_graded(A.degrees))}"]
    bad = [describe_violation(A, v) for v in check_algebra(A)]
    rep["violations"] = bad
    failed = bool(bad)
    lines += [f"violation: {b}" for b in bad] or ["axioms: ok"]
    if not bad:
        for name, X in f.objects.items():
            vs = [str(v) for v in check_twisted(X)]
            rep.setdefault("objects", {})[name] = vs
            lines.append(f"object {name}: " + ("ok" if not vs else "; ".join(vs)))
            failed |= bool(vs)
        for name, (_, _, g) in f.morphisms.items():
            vs = [str(v) for v in g.check()]
            rep.setdefault("morphisms", {})[name] = vs
            lines.append(f"morphism {name}: " + ("ok" if not vs else "; ".join(vs)))
            failed |= bool(vs)
        if f.one_morphisms:
            bc = BiCategory(A)
            for name, M in _one_morphisms(f, bc).items():
                vs = [str(v) for v in check_twisted(M.obj)]
                rep.setdefault("one_morphisms", {})[name] = vs
                lines.append(f"1-morphism {name}: " + ("ok" if not vs else "; ".join(vs)))
                failed |= bool(vs)
    return (1 if failed else 0), lines, rep


def cmd_radical(args):
    f = _load(args.file)
    A = f.algebra
    try:
        R = radical(A)
    except UnsupportedShape as exc:
        raise DomainError(str(exc)) from None
    elems = [A.fmt(v) for v in R.basis]
    lines = [f"radical dimension {R.dim}", *[f"  {e}" for e in elems]]
    if R.diff_stable:
        lines.append("closed under d: yes")
    else:
        lines.append(f"closed under d: no, d({A.fmt(R.witness)}) = {A.fmt(A.d(R.witness))}")
    rep = {"dim": R.dim, "basis": elems, "diff_stable": R.diff_stable}
    return 0, lines, rep


def cmd_cells(args):
    f = _load(args.file)
    A = f.algebra
    try:
        cs = compute_cells(A)
    except IdentityCellAmbiguity as exc:
        raise DomainError(str(exc)) from None
    except UnsupportedShape as exc:
        raise DomainError(str(exc)) from None
    lab = [g.label() for g in cs.indecomposables]

    def cells(c):
        return ["{" + ", ".join(lab[k] for k in cell) + "}" for cell in c]

    order = sorted((cells(cs.two_sided_cells)[a], cells(cs.two_sided_cells)[b])
                   for a, b in cs.two_sided_order())
    reg = strong_regularity(cs)
    lines = [f"objects: {len(A.blocks())}",
             f"indecomposables (up to shift): {', '.join(lab)}"]
    for k, v in cs.identifications.items():
        lines.append(f"  {k} is isomorphic to {v}")
    lines += [f"left cells: {' '.join(cells(cs.left_cells))}",
              f"right cells: {' '.join(cells(cs.right_cells))}",
              f"two-sided cells: {' '.join(cells(cs.two_sided_cells))}"]
    lines += [f"  {a} > {b}" for a, b in order]
    lines.append(f"strongly regular: {'yes' if reg else 'no'}")
    rep = {"objects": len(A.blocks()), "indecomposables": lab,
           "left_cells": cells(cs.left_cells), "right_cells": cells(cs.right_cells),
           "two_sided_cells": cells(cs.two_sided_cells),
           "two_sided_order": [list(x) for x in order], "strongly_regular": reg,
           "identifications": cs.identifications}
    return 0, lines, rep


def _parse_cell(text, A):
    t = text.strip()
    if t.startswith("Id(") and t.endswith(")"):
        return "id", _positive(t[3:-1], "--cell")
    for pre in ("P(-,", "P(*,"):
        if t.startswith(pre) and t.endswith(")"):
            t = t[len(pre):-1]
    return "proj", _positive(t, "--cell")


def _positive(s, flag):
    try:
        v = int(s)
    except ValueError:
        raise UsageError(f"{flag}: expected a positive integer, got {s!r}") from None
    if v < 1:
        raise UsageError(f"{flag}: indices start at 1")
    return v


def cmd_cellrep(args):
    f = _load(args.file)
    A = f.algebra
    bc = BiCategory(A)
    kind, k = _parse_cell(args.cell, A)
    if kind == "id":
        if k > bc.nobjects:
            raise UsageError(f"object {k} does not exist")
        dims = identity_cell_quotient(bc, k - 1)
        lines = [f"identity cell at object {k}: End quotient {qpoly(dims)}"]
        return 0, lines, {"cell": f"Id({k})", "end_quotient": qpoly(dims)}
    if k > A.r:
        raise UsageError(f"--cell {k}: only {A.r} idempotents")
    try:
        data = build_cell_rep(bc, k - 1)
    except (AssumptionViolation, UnsupportedShape) as exc:
        raise DomainError(str(exc)) from None
    report = compare_with_natural(data)
    maxi = maximality_check(data)
    lines = [f"left cell P(-,{k}) based at object {data.block + 1}"]
    for name, ok in data.checks.items():
        lines.append(f"ideal {name}: {'yes' if ok else 'NO'}")
    lines.append(f"maximality: {sum(r for *_, r in maxi)}/{len(maxi)} "
                 f"closed morphisms outside the ideal generate an identity")
    for r in report:
        lines.append(f"P({r.s + 1},{k}) -> P({r.s2 + 1},{k}): quotient {qpoly(r.quotient)}, "
                     f"natural {qpoly(r.natural)}, d {'agrees' if r.diff_ok else 'DIFFERS'}"
                     + ("" if r.bijective else ", not bijective"))
    bad = [r for r in report if not r.ok]
    ok = not bad and all(data.checks.values()) and all(r for *_, r in maxi)
    lines.append(f"mismatched pairs: {len(bad)}")
    rep = {"cell": f"P(-,{k})", "checks": data.checks,
           "maximality": [bool(r) for *_, r in maxi],
           "pairs": [{"from": f"P({r.s + 1},{k})", "to": f"P({r.s2 + 1},{k})",
                      "quotient": qpoly(r.quotient), "natural": qpoly(r.natural),
                      "diff_ok": r.diff_ok, "bijective": r.bijective} for r in report],
           "mismatched": len(bad)}
    return (0 if ok else 1), lines, rep


def _describe_2morphism(bc, M, N, f):
    A = bc.A
    cat = M.cat
    parts = []
    for (r, c) in zip(*np.nonzero(np.any(f.entries, axis=2))):
        k, l = N.obj.gens[r][0], M.obj.gens[c][0]
        img = cat.image(k, l, f.entries[r, c])
        if cat.gens[k].kind == "id":
            s = A.fmt(img)
        else:
            T = img.reshape(A.n, A.n)
            terms = []
            for a, b in zip(*np.nonzero(T)):
                co = int(T[a, b])
                co = co if co <= A.p // 2 else co - A.p
                pre = "" if co == 1 else "-" if co == -1 else f"{co}*"
                terms.append(f"{pre}{A.labels[a]}⊗{A.labels[b]}")
            s = " + ".join(terms).replace("+ -", "- ")
        parts.append(f"[{r + 1},{c + 1}] {s}" if (M.obj.size > 1 or N.obj.size > 1) else s)
    return "; ".join(parts) or "0"


def cmd_two_hom(args):
    f = _load(args.file)
    bc = BiCategory(f.algebra)
    names = _one_morphisms(f, bc)
    M = _expr(args.src, bc, names)
    N = _expr(args.tgt, bc, names)
    try:
        th = two_hom(bc, M, N)
    except ObjectMismatch as exc:
        raise DomainError(str(exc)) from None
    gd = th.graded_dim()
    lines = [f"{M} -> {N}", f"2-hom graded dimension: {qpoly(gd)}"]
    rep = {"source": str(M), "target": str(N), "graded_dim": qpoly(gd), "dim": th.hom.dim}
    if args.stable:
        st = stable_two_hom(bc, M, N)
        dims = {d: s.dim for d, s in st.items() if s.dim}
        total = sum(dims.values())
        lines.append(f"stable graded dimension: {qpoly(dims)}")
        lines.append(f"total stable dimension: {total}")
        reps = []
        for d, s in sorted(st.items()):
            for g in s.morphisms():
                txt = _describe_2morphism(bc, M, N, g)
                reps.append({"degree": d, "map": txt})
                lines.append(f"  degree {d}: {txt}")
        rep.update({"stable_graded_dim": qpoly(dims), "stable_total": total,
                    "representatives": reps})
    return 0, lines, rep


def cmd_cone(args):
    f = _load(args.file)
    if args.morphism not in f.morphisms:
        raise UsageError(f"unknown morphism {args.morphism!r}")
    _, _, g = f.morphisms[args.morphism]
    try:
        cn = cone(g)
    except NotACycle as exc:
        raise DomainError(str(exc)) from None
    from .twisted import compose, morphism_diff

    checks = {
        "d(v) = 0": morphism_diff(cn.v).is_zero(),
        "d(r) = 0": morphism_diff(cn.r).is_zero(),
        "d(u) = 0": morphism_diff(cn.u).is_zero(),
        "d(q) = 0": morphism_diff(cn.q).is_zero(),
        "r v = 0": compose(cn.r, cn.v).is_zero(),
        "q iota = 0": compose(cn.q, cn.iota).is_zero(),
        "cone valid": not check_twisted(cn.obj),
    }
    lines = ["cone: " + cn.obj.describe()]
    lines += [f"{k}: {'yes' if v else 'NO'}" for k, v in checks.items()]
    st = {d: s.dim for d, s in stable_homs(cn.obj, cn.obj).items() if s.dim}
    lines.append(f"stable End(cone): {qpoly(st)}")
    rep = {"cone": cn.obj.describe(), "checks": checks, "stable_end": qpoly(st)}
    return (0 if all(checks.values()) else 1), lines, rep


def cmd_tensor_h(args):
    f = _load(args.file)
    X = _named_object(f, args.object)
    if not 0 <= args.vi < f.algebra.p:
        raise UsageError(f"--vi must be between 0 and {f.algebra.p - 1}")
    Y = tensor_h(X, [(args.vi, args.shift)])
    bad = [str(v) for v in check_twisted(Y)]
    lines = [Y.describe(), "valid: " + ("yes" if not bad else "; ".join(bad))]
    return (1 if bad else 0), lines, {"object": Y.describe(), "violations": bad}


def cmd_fantastic(args):
    f = _load(args.file)
    if args.object in f.objects:
        X = f.objects[args.object]
        lab = lambda P: P.describe().splitlines()[0]  # noqa: E731
    elif args.object in f.one_morphisms:
        bc = BiCategory(f.algebra)
        M = _one_morphisms(f, bc)[args.object]
        X = M.obj
        lab = lambda P: " + ".join(  # noqa: E731
            f"{M.cat.gens[i]}<{s}>" if s else str(M.cat.gens[i]) for i, s in P.gens)
    else:
        raise UsageError(f"unknown object or 1-morphism {args.object!r}")
    bad = check_twisted(X)
    if bad:
        raise DomainError("object is not valid: " + "; ".join(str(v) for v in bad))
    cert = canonical_filtration(X)
    res = verify_fantastic(cert)
    lines = [f"filtration of length {len(cert.pieces)}"]
    lines += [f"  F_{k + 1}/F_{k}: {lab(P)}" for k, P in enumerate(cert.pieces)]
    lines.append("verified" if res is None else f"violated: {res}")
    rep = {"pieces": [lab(P) for P in cert.pieces], "verified": res is None,
           "violation": None if res is None else str(res)}
    return (0 if res is None else 1), lines, rep


def example_file(name, p=3, n=3, diff="xsq", r=2, lam=2):
    A = builtin.builtin_example(name, p=p, n=n, diff=diff, r=r, lam=lam)
    from .twisted import TwistedObject, identity

    f = AlgebraFile(A)
    for i in range(A.r):
        f.objects[f"X{i + 1}"] = TwistedObject(A, [(i, 0)])
    for i in range(A.r):
        X = f.objects[f"X{i + 1}"]
        f.morphisms[f"id_X{i + 1}"] = (f"X{i + 1}", f"X{i + 1}", identity(X))
    return f


def cmd_example(args):
    try:
        f = example_file(args.name, p=args.p, n=args.n, diff=args.diff, r=args.r, lam=args.lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = dumps(f)
    return 0, [text], None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    ap = argparse.ArgumentParser(prog="pdgcat",
                                 description="p-dg algebras, their 2-categories of projective "
                                             "bimodules and cell 2-representations")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate", cmd_validate, "check the algebra axioms and named objects")
    sp.add_argument("file", help="algebra file, or - for standard input")
    sp = add("radical", cmd_radical, "Jacobson radical and its closure under d")
    sp.add_argument("file")
    sp = add("cells", cmd_cells, "left, right and two-sided cells")
    sp.add_argument("file")
    sp = add("cellrep", cmd_cellrep, "cell 2-representation compared with the natural one")
    sp.add_argument("file")
    sp.add_argument("--cell", required=True, help="idempotent t of the left cell P(-,t), or Id(i)")
    sp = add("two-hom", cmd_two_hom, "2-morphism spaces between 1-morphism expressions")
    sp.add_argument("file")
    sp.add_argument("--from", dest="src", required=True)
    sp.add_argument("--to", dest="tgt", required=True)
    sp.add_argument("--stable", action="store_true", help="also compute stable 2-homs")
    sp = add("cone", cmd_cone, "cone of a named closed degree-0 morphism")
    sp.add_argument("file")
    sp.add_argument("--morphism", required=True)
    sp = add("tensor-h", cmd_tensor_h, "tensor a named object with V_i<s>")
    sp.add_argument("file")
    sp.add_argument("--object", required=True)
    sp.add_argument("--vi", type=int, required=True)
    sp.add_argument("--shift", type=int, default=0)
    sp = add("fantastic", cmd_fantastic, "canonical fantastic filtration of a named object")
    sp.add_argument("file")
    sp.add_argument("--object", required=True)
    sp = add("example", cmd_example, "print a built-in example as an algebra file")
    sp.add_argument("name", choices=builtin.EXAMPLE_NAMES)
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--diff", default="xsq", choices=("xsq", "zero"))
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--lambda", dest="lam", type=int, default=2)
    return ap


def run_command(argv, out=None, err=None):
    """Run one command; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    as_json = getattr(args, "json", False)
    try:
        code, lines, rep = args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return 2
    except (DomainError, ObjectMismatch, UnsupportedShape, NotACycle) as exc:
        if as_json:
            print(json.dumps({"error": str(exc), **(getattr(exc, "report", None) or {})},
                             indent=1), file=out)
        print(f"error: {exc}", file=err)
        return 1
    if as_json and rep is not None:
        print(json.dumps(rep, indent=1, default=_jsonable), file=out)
    else:
        for line in lines:
            print(line, file=out)
    return code


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(type(x))


def main(argv=None):
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))
