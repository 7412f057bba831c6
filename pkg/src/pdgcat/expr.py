"""The 1-morphism expression language.

::

    expr    := term ('+' term)*
    term    := postfix ('*' postfix)*
    postfix := atom ('<' INT '>')*
    atom    := 'Id(' INT ')' | 'P(' INT ',' INT ')' | NAME | '(' expr ')'

``*`` is horizontal composition and binds tighter than ``+``.  Indices are
1-based.  Parentheses are accepted for grouping so that every tree prints
back to a parseable string.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .bicat import Gen, ObjectMismatch, OneMorphism, hcompose
from .twisted import TwistedObject

__all__ = [
    "ExprSyntaxError",
    "Id",
    "Proj",
    "Name",
    "Shift",
    "Comp",
    "Sum",
    "parse_expr",
    "to_text",
    "evaluate",
    "direct_sum_1",
    "shift_1",
]


class ExprSyntaxError(ValueError):
    def __init__(self, msg, text, pos):
        self.msg, self.text, self.pos = msg, text, pos
        super().__init__(f"{msg} at position {pos + 1}\n  {text}\n  {' ' * pos}^")


@dataclass(frozen=True)
class Id:
    i: int


@dataclass(frozen=True)
class Proj:
    s: int
    t: int


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Shift:
    inner: object
    n: int


@dataclass(frozen=True)
class Comp:
    parts: tuple


@dataclass(frozen=True)
class Sum:
    parts: tuple


_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()<>,*+]))")


def _tokens(text):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokens(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self, kind=None, value=None, what=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = what or repr(value) if value is not None else (what or kind)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExprSyntaxError(f"expected {want}, found {got}", self.text, tok[2])
        self.k += 1
        return tok

    def integer(self, positive=False):
        tok = self.take("int", what="an integer")
        v = int(tok[1])
        if positive and v < 1:
            raise ExprSyntaxError("indices start at 1", self.text, tok[2])
        return v

    def expr(self):
        parts = [self.term()]
        while self.peek()[1] == "+" and self.peek()[0] == "sym":
            self.take()
            parts.append(self.term())
        return _flat(Sum, parts)

    def term(self):
        parts = [self.postfix()]
        while self.peek()[1] == "*" and self.peek()[0] == "sym":
            self.take()
            parts.append(self.postfix())
        return _flat(Comp, parts)

    def postfix(self):
        node = self.atom()
        while self.peek()[1] == "<" and self.peek()[0] == "sym":
            self.take()
            n = self.integer()
            self.take("sym", ">")
            node = Shift(node.inner, node.n + n) if isinstance(node, Shift) else Shift(node, n)
        return node

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "sym" and val == "(":
            self.take()
            e = self.expr()
            self.take("sym", ")")
            return e
        if kind == "name":
            self.take()
            if val in ("Id", "P"):
                self.take("sym", "(")
                a = self.integer(True)
                if val == "Id":
                    self.take("sym", ")")
                    return Id(a)
                self.take("sym", ",")
                b = self.integer(True)
                self.take("sym", ")")
                return Proj(a, b)
            return Name(val)
        got = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"expected Id(i), P(s,t), a name or '(', found {got}", self.text, pos)


def _flat(cls, parts):
    if len(parts) == 1:
        return parts[0]
    out = []
    for q in parts:
        out.extend(q.parts if isinstance(q, cls) else [q])
    return cls(tuple(out))


def parse_expr(text):
    p = _Parser(text)
    e = p.expr()
    if p.peek()[0] != "end":
        tok = p.peek()
        raise ExprSyntaxError(f"unexpected {tok[1]!r}", text, tok[2])
    return e


def to_text(e):
    if isinstance(e, Id):
        return f"Id({e.i})"
    if isinstance(e, Proj):
        return f"P({e.s},{e.t})"
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Shift):
        inner = to_text(e.inner)
        if isinstance(e.inner, (Sum, Comp)):
            inner = f"({inner})"
        return f"{inner}<{e.n}>"
    if isinstance(e, Comp):
        return "*".join(f"({to_text(q)})" if isinstance(q, Sum) else to_text(q) for q in e.parts)
    if isinstance(e, Sum):
        return "+".join(to_text(q) for q in e.parts)
    raise TypeError(e)


def shift_1(M, n):
    return OneMorphism(M.cat, TwistedObject(M.cat.E, [(i, s + n) for i, s in M.obj.gens],
                                            M.obj.alpha, M.obj.keys))


def direct_sum_1(*Ms):
    cat = Ms[0].cat
    for M in Ms[1:]:
        if M.cat is not cat:
            raise ObjectMismatch("summands have different sources or targets")
    gens = [g for M in Ms for g in M.obj.gens]
    size = len(gens)
    alpha = np.zeros((size, size, cat.E.n), dtype=np.int64)
    o = 0
    for M in Ms:
        s = M.obj.size
        alpha[o:o + s, o:o + s] = M.obj.alpha
        o += s
    return OneMorphism(cat, TwistedObject(cat.E, gens, alpha, [((m,), ()) for m in range(size)]))


def evaluate(e, bc, names=None):
    """Build the 1-morphism described by ``e``; ``names`` maps names to 1-morphisms."""
    A = bc.A
    names = names or {}
    if isinstance(e, str):
        e = parse_expr(e)
    if isinstance(e, Id):
        if e.i > bc.nobjects:
            raise ObjectMismatch(f"object {e.i} does not exist (there are {bc.nobjects})")
        return bc.hom(e.i - 1, e.i - 1).one(Gen("id", e.i - 1))
    if isinstance(e, Proj):
        if e.s > A.r or e.t > A.r:
            raise ObjectMismatch(f"P({e.s},{e.t}) needs idempotents up to {A.r}")
        s, t = e.s - 1, e.t - 1
        return bc.hom(A.block_of(t), A.block_of(s)).one(Gen("proj", s, t))
    if isinstance(e, Name):
        if e.name not in names:
            raise KeyError(f"unknown 1-morphism {e.name!r}")
        return names[e.name]
    if isinstance(e, Shift):
        return shift_1(evaluate(e.inner, bc, names), e.n)
    if isinstance(e, Comp):
        out = evaluate(e.parts[-1], bc, names)
        for q in reversed(e.parts[:-1]):
            out = hcompose(bc, evaluate(q, bc, names), out)
        return out
    if isinstance(e, Sum):
        return direct_sum_1(*[evaluate(q, bc, names) for q in e.parts])
    raise TypeError(e)
