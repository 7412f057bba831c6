import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdgcat import builtin
from pdgcat.bicat import BiCategory, ObjectMismatch, hcompose
from pdgcat.expr import (
    Comp,
    ExprSyntaxError,
    Id,
    Name,
    Proj,
    Shift,
    Sum,
    evaluate,
    parse_expr,
    to_text,
)


def test_parse_examples():
    assert parse_expr("Id(1)") == Id(1)
    assert parse_expr(" P(2, 1) ") == Proj(2, 1)
    assert parse_expr("P(1,1)<4>") == Shift(Proj(1, 1), 4)
    assert parse_expr("P(1,1)<2><-2>") == Shift(Proj(1, 1), 0)
    assert parse_expr("F*F + Id(1)<-2>") == Sum((Comp((Name("F"), Name("F"))),
                                                  Shift(Id(1), -2)))
    assert parse_expr("(F + G)*H") == Comp((Sum((Name("F"), Name("G"))), Name("H")))
    assert parse_expr("a*(b*c)") == Comp((Name("a"), Name("b"), Name("c")))


@pytest.mark.parametrize("text,pos,msg", [
    ("P(1,)", 4, "expected an integer"),
    ("Id(0)", 3, "indices start at 1"),
    ("F +", 3, "found end of input"),
    ("F $ G", 2, "unexpected character"),
    ("F G", 2, "unexpected"),
    ("P(1,1)<x>", 7, "expected an integer"),
    ("(F", 2, "expected"),
])
def test_errors_point_at_the_offending_token(text, pos, msg):
    with pytest.raises(ExprSyntaxError) as exc:
        parse_expr(text)
    assert exc.value.pos == pos
    assert msg in exc.value.msg
    caret_line = str(exc.value).splitlines()[-1]
    assert caret_line.index("^") - 2 == pos


names = st.sampled_from(["F", "G", "E1", "twist_a"]).map(Name)
leaves = st.one_of(st.integers(1, 4).map(Id), st.builds(Proj, st.integers(1, 4),
                                                      st.integers(1, 4)), names)


def _shift(e, n):
    return Shift(e.inner, e.n + n) if isinstance(e, Shift) else Shift(e, n)


def _join(cls, parts):
    out = []
    for q in parts:
        out.extend(q.parts if isinstance(q, cls) else [q])
    return cls(tuple(out))


trees = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.builds(_shift, kids, st.integers(-8, 8)),
        st.lists(kids, min_size=2, max_size=3).map(lambda ps: _join(Comp, ps)),
        st.lists(kids, min_size=2, max_size=3).map(lambda ps: _join(Sum, ps)),
    ),
    max_leaves=8,
)


@settings(max_examples=300)
@given(trees)
def test_print_parse_round_trip(e):
    assert parse_expr(to_text(e)) == e


@settings(max_examples=500)
@given(st.lists(st.sampled_from(["Id", "P", "F", "(", ")", "<", ">", ",", "*", "+", "1", "-2",
                                 " ", "#", "0"]), max_size=12))
def test_fuzzed_input_only_raises_syntax_errors(tokens):
    text = "".join(tokens)
    try:
        parse_expr(text)
    except ExprSyntaxError as exc:
        assert 0 <= exc.pos <= len(text)


def test_evaluate_builds_composites():
    A = builtin.kx(3, 3)
    bc = BiCategory(A)
    F = evaluate("P(1,1)", bc)
    FF = evaluate("P(1,1)*P(1,1)", bc)
    assert FF.obj == hcompose(bc, F, F).obj
    M = evaluate("Id(1) + P(1,1)<2>", bc)
    assert [(str(g), s) for g, s in M.summands] == [("Id(1)", 0), ("P(1,1)", 2)]
    assert evaluate("G*G", bc, {"G": F}).obj == FF.obj
    with pytest.raises(ObjectMismatch):
        evaluate("Id(2)", bc)
    with pytest.raises(KeyError):
        evaluate("H", bc)


def test_evaluate_rejects_mismatched_composite():
    bc = BiCategory(builtin.semisimple(3, 2))
    with pytest.raises(ObjectMismatch):
        evaluate("P(1,2)*P(1,2)", bc)
    with pytest.raises(ObjectMismatch):
        evaluate("Id(1) + Id(2)", bc)
