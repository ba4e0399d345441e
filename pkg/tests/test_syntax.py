from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lukabduce.syntax import (
    BOT,
    TOP,
    BoundOutOfRange,
    Iff,
    Implies,
    IntLit,
    Neg,
    Relation,
    StrongConj,
    StrongDisj,
    UnboundVariable,
    Var,
    WeakConj,
    WeakDisj,
    as_rational,
    classical_value,
    classicality_guards,
    evaluate,
    expand,
    lit,
    normalize,
    size,
    translate_classical,
    variables,
)

p, q, r = Var("p"), Var("q"), Var("r")
rationals = st.fractions(min_value=0, max_value=1, max_denominator=60)


def test_connective_tables():
    v = {"p": F(1, 3), "q": F(1, 2)}
    assert evaluate(Neg(p), v) == F(2, 3)
    assert evaluate(StrongConj(p, q), v) == 0
    assert evaluate(StrongDisj(p, q), v) == F(5, 6)
    assert evaluate(Implies(q, p), v) == F(5, 6)
    assert evaluate(WeakConj(p, q), v) == F(1, 3)
    assert evaluate(WeakDisj(p, q), v) == F(1, 2)
    assert evaluate(Iff(p, q), v) == F(5, 6)
    assert evaluate(TOP, {}) == 1 and evaluate(BOT, {}) == 0


def test_literals_are_two_valued():
    assert evaluate(lit("p", ">=", F(1, 2)), {"p": F(1, 2)}) == 1
    assert evaluate(lit("p", ">", F(1, 2)), {"p": F(1, 2)}) == 0
    assert evaluate(lit("p", "<", F(1, 2)), {"p": F(1, 3)}) == 1


def test_lift_threshold():
    four = StrongDisj(StrongDisj(Var("c"), Var("c")), StrongDisj(Var("c"), Var("c")))
    for k in range(13):
        assert (evaluate(four, {"c": F(k, 12)}) == 1) == (k >= 3)


def test_bound_out_of_range():
    with pytest.raises(BoundOutOfRange):
        lit("p", ">=", F(5, 4))
    with pytest.raises(BoundOutOfRange):
        lit("p", "<", F(-1, 2))


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        evaluate(StrongConj(p, q), {"p": F(1)})


def test_complement_relation():
    assert lit("p", "<=", F(1, 3)).complement == lit("p", ">", F(1, 3))
    assert Relation.GEQ.complement is Relation.LT


def test_operator_sugar():
    assert ~p * q + r >> p == Implies(StrongDisj(StrongConj(Neg(p), q), r), p)


def test_variables_and_size():
    f = Implies(StrongConj(p, lit("q", ">=", 1)), r)
    assert variables(f) == {"p", "q", "r"}
    assert size(f) == 5


@given(rationals, rationals)
def test_weak_connectives_are_min_max(a, b):
    v = {"p": a, "q": b}
    assert evaluate(WeakConj(p, q), v) == min(a, b)
    assert evaluate(WeakDisj(p, q), v) == max(a, b)


@given(rationals, rationals, rationals)
def test_expand_preserves_values(a, b, c):
    v = {"p": a, "q": b, "r": c}
    for f in (WeakDisj(p, Iff(q, r)), WeakConj(Implies(p, q), Neg(r)), Iff(WeakConj(p, q), StrongDisj(p, r))):
        assert evaluate(expand(f), v) == evaluate(f, v)


@given(rationals, rationals)
def test_normalize_preserves_values(a, b):
    v = {"p": a, "q": b}
    for f in (Neg(StrongConj(p, Neg(q))), Neg(Implies(p, lit("q", "<", F(1, 2)))), Neg(WeakDisj(p, q)), Neg(TOP)):
        g = normalize(f)
        assert evaluate(g, v) == evaluate(f, v)


def _negations_on_vars_only(f):
    if isinstance(f, Neg):
        return isinstance(f.arg, Var)
    for child in (getattr(f, "left", None), getattr(f, "right", None)):
        if child is not None and not _negations_on_vars_only(child):
            return False
    return True


def test_normal_form_shape():
    g = normalize(Neg(Iff(p, WeakConj(q, Neg(r)))))
    assert _negations_on_vars_only(g)


def test_classical_translation_and_guards():
    f = WeakDisj(p, Neg(WeakConj(q, r)))
    assert translate_classical(f) == StrongDisj(p, Neg(StrongConj(q, r)))
    guards = classicality_guards(["q", "p", "q"])
    assert guards == [WeakDisj(p, Neg(p)), WeakDisj(q, Neg(q))]
    for bits in [(0, 0, 0), (1, 0, 1), (1, 1, 1)]:
        v = dict(zip("pqr", bits))
        assert evaluate(translate_classical(f), {k: F(x) for k, x in v.items()}) == classical_value(f, v)


def test_guard_forces_extremes():
    g = WeakDisj(p, Neg(p))
    assert evaluate(g, {"p": F(1, 2)}) < 1
    assert evaluate(g, {"p": F(0)}) == 1
