"""Exact field arithmetic, differentiation, evaluation and the grammar."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algebroids import (
    BudgetError,
    DivisionByZeroError,
    ParseError,
    Point,
    Poly,
    PoleError,
    Scalar,
    parse_scalar,
    poly_to_text,
    scalar_to_text,
    set_term_budget,
)

NAMES = ["x1", "x2"]


def s(text: str) -> Scalar:
    return parse_scalar(text, NAMES)


# -- parsing ---------------------------------------------------------------


def test_parse_zero_literal():
    assert s("0").is_zero()


def test_parse_direct_terms():
    v = s("x1^2 - 2/3*x2")
    assert v.den.is_one()
    assert v.num.terms == {(2, 0): Fraction(1), (0, 1): Fraction(-2, 3)}


def test_parse_then_differentiate_quotient():
    # quotient rule on x1/(1 + x2^2), checked against the expanded form
    v = s("x1/(1 + x2^2)").diff(1)
    assert v.equals(s("-2*x1*x2/(1+x2^2)^2"))


def test_parse_syntax_error_position():
    with pytest.raises(ParseError) as err:
        s("x1^")
    assert err.value.position == 3


def test_parse_unknown_coordinate():
    with pytest.raises(ParseError):
        s("y1 + 1")


def test_parse_division_by_zero_polynomial():
    with pytest.raises(ParseError):
        s("1/(x1 - x1)")


# -- arithmetic ------------------------------------------------------------


def test_sub_self_is_zero():
    v = s("x1")
    assert (v - v).is_zero()


def test_mul_inverse_is_one():
    assert (s("1/x1") * s("x1")).is_one()


def test_fraction_cancellation_under_cross_multiplication():
    v = s("(x1+x2)/x1") - s("x2/x1")
    assert v.equals(s("1"))


def test_division_by_zero_scalar():
    with pytest.raises(DivisionByZeroError):
        s("x1") / Scalar.zero(2)


# -- differentiation -------------------------------------------------------


def test_power_rule():
    assert s("x1^2*x2").diff(0).equals(s("2*x1*x2"))


def test_derivative_of_constant():
    assert s("5/7").diff(0).is_zero()


def test_quotient_rule_negative_power():
    assert s("1/x2^2").diff(1).equals(s("-2/x2^3"))


# -- evaluation ------------------------------------------------------------


def test_evaluate_square():
    assert s("x1^2").eval_at(Point.of(3, 0)) == 9


def test_evaluate_pole():
    with pytest.raises(PoleError):
        s("1/x1").eval_at(Point.of(0, 1))


def test_evaluate_rational_point():
    assert s("(x1+x2)/(x1-x2)").eval_at(Point.of(3, 1)) == 2


# -- exact equality --------------------------------------------------------


def test_cross_multiplication_equality():
    assert s("(x1^2-x2^2)/(x1-x2)").equals(s("x1+x2"))


def test_distinct_coordinates_differ():
    assert not s("x1").equals(s("x2"))


def test_zero_over_anything_is_zero():
    assert s("0/(1+x1^2)").equals(Scalar.zero(2))


# -- serialization ---------------------------------------------------------


def test_serialize_uses_graded_lex_with_explicit_star():
    assert scalar_to_text(s("x2 + x1^2 - 3"), NAMES) == "x1^2 + x2 - 3"


def test_serialize_leading_negative_folds_into_rational():
    text = scalar_to_text(s("-x1 + 1"), NAMES)
    assert text == "-1*x1 + 1"
    assert parse_scalar(text, NAMES).equals(s("-x1 + 1"))


def test_poly_text_zero():
    assert poly_to_text(Poly.zero(2), NAMES) == "0"


# -- budget ----------------------------------------------------------------


def test_term_budget_aborts_large_products():
    old = set_term_budget(10)
    try:
        big = s("(1 + x1 + x2 + x1*x2 + x1^2 + x2^2)")
        with pytest.raises(BudgetError):
            _ = big * big
    finally:
        set_term_budget(old)


# -- property tests --------------------------------------------------------

rationals = st.builds(
    Fraction, st.integers(-4, 4), st.integers(1, 3)
)
exponents = st.tuples(st.integers(0, 3), st.integers(0, 3))


@st.composite
def polys(draw):
    terms = draw(st.dictionaries(exponents, rationals, max_size=4))
    return Poly(2, {e: c for e, c in terms.items() if c})


@st.composite
def scalars(draw):
    num = draw(polys())
    den = draw(polys().filter(lambda p: not p.is_zero()))
    return Scalar(num, den)


@given(scalars(), scalars(), scalars())
@settings(max_examples=60, deadline=None)
def test_field_axioms(a, b, c):
    assert ((a + b) + c).equals(a + (b + c))
    assert (a * (b + c)).equals(a * b + a * c)
    assert (a - a).is_zero()
    if not b.is_zero():
        assert ((a / b) * b).equals(a)


@given(scalars(), scalars())
@settings(max_examples=60, deadline=None)
def test_product_rule(a, b):
    lhs = (a * b).diff(0)
    rhs = a.diff(0) * b + a * b.diff(0)
    assert lhs.equals(rhs)


@given(scalars(), scalars())
@settings(max_examples=60, deadline=None)
def test_evaluation_is_a_homomorphism(a, b):
    point = Point.of(Fraction(3, 2), Fraction(-1, 3))
    try:
        va, vb = a.eval_at(point), b.eval_at(point)
    except PoleError:
        return
    assert (a * b).eval_at(point) == va * vb
    assert (a + b).eval_at(point) == va + vb


@given(scalars())
@settings(max_examples=60, deadline=None)
def test_parse_serialize_roundtrip(a):
    text = scalar_to_text(a, NAMES)
    assert parse_scalar(text, NAMES).equals(a)
