"""Unit tests for exact multi-quadratic arithmetic.

Expected values come from hand expansion (small identities expanded on
paper) or from integer arithmetic oracles computed independently before
the implementation existed.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from piforge.surd import (
    EQ,
    GT,
    LT,
    NegativeRadicand,
    NotDenestable,
    ParseError,
    SurdExpr,
    ZERO,
    compare,
    factorize,
    is_probable_prime,
    normalize,
    parse_literal,
    sqrt_denest,
    squarefree_split,
    to_literal,
)


def _q(n, d=1):
    return Fraction(n, d)


# ---------------------------------------------------------------------------
# Integer helpers.
# ---------------------------------------------------------------------------


def test_is_probable_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for n in range(50):
        assert is_probable_prime(n) == (n in primes)


def test_factorize_basic():
    assert factorize(1) == {}
    assert factorize(12) == {2: 2, 3: 1}
    assert factorize(10005) == {3: 1, 5: 1, 23: 1, 29: 1}
    assert factorize(22110) == {2: 1, 3: 1, 5: 1, 11: 1, 67: 1}


def test_factorize_large_semiprime():
    # 53360**3 + 1 = 557403**2 * 489 with 557403 = 3*7*11*19*127 and
    # 489 = 3*163; verified by integer multiplication.
    n = 53360**3 + 1
    assert 557403**2 * 489 == n
    f = factorize(n)
    assert f == {3: 3, 7: 2, 11: 2, 19: 2, 127: 2, 163: 1}


def test_squarefree_split():
    assert squarefree_split(1) == (1, 1)
    assert squarefree_split(12) == (2, 3)
    assert squarefree_split(49) == (7, 1)
    assert squarefree_split(53360**3 + 1) == (557403, 489)
    assert squarefree_split(440**3 + 1) == (651, 201)


# ---------------------------------------------------------------------------
# Normalization.
# ---------------------------------------------------------------------------


def test_normalize_absorbs_square_parts():
    x = normalize([(_q(1), 12)])
    assert x.terms == {3: _q(2)}


def test_normalize_cancellation_to_zero():
    x = normalize([(_q(1), 1), (_q(-1), 1)])
    assert x.is_zero
    assert x == ZERO


def test_normalize_two_term_map_unchanged():
    x = normalize([(_q(17, 300), 51), (_q(65, 288), 3)])
    assert x.terms == {51: _q(17, 300), 3: _q(65, 288)}


def test_normalize_merges_like_radicands():
    x = normalize([(_q(1), 8), (_q(3), 2)])  # sqrt(8) = 2*sqrt(2)
    assert x.terms == {2: _q(5)}


def test_normalize_rejects_nonpositive_radicand():
    with pytest.raises(NegativeRadicand):
        normalize([(_q(1), 0)])
    with pytest.raises(NegativeRadicand):
        normalize([(_q(1), -3)])


# ---------------------------------------------------------------------------
# Field arithmetic.
# ---------------------------------------------------------------------------


def test_mul_same_radicand():
    x = SurdExpr.root(_q(1, 4), 3)
    assert x * x == SurdExpr.rational(_q(3, 16))


def test_square_of_golden_ratio():
    phi = (SurdExpr.rational(1) + SurdExpr.root(1, 5)) / 2
    assert phi * phi == (SurdExpr.rational(3) + SurdExpr.root(1, 5)) / 2


def test_conjugate_inverse():
    x = SurdExpr.rational(2) + SurdExpr.root(1, 3)
    assert SurdExpr.rational(1) / x == SurdExpr.rational(2) - SurdExpr.root(1, 3)


def test_inverse_multi_radicand():
    x = SurdExpr.rational(1) + SurdExpr.root(1, 2) + SurdExpr.root(1, 3)
    assert x * x.inverse() == SurdExpr.rational(1)


def test_inverse_three_radicands():
    x = (
        SurdExpr.rational(_q(1, 2))
        + SurdExpr.root(_q(2, 3), 2)
        - SurdExpr.root(_q(5), 15)
        + SurdExpr.root(_q(1, 7), 30)
    )
    assert x * x.inverse() == SurdExpr.rational(1)


def test_division_by_zero():
    from piforge.surd import DivisionByZero

    with pytest.raises(DivisionByZero):
        SurdExpr.rational(1) / ZERO


def test_mixed_radicand_product():
    # sqrt(6) * sqrt(10) = 2*sqrt(15)
    x = SurdExpr.root(1, 6) * SurdExpr.root(1, 10)
    assert x == SurdExpr.root(2, 15)


def test_int_and_fraction_interop():
    x = SurdExpr.root(1, 2)
    assert x + 1 == SurdExpr([(1, 1), (1, 2)])
    assert 1 + x == x + 1
    assert 2 * x == SurdExpr.root(2, 2)
    assert x - Fraction(1, 2) == SurdExpr([(_q(-1, 2), 1), (1, 2)])
    assert (x / 2) * 2 == x


# ---------------------------------------------------------------------------
# Square-root denesting.
# ---------------------------------------------------------------------------


def test_sqrt_of_perfect_square_rational():
    assert sqrt_denest(SurdExpr.rational(_q(25, 16))) == SurdExpr.rational(_q(5, 4))


def test_sqrt_of_nonsquare_rational():
    assert sqrt_denest(SurdExpr.rational(12)) == SurdExpr.root(2, 3)
    assert sqrt_denest(SurdExpr.rational(_q(1, 2))) == SurdExpr.root(_q(1, 2), 2)


def test_classic_denesting():
    x = (SurdExpr.rational(3) + SurdExpr.root(1, 5)) / 2
    y = sqrt_denest(x)
    assert y == (SurdExpr.rational(1) + SurdExpr.root(1, 5)) / 2
    assert y * y == x


def test_denesting_with_negative_surd_part():
    # sqrt((38-21*sqrt(3))/2) = (7-3*sqrt(3))/2; discriminant 121/4.
    x = (SurdExpr.rational(38) - SurdExpr.root(21, 3)) / 2
    y = sqrt_denest(x)
    assert y == (SurdExpr.rational(7) - SurdExpr.root(3, 3)) / 2
    assert y * y == x
    assert y.sign() > 0


def test_not_denestable():
    with pytest.raises(NotDenestable):
        sqrt_denest(SurdExpr.rational(1) + SurdExpr.root(1, 2))


def test_sqrt_of_negative_raises():
    with pytest.raises(NegativeRadicand):
        sqrt_denest(SurdExpr.rational(-4))


def test_sqrt_of_zero():
    assert sqrt_denest(ZERO) == ZERO


def test_sqrt_of_pure_surd_not_denestable():
    with pytest.raises(NotDenestable):
        sqrt_denest(SurdExpr.root(2, 2))


# ---------------------------------------------------------------------------
# Comparison.
# ---------------------------------------------------------------------------


def test_compare_equal_rationals():
    assert compare(SurdExpr.rational(_q(1, 9)), SurdExpr.rational(_q(1, 9))) == EQ


def test_compare_small_surd_against_one():
    x = SurdExpr.rational(_q(1, 2)) - SurdExpr.root(_q(910, 9801), 29)
    assert compare(x, SurdExpr.rational(1)) == LT
    assert x.sign() > 0  # approximately 5.1e-8, tiny but positive


def test_compare_negative_value():
    x = (SurdExpr.rational(1) - SurdExpr.root(1, 2)) / 2
    assert compare(x, ZERO) == LT


def test_compare_close_values():
    # 3363/2378 is a continued-fraction convergent of sqrt(2); the
    # difference from sqrt(2) is about 8.8e-8.
    approx = SurdExpr.rational(_q(3363, 2378))
    root2 = SurdExpr.root(1, 2)
    assert compare(approx, root2) == GT
    assert compare(-approx, -root2) == LT


def test_ordering_operators():
    assert SurdExpr.root(1, 2) < SurdExpr.rational(2)
    assert SurdExpr.root(1, 2) > SurdExpr.rational(1)
    assert SurdExpr.rational(1) <= SurdExpr.rational(1)


# ---------------------------------------------------------------------------
# Views and conversions.
# ---------------------------------------------------------------------------


def test_as_fraction():
    assert SurdExpr.rational(_q(3, 7)).as_fraction() == _q(3, 7)
    with pytest.raises(ValueError):
        (SurdExpr.root(1, 2)).as_fraction()


def test_coefficient_view():
    x = SurdExpr([(_q(5), 1), (_q(2, 3), 7)])
    assert x.rational_part == 5
    assert x.coefficient(7) == _q(2, 3)
    assert x.coefficient(28) == _q(1, 3)  # sqrt(28) = 2*sqrt(7)
    assert x.coefficient(11) == 0


def test_float_view():
    import math

    x = SurdExpr.rational(_q(1, 2)) + SurdExpr.root(_q(1, 4), 3)
    assert abs(float(x) - (0.5 + math.sqrt(3) / 4)) < 1e-12


def test_interval_encloses_value():
    import math

    x = SurdExpr.root(1, 2) + SurdExpr.root(1, 3)
    lo, hi = x.interval(64)
    true = math.sqrt(2) + math.sqrt(3)
    assert float(lo) <= true <= float(hi)
    assert hi - lo <= Fraction(2, 2**64)


# ---------------------------------------------------------------------------
# Literals.
# ---------------------------------------------------------------------------


def test_literal_round_trip_canonical():
    text = "65/288*sqrt(3)+17/300*sqrt(51)"
    x = parse_literal(text)
    assert to_literal(x) == text


def test_literal_parses_mixed_order_and_normalizes():
    x = parse_literal("17/300*sqrt(51)-65/288*sqrt(3)")
    assert x.terms == {51: _q(17, 300), 3: _q(-65, 288)}
    assert to_literal(x) == "-65/288*sqrt(3)+17/300*sqrt(51)"


def test_literal_zero():
    assert to_literal(ZERO) == "0"
    assert parse_literal("0") == ZERO


def test_literal_bare_sqrt():
    assert parse_literal("sqrt(7)") == SurdExpr.root(1, 7)
    assert to_literal(SurdExpr.root(1, 7)) == "sqrt(7)"
    assert parse_literal("-sqrt(7)") == SurdExpr.root(-1, 7)
    assert to_literal(SurdExpr.root(-1, 7)) == "-sqrt(7)"


def test_literal_normalizes_square_parts():
    assert to_literal(parse_literal("sqrt(12)")) == "2*sqrt(3)"


def test_literal_negative_leading_rational():
    x = parse_literal("-3/2+sqrt(2)")
    assert x.terms == {1: _q(-3, 2), 2: _q(1)}
    assert to_literal(x) == "-3/2+sqrt(2)"


def test_literal_integer():
    assert parse_literal("42").as_fraction() == 42
    assert to_literal(SurdExpr.rational(42)) == "42"
    assert parse_literal("-7/3").as_fraction() == _q(-7, 3)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_literal("1/2*sqrt(3")
    assert info.value.position >= 0
    with pytest.raises(ParseError):
        parse_literal("sqrt(-3)")
    with pytest.raises(ParseError):
        parse_literal("")
    with pytest.raises(ParseError):
        parse_literal("1 + + 2")
    with pytest.raises(ParseError):
        parse_literal("1/0")


def test_round_trip_many_forms():
    cases = [
        "1/300",
        "-1/27",
        "1/2-910/9801*sqrt(29)",
        "13591409/227897059584000*sqrt(10005)",
        "-65/288*sqrt(3)+17/300*sqrt(51)",
        "1/2-557403/1423644800*sqrt(1630815)",
        "0",
        "2",
        "-1",
    ]
    for text in cases:
        assert to_literal(parse_literal(text)) == text
