from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from troprank.scalars import (
    GF4,
    Q,
    CapacityError,
    FieldError,
    PrimeField,
    field_from_spec,
    field_ops,
    field_units,
    format_rational,
    parse_rational,
    pick_excluding,
)

FINITE = ["F2", "F3", "F5", "F7", "GF4"]


def test_gf4_generator_squares_to_x_plus_one():
    x = GF4.parse("x")
    assert GF4.format(GF4.mul(x, x)) == "x+1"


def test_f3_inverse_of_two():
    f = field_ops("F3")
    assert f.inv(2) == 2
    assert f.mul(2, 2) == 1


def test_q_inverse():
    assert Q.inv(Fraction(3, 4)) == Fraction(4, 3)


@pytest.mark.parametrize("spec", FINITE + ["Q"])
def test_inverting_zero_fails(spec):
    f = field_from_spec(spec)
    with pytest.raises(FieldError):
        f.inv(f.zero)


@pytest.mark.parametrize(
    "spec, expected",
    [("F2", ["1"]), ("F3", ["1", "2"]), ("GF4", ["1", "x", "x+1"])],
)
def test_units_canonical_order(spec, expected):
    f = field_from_spec(spec)
    assert [f.format(u) for u in field_units(spec)] == expected


def test_units_of_q_unsupported():
    with pytest.raises(FieldError):
        field_units("Q")


def test_pick_excluding_examples():
    assert pick_excluding("F5", {0, 4}) == 1
    assert GF4.format(pick_excluding(GF4, {0, 1})) == "x"
    with pytest.raises(CapacityError):
        pick_excluding("F3", {0, 1, 2})


@pytest.mark.parametrize("spec", ["F4", "F1", "F9", "GF8", "R", ""])
def test_bad_specs(spec):
    with pytest.raises(FieldError):
        field_from_spec(spec)


def test_cardinalities():
    assert field_from_spec("F7").cardinality == 7
    assert GF4.cardinality == 4
    assert Q.cardinality is None and not Q.is_finite


@pytest.mark.parametrize("spec", FINITE)
def test_field_axioms_exhaustive(spec):
    f = field_from_spec(spec)
    els = f.elements()
    assert len(set(els)) == f.cardinality
    for a, b in product(els, repeat=2):
        assert f.add(a, b) == f.add(b, a)
        assert f.mul(a, b) == f.mul(b, a)
        assert f.add(a, f.neg(a)) == f.zero
    for a, b, c in product(els, repeat=3):
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    for a in f.units():
        assert f.mul(a, f.inv(a)) == f.one


@pytest.mark.parametrize("spec", FINITE)
def test_units_are_the_nonzero_elements(spec):
    f = field_from_spec(spec)
    units = field_units(spec)
    assert len(units) == f.cardinality - 1
    assert len(set(units)) == len(units)
    assert f.zero not in units


@pytest.mark.parametrize("spec", FINITE)
def test_format_parse_round_trip(spec):
    f = field_from_spec(spec)
    for a in f.elements():
        assert f.parse(f.format(a)) == a


rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 10**6)


@given(rationals)
def test_q_inverse_random(a):
    if a != 0:
        assert Q.mul(a, Q.inv(a)) == 1


@given(rationals)
def test_rational_text_round_trip(a):
    assert parse_rational(format_rational(a)) == a


@given(st.sampled_from(FINITE), st.sets(st.integers(0, 6)))
def test_pick_excluding_never_forbidden(spec, banned):
    f = field_from_spec(spec)
    banned = {b for b in banned if b in f.elements()}
    try:
        u = pick_excluding(f, banned)
    except CapacityError:
        assert set(f.units()) <= banned
    else:
        assert u not in banned and u != f.zero


def test_parse_rational_forms():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(" -2 ") == -2
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"
    with pytest.raises(ValueError):
        parse_rational("abc")


def test_prime_field_requires_prime():
    with pytest.raises(FieldError):
        PrimeField(6)
