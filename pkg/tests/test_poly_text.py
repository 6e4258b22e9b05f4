# tests/test_poly_text.py
from fractions import Fraction

import pytest

from algebra.exterior import KoszulForm
from algebra.poly_text import format_form, format_poly, parse_form, parse_poly
from algebra.symbolic import PolyExpr
from utils.error_handler import PolyParseError


def test_format_canonical_order():
    p = PolyExpr.from_terms(2, {
        (2, 0, 0, 1): (Fraction(3, 2), Fraction(1, 2)),
        (0, 0, 0, 0): 4,
        (1, 0, 0, 0): (0, Fraction(-1, 3)),
    })
    assert format_poly(p) == "4 - 1/3i z1 + (3/2+1/2i) z1^2 zb2"


def test_format_zero_and_units(z, zb):
    assert format_poly(PolyExpr.zero(2)) == "0"
    assert format_poly(-z(2, 1)) == "-z1"
    assert format_poly(z(2, 1) * zb(2, 1) + PolyExpr.constant(2, (0, 1))) == "1i + z1 zb1"


def test_parse_accepts_variants():
    p = parse_poly("2*z1*zb2 - (1-2i) z2^2  # comment\n + i", 2)
    expected = PolyExpr.from_terms(2, {
        (1, 0, 0, 1): 2,
        (0, 2, 0, 0): (-1, 2),
        (0, 0, 0, 0): (0, 1),
    })
    assert p == expected


def test_parse_sums_repeated_monomials():
    assert parse_poly("z1 + z1 - 2 z1", 1).is_zero()


@pytest.mark.parametrize("text", [
    "4 - 1/3i z1 + (3/2+1/2i) z1^2 zb2",
    "(-1/2-7i) zb1 zb2^3",
    "z2^2 - z1 z2",
    "0",
])
def test_printer_parser_round_trip(text):
    p = parse_poly(text, 2)
    assert format_poly(p) == text
    assert parse_poly(format_poly(p), 2) == p


@pytest.mark.parametrize("text,line,column", [
    ("z1 +", 1, 5),
    ("z1 + z3", 1, 6),
    ("z1\n + 3 ) z2", 2, 6),
    ("1/0 z1", 1, 3),
])
def test_parse_errors_report_position(text, line, column):
    with pytest.raises(PolyParseError) as info:
        parse_poly(text, 2)
    assert (info.value.line, info.value.column) == (line, column)


def test_form_round_trip(zb):
    form = KoszulForm(2, 1, 1, {
        ((1,), (2,)): zb(2, 1),
        ((2,), (1,)): PolyExpr.constant(2, -3),
    })
    text = format_form(form)
    assert text == "e1^dzb2 : zb1\ne2^dzb1 : -3"
    assert parse_form(text, 2) == form


def test_parse_form_rejects_unsorted_basis():
    with pytest.raises(PolyParseError):
        parse_form("dzb2^dzb1 : 1", 2)


def test_parse_empty_form_needs_degree():
    assert parse_form("# nothing\n", 2, r=0, s=1).is_zero()
    with pytest.raises(PolyParseError):
        parse_form("", 2)


def test_zero_form_header_round_trip():
    text = format_form(KoszulForm(2, 0, 1))
    parsed = parse_form(text, 2)
    assert parsed.is_zero()
    assert (parsed.r, parsed.s) == (0, 1)
