# tests/test_symbolic.py
from fractions import Fraction

import numpy as np
import pytest

from algebra.exterior import KoszulForm, dbar_form
from algebra.symbolic import (
    PolyExpr,
    poly_arith,
    poly_conj,
    poly_dbar,
    poly_dbar_primitive,
    poly_degree,
    poly_dz,
    poly_eval,
    solve_dbar_symbolic,
)
from utils.error_handler import ClosednessError, DegreeCapError, DimensionMismatchError


def test_distributivity(z, zb):
    a = z(2, 1) + zb(2, 2)
    assert poly_arith(a, z(2, 1), 'mul') == z(2, 1) ** 2 + z(2, 1) * zb(2, 2)


def test_additive_identity(z, zb):
    a = z(2, 1) * zb(2, 2) + 3
    assert poly_arith(a, PolyExpr.zero(2), 'add') == a


def test_exponent_addition(z, zb):
    w = z(1, 1) * zb(1, 1)
    assert w * w == PolyExpr.from_terms(1, {(2, 2): 1})


def test_scale_by_gaussian_rational(z):
    p = poly_arith(z(1, 1), (Fraction(1, 2), Fraction(-3)), 'scale')
    assert p.terms() == [((1, 0), (Fraction(1, 2), Fraction(-3)))]


def test_poly_dbar_examples(z, zb):
    assert poly_dbar(zb(1, 1) ** 2, 1) == zb(1, 1) * 2
    assert poly_dbar(z(3, 1) ** 3, 2).is_zero()
    assert poly_dbar(z(2, 1) * zb(2, 2), 2) == z(2, 1)


def test_poly_dbar_leibniz(z, zb):
    a = z(2, 1) * zb(2, 1) ** 2 + zb(2, 2)
    b = zb(2, 1) * zb(2, 2) - z(2, 2) * 5
    for j in (1, 2):
        assert poly_dbar(a * b, j) == poly_dbar(a, j) * b + a * poly_dbar(b, j)
        assert poly_dbar(a + b, j) == poly_dbar(a, j) + poly_dbar(b, j)


def test_poly_dz_and_conj(z, zb):
    a = z(2, 1) ** 2 * zb(2, 2) + PolyExpr.constant(2, (0, 1))
    assert poly_dz(a, 1) == z(2, 1) * zb(2, 2) * 2
    assert poly_conj(a) == zb(2, 1) ** 2 * z(2, 2) + PolyExpr.constant(2, (0, -1))
    assert poly_conj(poly_conj(a)) == a


def test_poly_eval_examples(z, zb):
    assert poly_eval(z(2, 1) * z(2, 2) + z(2, 2) ** 2, (1, 2)) == 6
    a = z(2, 1) * 4 + PolyExpr.constant(2, (Fraction(1, 2), 1))
    assert poly_eval(a, (0, 0)) == complex(0.5, 1)
    assert poly_eval(zb(2, 1), (1j, 0)) == -1j


def test_poly_eval_is_homomorphism_up_to_rounding(z, zb):
    rng = np.random.default_rng(3)
    a = z(2, 1) * 3 + zb(2, 2) ** 2 - z(2, 2) * zb(2, 1)
    b = z(2, 2) ** 3 + PolyExpr.constant(2, (2, -1))
    pts = rng.normal(size=(2, 50)) + 1j * rng.normal(size=(2, 50))
    lhs = poly_eval(a * b, pts)
    rhs = poly_eval(a, pts) * poly_eval(b, pts)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_degree_cap(z):
    assert poly_degree(z(1, 1) ** 12) == 12
    with pytest.raises(DegreeCapError):
        z(1, 1) ** 13


def test_dimension_mismatch(z):
    with pytest.raises(DimensionMismatchError):
        z(1, 1) + z(2, 1)


def test_dbar_primitive_inverts_dbar(z, zb):
    a = z(3, 1) * zb(3, 2) ** 2 + zb(3, 3) + 7
    for j in (1, 2, 3):
        assert poly_dbar(poly_dbar_primitive(a, j), j) == a


def test_solve_dbar_symbolic_recovers_potential(zb):
    potential = zb(2, 1) * zb(2, 2)
    beta = dbar_form(KoszulForm.scalar(2, potential))
    u = solve_dbar_symbolic(beta)
    assert dbar_form(u) == beta
    assert dbar_form(u - KoszulForm.scalar(2, potential)).is_zero()


def test_solve_dbar_symbolic_top_degree():
    beta = KoszulForm.basis(2, (), (1, 2), PolyExpr.one(2))
    u = solve_dbar_symbolic(beta)
    assert u.r == 0 and u.s == 1
    assert dbar_form(u) == beta


def test_solve_dbar_symbolic_rejects_non_closed(z, zb):
    beta = KoszulForm.basis(2, (), (1,), zb(2, 2))
    with pytest.raises(ClosednessError):
        solve_dbar_symbolic(beta)
