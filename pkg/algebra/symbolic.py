# algebra/symbolic.py
"""
Exact polynomial coefficient algebra in z_1..z_n, zbar_1..zbar_n.

PolyExpr wraps a sparse sympy ring element over the Gaussian rationals
(QQ_I), so every ring operation, derivative and law check is exact.
Monomial exponents are stored as one tuple of length 2n: the first n
entries are the z-exponents, the last n the zbar-exponents.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Tuple

import numpy as np
from loguru import logger
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import ring

from config.settings import DEGREE_CAP
from utils.error_handler import (
    ClosednessError,
    DegreeCapError,
    DimensionMismatchError,
    SolverBreakdownError,
)

Exponent = Tuple[int, ...]


@lru_cache(maxsize=None)
def poly_ring(n):
    """Sparse ring QQ_I[z1..zn, zb1..zbn], one shared instance per n."""
    names = [f"z{j}" for j in range(1, n + 1)] + [f"zb{j}" for j in range(1, n + 1)]
    R, *_ = ring(",".join(names), QQ_I)
    return R


def _qq(value):
    q = Fraction(value)
    return QQ(q.numerator, q.denominator)


def to_gaussian(value):
    """
    Convert an exact scalar to a QQ_I element.

    Args:
        value: int, Fraction, (re, im) pair, QQ_I element, or a Python
            complex (taken as the exact binary value of its parts)

    Returns:
        QQ_I element
    """
    if isinstance(value, QQ_I.dtype):
        return value
    if isinstance(value, tuple):
        re, im = value
        return QQ_I(_qq(re), _qq(im))
    if isinstance(value, complex):
        return QQ_I(_qq(value.real), _qq(value.imag))
    return QQ_I(_qq(value), QQ(0))


def _fraction(q):
    return Fraction(int(q.numerator), int(q.denominator))


def gaussian_parts(c):
    """Split a QQ_I element into (Fraction re, Fraction im)."""
    return _fraction(c.x), _fraction(c.y)


class PolyExpr:
    """Immutable exact polynomial in z and zbar with complex-rational coefficients."""

    __slots__ = ('n', '_element', '_hash')

    degree_cap = DEGREE_CAP

    def __init__(self, n, element=None):
        self.n = n
        R = poly_ring(n)
        self._element = R.zero if element is None else element
        self._hash = None

    # ========== CONSTRUCTORS ==========

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, value):
        return cls(n, poly_ring(n).ground_new(to_gaussian(value)))

    @classmethod
    def one(cls, n):
        return cls.constant(n, 1)

    @classmethod
    def z(cls, n, j):
        """The holomorphic coordinate z_j (1-based)."""
        cls._check_axis(n, j)
        return cls(n, poly_ring(n).gens[j - 1])

    @classmethod
    def zbar(cls, n, j):
        """The antiholomorphic coordinate zbar_j (1-based)."""
        cls._check_axis(n, j)
        return cls(n, poly_ring(n).gens[n + j - 1])

    @classmethod
    def from_terms(cls, n, terms: Dict[Exponent, object]):
        """
        Build a polynomial from {exponent tuple (length 2n): scalar}.

        Repeated monomials are not possible in a dict; zero coefficients are dropped.
        """
        R = poly_ring(n)
        element = R.zero.copy()
        for exps, value in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != 2 * n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for n={n}")
            c = to_gaussian(value)
            if c:
                element[exps] = c
        result = cls(n, element)
        result._check_degree()
        return result

    @staticmethod
    def _check_axis(n, j):
        if not 1 <= j <= n:
            raise ValueError(f"axis {j} outside 1..{n}")

    # ========== INSPECTION ==========

    @property
    def element(self):
        return self._element

    def terms(self):
        """
        Sorted terms.

        Returns:
            list: [(exponent tuple, (Fraction re, Fraction im))] in graded order
        """
        items = [(tuple(m), gaussian_parts(c)) for m, c in self._element.items()]
        items.sort(key=lambda t: (sum(t[0]), t[0]))
        return items

    def degree(self):
        """Total degree over all 2n variables (-1 for the zero polynomial)."""
        if not self._element:
            return -1
        return max(sum(m) for m in self._element.keys())

    def is_zero(self):
        return not self._element

    def is_holomorphic(self):
        """True when no zbar appears."""
        return all(not any(m[self.n:]) for m in self._element.keys())

    def _check_degree(self):
        deg = self.degree()
        if deg > self.degree_cap:
            raise DegreeCapError(f"total degree {deg} exceeds cap {self.degree_cap}")

    # ========== RING OPERATIONS ==========

    def _coerce(self, other):
        if isinstance(other, PolyExpr):
            if other.n != self.n:
                raise DimensionMismatchError(f"polynomials in n={self.n} and n={other.n}")
            return other
        return PolyExpr.constant(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        return PolyExpr(self.n, self._element + other._element)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return PolyExpr(self.n, self._element - other._element)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return PolyExpr(self.n, -self._element)

    def __mul__(self, other):
        if isinstance(other, PolyExpr):
            self._coerce(other)
            result = PolyExpr(self.n, self._element * other._element)
            result._check_degree()
            return result
        c = to_gaussian(other)
        return PolyExpr(self.n, self._element.mul_ground(c) if c else poly_ring(self.n).zero)

    __rmul__ = __mul__

    def __pow__(self, k):
        result = PolyExpr.one(self.n)
        for _ in range(int(k)):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, PolyExpr):
            return self.n == other.n and self._element == other._element
        if isinstance(other, (int, Fraction)):
            return self == PolyExpr.constant(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._element.items())))
        return self._hash

    def __repr__(self):
        from algebra.poly_text import format_poly
        return f"PolyExpr({format_poly(self)!r})"

    # ========== CALCULUS ==========

    def dbar(self, j):
        """Formal Wirtinger derivative d/dzbar_j."""
        return poly_dbar(self, j)

    def dz(self, j):
        """Formal derivative d/dz_j."""
        return poly_dz(self, j)

    def conj(self):
        return poly_conj(self)

    def evaluate(self, z):
        return poly_eval(self, z)


def poly_arith(a: PolyExpr, b, op: str) -> PolyExpr:
    """
    Exact ring arithmetic.

    Args:
        a (PolyExpr): Left operand
        b (PolyExpr or scalar): Right operand (a scalar for 'scale')
        op (str): 'add', 'sub', 'mul' or 'scale'
    """
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op in ('mul', 'scale'):
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def poly_dbar(a: PolyExpr, j: int) -> PolyExpr:
    """Exact d/dzbar_j; holomorphic polynomials map to 0."""
    PolyExpr._check_axis(a.n, j)
    gen = poly_ring(a.n).gens[a.n + j - 1]
    return PolyExpr(a.n, a.element.diff(gen))


def poly_dz(a: PolyExpr, j: int) -> PolyExpr:
    """Exact d/dz_j."""
    PolyExpr._check_axis(a.n, j)
    gen = poly_ring(a.n).gens[j - 1]
    return PolyExpr(a.n, a.element.diff(gen))


def poly_dbar_primitive(a: PolyExpr, j: int) -> PolyExpr:
    """
    Formal zbar_j-antiderivative: P with dP/dzbar_j = a exactly.

    zbar_j^k becomes zbar_j^(k+1)/(k+1); nothing else changes.
    """
    PolyExpr._check_axis(a.n, j)
    slot = a.n + j - 1
    terms = {}
    for m, c in a.element.items():
        k = m[slot]
        lifted = list(m)
        lifted[slot] = k + 1
        terms[tuple(lifted)] = c * QQ_I(QQ(1, k + 1), QQ(0))
    return PolyExpr.from_terms(a.n, terms)


def poly_conj(a: PolyExpr) -> PolyExpr:
    """Complex conjugate: swap z and zbar exponents, conjugate coefficients."""
    n = a.n
    terms = {}
    for m, c in a.element.items():
        swapped = tuple(m[n:]) + tuple(m[:n])
        terms[swapped] = QQ_I(c.x, -c.y)
    return PolyExpr.from_terms(n, terms)


def poly_eval(a: PolyExpr, z: Iterable) -> complex:
    """
    Evaluate at a point (or broadcastable arrays) of C^n.

    Args:
        a (PolyExpr): Polynomial
        z: n complex scalars or numpy arrays that broadcast together

    Returns:
        complex or np.ndarray: value(s), rounded to machine complex
    """
    z = [np.asarray(v, dtype=complex) for v in z]
    if len(z) != a.n:
        raise DimensionMismatchError(f"point has {len(z)} coordinates, polynomial needs {a.n}")
    zc = [np.conj(v) for v in z]
    shape = np.broadcast(*z).shape if z else ()
    total = np.zeros(shape, dtype=complex)
    for m, (re, im) in a.terms():
        term = np.full(shape, complex(float(re), float(im)))
        for k in range(a.n):
            if m[k]:
                term = term * z[k] ** m[k]
            if m[a.n + k]:
                term = term * zc[k] ** m[a.n + k]
        total = total + term
    if total.ndim == 0:
        return complex(total)
    return total


def solve_dbar_symbolic(beta):
    """
    Exact Dolbeault-Grothendieck induction for polynomial (0,s)-forms.

    Args:
        beta (KoszulForm): r = 0, s >= 1, PolyExpr coefficients, dbar-closed

    Returns:
        KoszulForm: u of degree (0, s-1) with dbar_form(u) == beta exactly
    """
    from algebra.exterior import ExteriorIndex, KoszulForm, dbar_form

    if beta.r != 0 or beta.s < 1:
        raise ValueError("solve_dbar_symbolic needs a (0,s)-form with s >= 1")
    if not dbar_form(beta).is_zero():
        raise ClosednessError("polynomial form is not dbar-closed", measured=1.0, tolerance=0.0)

    n, s = beta.n, beta.s
    u = KoszulForm(n, 0, s - 1)
    previous = n + 1
    while not beta.is_zero():
        top = beta.max_conj_index()
        if top >= previous:
            raise SolverBreakdownError(f"max dzbar index did not drop ({previous} -> {top})")
        sign = -1 if (s - 1) % 2 else 1
        eta = {}
        for (J, K), w in beta.items():
            if top in K.indices:
                _, rest = K.without(top)
                eta[(ExteriorIndex(), rest)] = poly_dbar_primitive(w, top) * sign
        eta = KoszulForm(n, 0, s - 1, eta)
        beta = beta - dbar_form(eta)
        u = u + eta
        previous = top
        logger.debug(f"symbolic dbar pass on index {top}: {len(eta)} components")
    return u


def poly_degree(a: PolyExpr) -> int:
    return a.degree()
