# algebra/exterior.py
"""
Koszul complex Gamma_(r,s) = wedge^r V (x) C_(0,s) over an abstract coefficient algebra.

A KoszulForm stores a sparse map (ExteriorIndex J, ConjIndex K) -> coefficient,
meaning sum_J,K e_J (x) w_JK dzbar_K. The e-factor and the dzbar-factor carry
independent gradings: a sign is produced only by reordering generators inside
one factor, never by moving dzbar past e.

Coefficients are never inspected here. Anything offering +, -, unary -,
* (by a coefficient or a scalar), dbar(j), conj() and is_zero() works:
PolyExpr for exact law checks, GridField for the numerical pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Protocol, Tuple, runtime_checkable

from loguru import logger

from utils.error_handler import DimensionMismatchError


@runtime_checkable
class Coefficient(Protocol):
    """Interface the exterior module relies on."""

    def __add__(self, other): ...

    def __sub__(self, other): ...

    def __neg__(self): ...

    def __mul__(self, other): ...

    def dbar(self, j: int): ...

    def conj(self): ...

    def is_zero(self) -> bool: ...


def merge_sign(left: Tuple[int, ...], right: Tuple[int, ...]) -> int:
    """
    Sign of sorting left + right, or 0 when they share an index.

    Counts pairs (a in left, b in right) with a > b.
    """
    if set(left) & set(right):
        return 0
    inversions = sum(1 for a in left for b in right if a > b)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True, order=True)
class _MultiIndex:
    indices: Tuple[int, ...] = ()

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        object.__setattr__(self, 'indices', indices)
        if any(i < 1 for i in indices):
            raise ValueError(f"indices must be positive: {indices}")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"indices must be strictly increasing: {indices}")

    @property
    def degree(self):
        return len(self.indices)

    def merge(self, other):
        """
        Wedge two basis blocks.

        Returns:
            tuple: (sign, merged index); sign 0 and None when they overlap
        """
        sign = merge_sign(self.indices, other.indices)
        if sign == 0:
            return 0, None
        return sign, type(self)(tuple(sorted(self.indices + other.indices)))

    def without(self, j):
        """
        Remove generator j.

        Returns:
            tuple: ((-1)^(position of j), remaining index), position counted from 0
        """
        position = self.indices.index(j)
        rest = self.indices[:position] + self.indices[position + 1:]
        return (-1 if position % 2 else 1), type(self)(rest)

    def __str__(self):
        return "(" + ",".join(str(i) for i in self.indices) + ")"


class ExteriorIndex(_MultiIndex):
    """Basis multi-index J of e_j1 ^ ... ^ e_jr."""


class ConjIndex(_MultiIndex):
    """Multi-index K of dzbar_k1 ^ ... ^ dzbar_ks."""


Key = Tuple[ExteriorIndex, ConjIndex]


class KoszulForm:
    """
    Element of Gamma_(r,s) in dimension n.

    Value semantics: every operation returns a new form and zero
    coefficients are pruned on construction.
    """

    __slots__ = ('n', 'r', 's', '_components')

    def __init__(self, n, r, s, components: Optional[Dict[Key, object]] = None):
        if n < 1:
            raise ValueError(f"dimension must be positive, got {n}")
        if r < 0 or s < 0:
            raise ValueError(f"degrees must be non-negative, got ({r},{s})")
        self.n, self.r, self.s = n, r, s
        self._components = {}
        normalized = []
        for (J, K), w in (components or {}).items():
            if not isinstance(J, ExteriorIndex):
                J = ExteriorIndex(tuple(J))
            if not isinstance(K, ConjIndex):
                K = ConjIndex(tuple(K))
            if not isinstance(w, Coefficient):
                raise TypeError(f"component {J}{K}: {type(w).__name__} is not a coefficient algebra")
            normalized.append(((J, K), w))
        normalized.sort(key=lambda kv: (kv[0][0].indices, kv[0][1].indices))
        for (J, K), w in normalized:
            if J.degree != r or K.degree != s:
                raise ValueError(f"component {J}{K} does not have degree ({r},{s})")
            if any(i > n for i in J.indices + K.indices):
                raise DimensionMismatchError(f"component {J}{K} has an index above n={n}")
            if not w.is_zero():
                self._components[(J, K)] = w

    # ========== CONSTRUCTORS ==========

    @classmethod
    def scalar(cls, n, w):
        """Degree (0,0) form with coefficient w."""
        return cls(n, 0, 0, {(ExteriorIndex(), ConjIndex()): w})

    @classmethod
    def basis(cls, n, J, K, w):
        """The single-component form e_J (x) w dzbar_K."""
        J, K = ExteriorIndex(tuple(J)), ConjIndex(tuple(K))
        return cls(n, J.degree, K.degree, {(J, K): w})

    # ========== INSPECTION ==========

    def items(self) -> Iterator[Tuple[Key, object]]:
        """Components in canonical key order."""
        return iter(self._components.items())

    def keys(self):
        return list(self._components)

    def component(self, J, K):
        """Coefficient at e_J dzbar_K, or None when absent."""
        J = J if isinstance(J, ExteriorIndex) else ExteriorIndex(tuple(J))
        K = K if isinstance(K, ConjIndex) else ConjIndex(tuple(K))
        return self._components.get((J, K))

    def __len__(self):
        return len(self._components)

    def is_zero(self):
        return not self._components

    def max_conj_index(self):
        """Largest variable index in any dzbar multi-index (0 when none)."""
        return max((max(K.indices, default=0) for _, K in self._components), default=0)

    def restrict(self, J):
        """The (0,s)-form of coefficients sitting under exterior index J."""
        J = J if isinstance(J, ExteriorIndex) else ExteriorIndex(tuple(J))
        parts = {(ExteriorIndex(), K): w for (JJ, K), w in self.items() if JJ == J}
        return KoszulForm(self.n, 0, self.s, parts)

    def exterior_indices(self):
        return sorted({J for J, _ in self._components})

    def map_coefficients(self, fn):
        return KoszulForm(self.n, self.r, self.s, {key: fn(w) for key, w in self.items()})

    def __repr__(self):
        keys = ", ".join(f"e{J}dzb{K}" for J, K in self._components)
        return f"KoszulForm(n={self.n}, ({self.r},{self.s}), [{keys}])"

    # ========== LINEAR STRUCTURE ==========

    def _check_compatible(self, other):
        if not isinstance(other, KoszulForm):
            raise TypeError(f"cannot combine KoszulForm with {type(other).__name__}")
        if other.n != self.n:
            raise DimensionMismatchError(f"forms in n={self.n} and n={other.n}")
        if (other.r, other.s) != (self.r, self.s) and not (self.is_zero() or other.is_zero()):
            raise ValueError(f"cannot add ({self.r},{self.s}) and ({other.r},{other.s}) forms")

    def __add__(self, other):
        self._check_compatible(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        merged = dict(self._components)
        for key, w in other.items():
            merged[key] = merged[key] + w if key in merged else w
        return KoszulForm(self.n, self.r, self.s, merged)

    def __neg__(self):
        return self.map_coefficients(lambda w: -w)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        """Multiply every coefficient by c (a scalar or a coefficient)."""
        return self.map_coefficients(lambda w: w * c)

    def __eq__(self, other):
        if not isinstance(other, KoszulForm):
            return NotImplemented
        return (self - other).is_zero() if other.n == self.n else False

    __hash__ = None


@dataclass(frozen=True)
class HolomorphicMap:
    """F = (f_1, ..., f_n) with coefficients from the same algebra as the forms."""

    components: Tuple[object, ...]
    zero_locus_hint: Optional[Tuple[complex, ...]] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(self.components))
        if not self.components:
            raise ValueError("HolomorphicMap needs at least one component")

    @property
    def n(self):
        return len(self.components)

    def __getitem__(self, j):
        """f_j, 1-based."""
        return self.components[j - 1]


def _check_pair(A: KoszulForm, B: KoszulForm):
    if A.n != B.n:
        raise DimensionMismatchError(f"forms in n={A.n} and n={B.n}")
    if not A.is_zero() and not B.is_zero():
        a = next(iter(A._components.values()))
        b = next(iter(B._components.values()))
        if type(a) is not type(b):
            raise DimensionMismatchError(
                f"coefficient algebras differ: {type(a).__name__} vs {type(b).__name__}")


def wedge(A: KoszulForm, B: KoszulForm) -> KoszulForm:
    """
    Exterior product of Gamma_(rA,sA) and Gamma_(rB,sB) into Gamma_(rA+rB, sA+sB).

    Sign = sign(e-merge) * sign(dzbar-merge); overlapping indices give 0.
    """
    _check_pair(A, B)
    n = A.n
    result = {}
    for (JA, KA), a in A.items():
        for (JB, KB), b in B.items():
            sign_e, J = JA.merge(JB)
            if sign_e == 0:
                continue
            sign_k, K = KA.merge(KB)
            if sign_k == 0:
                continue
            term = a * b
            if sign_e * sign_k < 0:
                term = -term
            result[(J, K)] = result[(J, K)] + term if (J, K) in result else term
    return KoszulForm(n, A.r + B.r, A.s + B.s, result)


def tau(F: HolomorphicMap, A: KoszulForm) -> KoszulForm:
    """
    Contraction by F: e_j1^...^e_jr (x) w -> sum_k (-1)^(k-1) f_jk (e-block without jk) (x) w.

    Forms of exterior degree 0 map to the zero form.
    """
    if F.n != A.n:
        raise DimensionMismatchError(f"map has {F.n} components, form lives in n={A.n}")
    if A.r == 0:
        return KoszulForm(A.n, 0, A.s)
    result = {}
    for (J, K), w in A.items():
        for j in J.indices:
            sign, rest = J.without(j)
            term = F[j] * w
            if sign < 0:
                term = -term
            key = (rest, K)
            result[key] = result[key] + term if key in result else term
    return KoszulForm(A.n, A.r - 1, A.s, result)


def dbar_form(A: KoszulForm) -> KoszulForm:
    """
    dbar on the dzbar-factor: w_K dzbar_K -> sum_j (d w_K / d zbar_j) dzbar_j ^ dzbar_K.

    An s = n input returns the zero (r, n+1)-form.
    """
    n = A.n
    result = {}
    if A.s < n:
        for (J, K), w in A.items():
            for j in range(1, n + 1):
                sign, merged = ConjIndex((j,)).merge(K)
                if sign == 0:
                    continue
                dw = w.dbar(j)
                if dw.is_zero():
                    continue
                if sign < 0:
                    dw = -dw
                key = (J, merged)
                result[key] = result[key] + dw if key in result else dw
    return KoszulForm(n, A.r, A.s + 1, result)


def descent_residual(Y: KoszulForm, W: KoszulForm, F: HolomorphicMap) -> KoszulForm:
    """tau_F(dbar Y) - W, zero exactly when Y solves the descent equation."""
    residual = tau(F, dbar_form(Y)) - W
    logger.debug(f"descent residual has {len(residual)} nonzero components")
    return residual
