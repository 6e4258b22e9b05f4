# grid/holomorphic_input.py
"""
Input function g for the Gleason pipeline: a PolyExpr or a vectorised
evaluator, together with the basepoint where it is declared to vanish.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger

from algebra.symbolic import PolyExpr, poly_dz, poly_eval
from config.settings import CONTOUR_NODES, CONTOUR_RADIUS, VANISHING_TOL
from utils.error_handler import DimensionMismatchError, VanishingError


@dataclass(frozen=True)
class HolomorphicInput:
    """
    g with a declared zero at basepoint.

    Attributes:
        n (int): Dimension
        basepoint (tuple): alpha in the polydisc
        evaluator (callable): g(z_1, ..., z_n) on broadcastable complex arrays
        poly (PolyExpr): exact holomorphic polynomial (used instead of evaluator)
        name (str): Label for reports
        vanishing_tol (float): Allowed |g(alpha)|
        contour_radius (float): Absolute radius for derivative contours
    """

    n: int
    basepoint: Tuple[complex, ...]
    evaluator: Optional[Callable] = None
    poly: Optional[PolyExpr] = None
    name: str = 'g'
    vanishing_tol: float = VANISHING_TOL
    contour_radius: float = CONTOUR_RADIUS

    def __post_init__(self):
        object.__setattr__(self, 'basepoint', tuple(complex(a) for a in self.basepoint))
        if len(self.basepoint) != self.n:
            raise DimensionMismatchError(f"basepoint has {len(self.basepoint)} coordinates, need {self.n}")
        if (self.evaluator is None) == (self.poly is None):
            raise ValueError("give exactly one of evaluator or poly")
        if self.poly is not None:
            if self.poly.n != self.n:
                raise DimensionMismatchError(f"polynomial lives in n={self.poly.n}, input in n={self.n}")
            if not self.poly.is_holomorphic():
                raise ValueError(f"{self.name}: polynomial input must not contain zbar")

    @classmethod
    def from_poly(cls, poly, basepoint=None, name='poly', **kwargs):
        basepoint = basepoint if basepoint is not None else (0j,) * poly.n
        return cls(poly.n, basepoint, poly=poly, name=name, **kwargs)

    @classmethod
    def from_callable(cls, fn, n, basepoint=None, name='fn', **kwargs):
        basepoint = basepoint if basepoint is not None else (0j,) * n
        return cls(n, basepoint, evaluator=fn, name=name, **kwargs)

    def evaluate(self, z):
        """g at broadcastable coordinate arrays z = (z_1, ..., z_n)."""
        if self.poly is not None:
            return poly_eval(self.poly, z)
        return np.asarray(self.evaluator(*z), dtype=complex)

    def value_at_basepoint(self):
        return complex(np.asarray(self.evaluate([np.asarray(a) for a in self.basepoint])))

    def check_vanishing(self):
        """
        Raises:
            VanishingError: if |g(alpha)| exceeds the declared tolerance
        """
        value = abs(self.value_at_basepoint())
        if not np.isfinite(value) or value > self.vanishing_tol:
            raise VanishingError(
                f"{self.name}: |g(alpha)| = {value:.3e} exceeds vanishing tolerance {self.vanishing_tol:.1e}")
        logger.debug(f"{self.name}: |g(alpha)| = {value:.3e}")

    def derivative(self, j, z, radius=None):
        """
        dg/dz_j at broadcastable points z.

        Exact for polynomial inputs; otherwise the Cauchy-integral average
        (1/(N r)) sum_k g(z + r w^k e_j) w^(-k) over N = CONTOUR_NODES roots of unity,
        whose error is O(r^N).
        """
        if self.poly is not None:
            return poly_eval(poly_dz(self.poly, j), z)
        r = self.contour_radius if radius is None else radius
        z = [np.asarray(v, dtype=complex) for v in z]
        total = 0
        for k in range(CONTOUR_NODES):
            omega = np.exp(2j * np.pi * k / CONTOUR_NODES)
            shifted = list(z)
            shifted[j - 1] = z[j - 1] + r * omega
            total = total + self.evaluate(shifted) / omega
        return total / (CONTOUR_NODES * r)

    def with_basepoint_shift(self):
        """Input g - g(alpha), for registry functions moved to a new basepoint."""
        offset = self.value_at_basepoint()
        if self.poly is not None:
            constant = PolyExpr.constant(self.n, complex(offset))
            return HolomorphicInput(self.n, self.basepoint, poly=self.poly - constant, name=self.name,
                                    vanishing_tol=self.vanishing_tol, contour_radius=self.contour_radius)
        fn = self.evaluator
        return HolomorphicInput(self.n, self.basepoint, evaluator=lambda *z: fn(*z) - offset,
                                name=self.name, vanishing_tol=self.vanishing_tol,
                                contour_radius=self.contour_radius)
