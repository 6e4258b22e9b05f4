# gleason/taylor_split.py
"""
Local split g = sum_j (z_j - alpha_j) lambda_j near the basepoint.

    lambda_j(z) = int_0^1 (dg/dz_j)(alpha + t (z - alpha)) dt

evaluated by Gauss-Legendre on every node of the r_out-ball (where chi > 0);
lambda_j is set to 0 elsewhere since chi kills it there. Polynomial input at
alpha = 0 skips the quadrature: z^a contributes a_j/|a| z^(a - e_j) to
lambda_j, and the grid lambda_j are sampled from that exact split.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from algebra.symbolic import PolyExpr, poly_eval
from config.settings import CONTOUR_RADIUS, GAUSS_NODES
from gleason.cutoff import CutoffSpec, scaled_distance
from grid.holomorphic_input import HolomorphicInput
from grid.polydisc import GridField, PolydiscSpec
from utils.error_handler import QuadratureError

GAUSS_TOL = 1e-10
IDENTITY_TOL = 1e-8


@dataclass(frozen=True)
class TaylorSplit:
    """
    lambda_1..lambda_n on the grid, plus the exact polynomials they were sampled from.

    Attributes:
        lambdas (tuple): GridFields, zero outside the r_out-ball
        polys (tuple): PolyExprs or None
        identity_residual (float): max |sum (z_j - alpha_j) lambda_j - g| on the ball
        quadrature_gap (float): max difference between the two node counts (0 for exact splits)
    """

    lambdas: Tuple[GridField, ...]
    polys: Optional[Tuple[PolyExpr, ...]]
    identity_residual: float
    quadrature_gap: float


def exact_split(poly: PolyExpr):
    """Exact lambda_j for a holomorphic polynomial vanishing at 0."""
    n = poly.n
    parts = [{} for _ in range(n)]
    for exps, (re_part, im_part) in poly.terms():
        degree = sum(exps)
        if degree == 0:
            raise QuadratureError("polynomial has a constant term, it does not vanish at 0")
        for j in range(n):
            if exps[j]:
                lowered = list(exps)
                lowered[j] -= 1
                share = Fraction(exps[j], degree)
                parts[j][tuple(lowered)] = (re_part * share, im_part * share)
    return tuple(PolyExpr.from_terms(n, p) for p in parts)


def _ray_integral(g: HolomorphicInput, j, z, alpha, nodes, radius):
    """Gauss-Legendre approximation of int_0^1 dg/dz_j(alpha + t(z - alpha)) dt at points z."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    total = 0
    for tk, wk in zip(t, w):
        points = [a + tk * (zc - a) for zc, a in zip(z, alpha)]
        total = total + wk * g.derivative(j, points, radius=radius)
    return total


def taylor_split(g: HolomorphicInput, alpha, spec: PolydiscSpec, cutoff: CutoffSpec,
                 nodes=GAUSS_NODES) -> TaylorSplit:
    """
    Build the local split on the r_out-ball.

    Args:
        g (HolomorphicInput): Input vanishing at alpha
        alpha (tuple): Basepoint (must equal g.basepoint and cutoff.center)
        spec (PolydiscSpec): Grid
        cutoff (CutoffSpec): Supplies r_out
        nodes (int): Gauss-Legendre nodes; nodes - 4 is the convergence check

    Raises:
        VanishingError: if g(alpha) is not within tolerance of 0
        QuadratureError: if the two node counts disagree or the split identity fails
    """
    g.check_vanishing()
    alpha = tuple(complex(a) for a in alpha)
    n = spec.n

    ball = scaled_distance(cutoff, spec) <= cutoff.r_out
    idx = np.nonzero(ball)
    z = [np.broadcast_to(spec.coords(j), spec.shape)[idx] for j in range(1, n + 1)]
    radius = CONTOUR_RADIUS * min(spec.radii)

    polys = None
    if g.poly is not None and all(a == 0 for a in alpha):
        polys = exact_split(g.poly)

    lambdas, gap = [], 0.0
    for j in range(1, n + 1):
        if polys is not None:
            fine = np.asarray(poly_eval(polys[j - 1], z), dtype=complex)
        else:
            fine = _ray_integral(g, j, z, alpha, nodes, radius)
            coarse = _ray_integral(g, j, z, alpha, nodes - 4, radius)
            scale = max(1.0, float(np.max(np.abs(fine), initial=0.0)))
            gap = max(gap, float(np.max(np.abs(fine - coarse), initial=0.0)) / scale)
        values = np.zeros(spec.shape, dtype=complex)
        values[idx] = fine
        lambdas.append(GridField(spec, values, copy=False))

    if gap > GAUSS_TOL:
        raise QuadratureError(f"ray integral unresolved: {nodes} vs {nodes - 4} Gauss nodes differ by {gap:.2e}")

    g_ball = np.asarray(g.evaluate(z), dtype=complex)
    rebuilt = sum((z[j] - alpha[j]) * lambdas[j].values[idx] for j in range(n))
    scale = max(1.0, float(np.max(np.abs(g_ball), initial=0.0)))
    identity = float(np.max(np.abs(rebuilt - g_ball), initial=0.0))
    if identity > IDENTITY_TOL * scale:
        raise QuadratureError(f"split identity residual {identity:.2e} on the r_out-ball")

    logger.debug(f"taylor split: {int(ball.sum())} ball nodes, identity {identity:.2e}, gauss gap {gap:.2e}")
    return TaylorSplit(tuple(lambdas), polys, identity, gap)
