# gleason/lifts.py
"""
Lift fields and the (1,1)-form W.

    L_j = (1 - chi) g conj(f_j) / |f|^2 + chi lambda_j,   f = z - alpha

so sum_j f_j L_j = g at every node, with no discretization involved. The
quotient is only formed where chi < 1, i.e. away from the basepoint.

W = sum_j e_j (x) dbar L_j. Besides the finite-difference W this module
returns dbar L_j in closed form, which measures the stencil floor of a run:

    dbar_k L_j = dbar_k chi (lambda_j - g q_j) + (1 - chi) g dbar_k q_j
    q_j = conj(f_j) / |f|^2,   dbar_k q_j = delta_jk / |f|^2 - conj(f_j) f_k / |f|^4
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from algebra.exterior import ExteriorIndex, ConjIndex, KoszulForm, dbar_form
from algebra.symbolic import PolyExpr
from gleason.cutoff import CutoffSpec, cutoff_dbar
from gleason.taylor_split import TaylorSplit
from grid.polydisc import GridField, PolydiscSpec
from utils.error_handler import GateError


@dataclass(frozen=True)
class LiftFields:
    """
    Attributes:
        L (tuple): Lifts L_1..L_n (GridField, or PolyExpr in surrogate mode)
        exact_dbar (tuple): exact_dbar[j-1][k-1] = dbar_k L_j as GridFields, or None
        identity_residual (float): max over masked nodes of |sum f_j L_j - g|
    """

    L: Tuple
    exact_dbar: Optional[Tuple[Tuple[GridField, ...], ...]] = None
    identity_residual: float = 0.0

    @property
    def n(self):
        return len(self.L)


def offsets(spec: PolydiscSpec, alpha):
    """f_j = z_j - alpha_j as full-grid arrays."""
    return [np.broadcast_to(spec.coords(j) - alpha[j - 1], spec.shape) for j in range(1, spec.n + 1)]


def build_lifts(g: GridField, alpha, split: TaylorSplit, chi: GridField,
                spec: PolydiscSpec, cutoff: CutoffSpec) -> LiftFields:
    """
    Build L_1..L_n and their exact dbar derivatives.

    Args:
        g (GridField): Sampled input
        alpha (tuple): Basepoint
        split (TaylorSplit): lambda_j near alpha
        chi (GridField): build_cutoff(cutoff, spec)
        spec (PolydiscSpec): Grid
        cutoff (CutoffSpec): Radii used for the quotient guard

    Raises:
        GateError: if the quotient would be formed inside the chi = 1 core
    """
    n = spec.n
    f = offsets(spec, alpha)
    S = sum(np.abs(fj) ** 2 for fj in f)
    chi_v = chi.values
    active = chi_v < 1.0

    threshold = (cutoff.r_in * min(spec.radii)) ** 2 * (1 - 1e-9)
    if np.any(active & (S < threshold)):
        raise GateError('lifts', "quotient evaluated inside the chi = 1 core",
                        measured=float(np.min(S[active])), tolerance=threshold)

    inv = np.where(active, 1.0 / np.where(active, S, 1.0), 0.0)
    one_minus = 1.0 - chi_v
    gv = g.values
    lam = [split.lambdas[j].values for j in range(n)]

    L, q = [], []
    for j in range(n):
        qj = np.conj(f[j]) * inv
        q.append(qj)
        L.append(GridField(spec, one_minus * gv * qj + chi_v * lam[j], copy=False))

    dchi = [cutoff_dbar(cutoff, spec, k).values for k in range(1, n + 1)]
    exact = []
    for j in range(n):
        row = []
        for k in range(n):
            dq = -np.conj(f[j]) * f[k] * inv ** 2
            if j == k:
                dq = dq + inv
            row.append(GridField(spec, dchi[k] * (lam[j] - gv * q[j]) + one_minus * gv * dq, copy=False))
        exact.append(tuple(row))

    rebuilt = sum(f[j] * L[j].values for j in range(n))
    identity = float(np.max(np.abs(np.where(spec.mask, rebuilt - gv, 0))))
    logger.debug(f"lifts built: identity residual {identity:.2e}")
    return LiftFields(tuple(L), tuple(exact), identity)


def surrogate_lifts(g: PolyExpr, lambdas) -> LiftFields:
    """
    Polynomial lifts with chi replaced by 1 - sum |z_j|^2 (basepoint 0).

    Then (1 - chi) g zbar_j / |z|^2 = g zbar_j, so L_j = g zbar_j + (1 - |z|^2) lambda_j
    and sum z_j L_j = g holds exactly.
    """
    n = g.n
    norm2 = sum((PolyExpr.z(n, j) * PolyExpr.zbar(n, j) for j in range(1, n + 1)), PolyExpr.zero(n))
    chi = 1 - norm2
    L = tuple(g * PolyExpr.zbar(n, j) + chi * lambdas[j - 1] for j in range(1, n + 1))
    return LiftFields(L)


def lift_form(lifts: LiftFields) -> KoszulForm:
    """sum_j e_j (x) L_j as a (1,0)-form."""
    n = lifts.n
    return KoszulForm(n, 1, 0, {(ExteriorIndex((j,)), ConjIndex()): lifts.L[j - 1] for j in range(1, n + 1)})


def assemble_W(lifts: LiftFields) -> KoszulForm:
    """
    W = sum_j e_j (x) dbar L_j, a (1,1)-form.

    Finite differences for grid lifts, exact derivatives for polynomial lifts.
    """
    W = dbar_form(lift_form(lifts))
    logger.debug(f"W assembled: {len(W)} components")
    return W


def exact_W(lifts: LiftFields) -> KoszulForm:
    """W from the closed-form derivatives (grid lifts only)."""
    if lifts.exact_dbar is None:
        raise ValueError("these lifts carry no closed-form derivatives")
    n = lifts.n
    return KoszulForm(n, 1, 1, {
        ((j,), (k,)): lifts.exact_dbar[j - 1][k - 1]
        for j in range(1, n + 1) for k in range(1, n + 1)
    })
