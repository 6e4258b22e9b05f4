# gleason/koszul_descent.py
"""
Koszul descent: given W of degree (r,s) with dbar W = 0, tau_F W = 0 and
support away from F = 0, find Y of degree (r+1, s-1) with tau_F dbar Y = W.

    Y1 = X ^ W                       X = sum_j e_j (x) chi_supp conj(f_j)/|f|^2
    top degree (r+1 = n or s = n):   Y3 = Y1
    otherwise:                       Y2 = descent(dbar Y1),  Y3 = Y1 - tau_F Y2
    Y solves dbar Y = Y3, one exterior index at a time.

Every hypothesis and every solve is gated through a GatePolicy.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from loguru import logger

from algebra.exterior import (
    HolomorphicMap,
    KoszulForm,
    dbar_form,
    descent_residual,
    tau,
    wedge,
)
from gleason.gates import GatePolicy, GateRecord
from grid.polydisc import GridField, PolydiscSpec, interior_max
from solvers.dbar_solver import DbarProblem, DbarSolver, form_max
from utils.error_handler import ClosednessError, GateError, SolverBreakdownError


def build_X(F: HolomorphicMap, chi_supp: GridField, spec: PolydiscSpec, min_denominator=0.0) -> KoszulForm:
    """
    X = sum_j e_j (x) chi_supp conj(f_j) / sum_k |f_k|^2, so tau_F X = chi_supp.

    Args:
        F (HolomorphicMap): GridField components
        chi_supp (GridField): 0 near the zero of F, 1 on the support of W
        spec (PolydiscSpec): Grid
        min_denominator (float): Smallest |f|^2 allowed where chi_supp != 0

    Raises:
        GateError: if |f|^2 drops to min_denominator (or 0) where chi_supp != 0
    """
    n = spec.n
    S = sum(np.abs(F[j].values) ** 2 for j in range(1, n + 1))
    active = (chi_supp.values != 0) & spec.mask
    if np.any(active & (S <= min_denominator)):
        raise GateError('build_X', "sum |f_j|^2 too small where chi_supp is nonzero",
                        measured=float(np.min(S[active])), tolerance=min_denominator)
    inv = np.where(active, 1.0 / np.where(active, S, 1.0), 0.0)
    weight = chi_supp.values * inv
    return KoszulForm(n, 1, 0, {
        ((j,), ()): GridField(spec, weight * np.conj(F[j].values), copy=False) for j in range(1, n + 1)
    })


@dataclass
class DescentResult:
    """
    Attributes:
        Y (KoszulForm): Degree (r+1, s-1) solution
        contract (float): interior_max of tau_F dbar Y - W
        depth (int): Levels of recursion used
        solves (list): One dict per (0,s) solve
        gates (list): GateRecords of every level
    """

    Y: KoszulForm
    contract: float
    depth: int
    solves: List[dict] = field(default_factory=list)
    gates: List[GateRecord] = field(default_factory=list)

    def solve_counts(self):
        """{s: number of (0,s) solves}."""
        counts = {}
        for solve in self.solves:
            counts[solve['s']] = counts.get(solve['s'], 0) + 1
        return counts


class KoszulDescent:
    """Recursive descent with a shared solver and gate policy."""

    def __init__(self, F: HolomorphicMap, X: KoszulForm, spec: PolydiscSpec, policy: GatePolicy,
                 width, solver: Optional[DbarSolver] = None, rho=None):
        """
        Args:
            F (HolomorphicMap): GridField components
            X (KoszulForm): build_X output
            spec (PolydiscSpec): Grid
            policy (GatePolicy): Collects the gates
            width (float): Transition width of the cutoff, scales derivative gates
            solver (DbarSolver): Reused across the per-index solves
            rho (float): Interior factor for all measurements
        """
        self.F = F
        self.X = X
        self.spec = spec
        self.policy = policy
        self.width = width
        self.solver = solver or DbarSolver(spec)
        self.rho = rho
        self.fmax = max(interior_max(F[j], rho) for j in range(1, F.n + 1))
        support = np.zeros(spec.shape, dtype=bool)
        for _, x in X.items():
            support |= x.values != 0
        self.core = spec.mask & ~support
        self.solves = []
        self.contracts = {}
        self.depth = 0

    def _core_max(self, form):
        return max((float(np.max(np.abs(w.values[self.core]), initial=0.0)) for _, w in form.items()),
                   default=0.0)

    def _check_hypotheses(self, stage, Z):
        size = form_max(Z, self.rho)
        if Z.s < self.spec.n:
            self.policy.check(stage, 'dbar_closed', form_max(dbar_form(Z), self.rho), size / self.width)
        self.policy.check(stage, 'tau_vanishes', form_max(tau(self.F, Z), self.rho), self.fmax * size)
        self.policy.check(stage, 'core_support', self._core_max(Z), size)

    def _solve(self, stage, level, Y3: KoszulForm) -> KoszulForm:
        """dbar Y = Y3 for each exterior index of Y3."""
        n, r, s = Y3.n, Y3.r, Y3.s
        parts = {}
        for J in Y3.exterior_indices():
            beta = Y3.restrict(J)
            scale = form_max(beta, self.rho)
            closed_scale = scale / self.width
            problem = DbarProblem(beta, self.spec, closedness_tolerance=self.policy.breakdown(closed_scale),
                                  rho=self.rho)
            try:
                solution = self.solver.solve(problem)
            except ClosednessError as exc:
                raise GateError(stage, f"(0,{s}) data under e{J} is not dbar-closed",
                                measured=exc.measured, tolerance=exc.tolerance) from exc
            except SolverBreakdownError as exc:
                raise GateError(stage, f"(0,{s}) solve under e{J} broke down: {exc}") from exc

            self.policy.check(stage, f'dbar_closed e{J}', solution.closedness, closed_scale)
            self.policy.check(stage, f'solve_residual e{J}', solution.residual, scale)
            self.solves.append({'level': level, 'J': str(J), 's': s, **solution.to_dict()})
            for (_, K), w in solution.u.items():
                parts[(J, K)] = w
        return KoszulForm(n, r, s - 1, parts)

    def descend(self, Z: KoszulForm, level=0) -> KoszulForm:
        """Y with tau_F dbar Y = Z."""
        n, r, s = Z.n, Z.r, Z.s
        if s < 1 or r + 1 > n:
            raise ValueError(f"descent needs r < n and s >= 1, got ({r},{s})")
        stage = f'descent[{level}]'
        self.depth = max(self.depth, level + 1)
        if Z.is_zero():
            logger.debug(f"{stage}: zero data")
            return KoszulForm(n, r + 1, s - 1)

        self._check_hypotheses(stage, Z)
        Y1 = wedge(self.X, Z)
        if r + 1 == n or s == n:
            Y3 = Y1
            logger.debug(f"{stage}: top degree ({r + 1},{s}), {len(Y1)} components")
        else:
            Y2 = self.descend(dbar_form(Y1), level + 1)
            Y3 = Y1 - tau(self.F, Y2)
            logger.debug(f"{stage}: corrected by tau_F Y2 ({len(Y2)} components)")

        Y = self._solve(stage, level, Y3)
        contract = form_max(descent_residual(Y, Z, self.F), self.rho)
        self.policy.check(stage, 'contract', contract, form_max(Z, self.rho))
        self.contracts[level] = contract
        return Y

    def run(self, W: KoszulForm) -> DescentResult:
        start = len(self.policy.records)
        Y = self.descend(W)
        return DescentResult(Y, self.contracts.get(0, 0.0), self.depth, list(self.solves),
                             self.policy.records[start:])


def koszul_descent(W: KoszulForm, F: HolomorphicMap, spec: PolydiscSpec, X: KoszulForm,
                   policy: GatePolicy, width, solver=None, rho=None) -> DescentResult:
    """
    Solve tau_F dbar Y = W.

    Args:
        W (KoszulForm): Degree (r,s) grid form, s >= 1
        F (HolomorphicMap): Map whose zero the cutoff excludes
        spec (PolydiscSpec): Grid
        X (KoszulForm): build_X(F, chi_supp, spec)
        policy (GatePolicy): Gate tolerances
        width (float): Cutoff transition width
        solver (DbarSolver): Optional shared solver
        rho (float): Interior factor

    Returns:
        DescentResult
    """
    return KoszulDescent(F, X, spec, policy, width, solver=solver, rho=rho).run(W)
