# solvers/dbar_solver.py
"""
Solve dbar u = beta for dbar-closed (0,s)-forms on a polydisc grid.

Dolbeault-Grothendieck induction: with l the largest dzbar index left in beta,
write beta = dzbar_l ^ gamma + delta, take eta = T_l gamma (Cauchy transform in
z_l, slice-wise), then beta <- beta - dbar(eta) and u <- u + eta. Components
of the new beta that still carry an index >= l are discretization error and
are dropped, so every pass lowers the top index and at most n passes run.
A pass whose dropped residue is as large as the index-l data it started from
made no progress and raises SolverBreakdownError.
"""

from dataclasses import dataclass, field
from typing import Optional

from loguru import logger

from algebra.exterior import ExteriorIndex, KoszulForm, dbar_form
from config.settings import CLOSEDNESS_FACTOR, KOSZUL_THREADS
from grid.polydisc import PolydiscSpec, interior_max
from solvers.cauchy_transform import CauchyTransform
from utils.error_handler import ClosednessError, SolverBreakdownError


def form_max(form: KoszulForm, rho=None) -> float:
    """Largest interior_max over the components of a grid form (0 for the zero form)."""
    return max((interior_max(w, rho) for _, w in form.items()), default=0.0)


def default_closedness_tolerance(spec: PolydiscSpec, scale):
    """CLOSEDNESS_FACTOR * (h/R)^3 * scale, the fourth-order stencil floor on smooth data."""
    rel_h = max(spec.h(j) / spec.radii[j - 1] for j in range(1, spec.n + 1))
    return CLOSEDNESS_FACTOR * rel_h ** 3 * scale


@dataclass(frozen=True)
class DbarProblem:
    """
    dbar u = beta on spec.

    Attributes:
        beta (KoszulForm): r = 0, s >= 1, GridField coefficients
        spec (PolydiscSpec): Grid of every coefficient
        closedness_tolerance (float): Allowed interior_max of dbar beta;
            None picks default_closedness_tolerance
        rho (float): Interior factor for the checks (default spec.shrink)
    """

    beta: KoszulForm
    spec: PolydiscSpec
    closedness_tolerance: Optional[float] = None
    rho: Optional[float] = None

    def __post_init__(self):
        if self.beta.r != 0 or self.beta.s < 1:
            raise ValueError(f"dbar problems need a (0,s)-form with s >= 1, got ({self.beta.r},{self.beta.s})")
        if self.beta.n != self.spec.n:
            raise ValueError(f"form lives in n={self.beta.n}, grid in n={self.spec.n}")

    def tolerance(self):
        if self.closedness_tolerance is not None:
            return self.closedness_tolerance
        return default_closedness_tolerance(self.spec, form_max(self.beta, self.rho))

    def measure_closedness(self):
        """interior_max of dbar_form(beta)."""
        return form_max(dbar_form(self.beta), self.rho)


@dataclass
class DbarSolution:
    """Solution u with its recomputed residual report."""

    u: KoszulForm
    residual: float
    closedness: float
    closedness_tolerance: float
    passes: int
    beta_max: float
    u_max: float
    dropped: list = field(default_factory=list)

    @property
    def amplification(self):
        """interior_max(u) / interior_max(beta), the observed solution-operator bound."""
        return self.u_max / self.beta_max if self.beta_max > 0 else 0.0

    def to_dict(self):
        return {
            'residual': self.residual,
            'dropped': [{'index': top, 'component': name, 'residue': residue} for top, name, residue in self.dropped],
            'closedness': self.closedness,
            'closedness_tolerance': self.closedness_tolerance,
            'passes': self.passes,
            'beta_max': self.beta_max,
            'u_max': self.u_max,
            'amplification': self.amplification,
        }


class DbarSolver:
    """Reusable solver holding one Cauchy transform (and kernel FFT) per disc."""

    def __init__(self, spec: PolydiscSpec, method='fft', workers=None):
        self.spec = spec
        self.method = method
        workers = workers or KOSZUL_THREADS
        self.transforms = {j: CauchyTransform(spec, j, workers=workers) for j in range(1, spec.n + 1)}

    def solve(self, problem: DbarProblem, check_closed=True) -> DbarSolution:
        """
        Run the induction.

        Raises:
            ClosednessError: if dbar beta exceeds the closedness tolerance
            SolverBreakdownError: if a pass drops a residue no smaller than the
                top-index data it was meant to remove
        """
        if problem.spec != self.spec:
            raise ValueError("problem and solver use different grids")
        beta_original = problem.beta
        n, s = beta_original.n, beta_original.s

        closedness = problem.measure_closedness()
        tolerance = problem.tolerance()
        if check_closed and not closedness <= tolerance:
            raise ClosednessError(
                f"beta is not dbar-closed: interior max of dbar beta {closedness:.3e} > {tolerance:.3e}",
                measured=closedness, tolerance=tolerance)

        u = KoszulForm(n, 0, s - 1)
        beta = beta_original
        dropped = []
        passes = 0
        while not beta.is_zero():
            top = beta.max_conj_index()
            sign = -1 if (s - 1) % 2 else 1
            eta = {}
            top_data = 0.0
            for (_, K), w in beta.items():
                if top in K.indices:
                    top_data = max(top_data, interior_max(w, problem.rho))
                    _, rest = K.without(top)
                    eta[(ExteriorIndex(), rest)] = self.transforms[top].apply(w, self.method) * sign
            eta = KoszulForm(n, 0, s - 1, eta)

            remainder = beta - dbar_form(eta)
            kept = {}
            for key, w in remainder.items():
                if max(key[1].indices) >= top:
                    dropped.append((top, str(key[1]), interior_max(w, problem.rho)))
                    logger.debug(f"pass on z{top}: dropped dzbar{key[1]} residue {dropped[-1][2]:.3e}")
                else:
                    kept[key] = w
            beta = KoszulForm(n, 0, s, kept)
            residue = max((d[2] for d in dropped if d[0] == top), default=0.0)
            if top_data > 0 and residue >= top_data:
                raise SolverBreakdownError(
                    f"pass on z{top} dropped residue {residue:.3e}, no smaller than its dzbar{top} data {top_data:.3e}")
            u = u + eta
            passes += 1

        residual = form_max(dbar_form(u) - beta_original, problem.rho)
        solution = DbarSolution(
            u=u, residual=residual, closedness=closedness, closedness_tolerance=tolerance,
            passes=passes, beta_max=form_max(beta_original, problem.rho),
            u_max=form_max(u, problem.rho), dropped=dropped)
        logger.debug(f"dbar solve (0,{s}) n={n}: {passes} passes, residual {residual:.3e}, "
                     f"amplification {solution.amplification:.3f}")
        return solution


def solve_dbar_polydisc(problem: DbarProblem, method='fft', solver: Optional[DbarSolver] = None) -> DbarSolution:
    """
    Solve dbar u = beta on a polydisc grid.

    Args:
        problem (DbarProblem): Closed (0,s)-form
        method (str): 'fft' or 'direct' Cauchy transforms
        solver (DbarSolver): Reuse precomputed kernels across calls

    Returns:
        DbarSolution: u of degree (0, s-1) with residual interior_max(dbar u - beta)
    """
    solver = solver or DbarSolver(problem.spec, method=method)
    return solver.solve(problem)

