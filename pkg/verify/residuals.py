# verify/residuals.py
"""
Residual and norm report of a Gleason decomposition.

    R_id    = interior_max(g - sum_j (z_j - alpha_j) g_j)
    R_hol_j = max_k interior_max(fd_dbar(g_j, k))

plus sup and L2 norms of every g_j. The holomorphy gate does not look at the
solver. It compares R_hol against two levels taken from the input alone:

    tol_hol = HOL_REDUCTION * dbar defect of the uncorrected lifts L_j
            + GATE_FACTOR * fd_dbar of the sampled g (stencil truncation)

so a correction that removes less than 1 - HOL_REDUCTION of the lifts' defect
fails, whatever the solver reports about itself.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from config.settings import GATE_FACTOR, HOL_REDUCTION, TOL_ID_REL
from gleason.cutoff import CutoffSpec, build_cutoff
from gleason.gates import ABS_FLOOR
from gleason.lifts import build_lifts
from gleason.taylor_split import taylor_split
from grid.polydisc import GridField, PolydiscSpec, fd_dbar, interior_max, l2_norm, sample
from utils.error_handler import SpecMismatchError


@dataclass
class ResidualReport:
    """
    Attributes:
        R_id (float): Identity residual on the rho-interior
        R_hol (tuple): Sup holomorphy residual per component
        R_hol_l2 (tuple): L2 holomorphy residual per component (rho-interior)
        sup_norms (tuple): interior_max of each g_j
        l2_norms (tuple): Quadrature L2 norm of each g_j over the polydisc
        g_sup (float): interior_max of g
        grid (dict): PolydiscSpec echo plus the interior factor
        tolerances (dict): identity, holomorphy, stencil_floor, uncorrected, norm mode
        gates (list): Contract gates as dicts (decide pass/fail)
        stage_gates (list): Pipeline-internal gates, informational
        order_estimates (dict): Filled by convergence runs
    """

    R_id: float
    R_hol: Tuple[float, ...]
    R_hol_l2: Tuple[float, ...]
    sup_norms: Tuple[float, ...]
    l2_norms: Tuple[float, ...]
    g_sup: float
    grid: Dict
    tolerances: Dict
    gates: List[Dict]
    stage_gates: List[Dict] = field(default_factory=list)
    order_estimates: Dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(g['passed'] for g in self.gates)

    def is_finite(self):
        values = [self.R_id, self.g_sup, *self.R_hol, *self.R_hol_l2, *self.sup_norms, *self.l2_norms]
        return bool(np.all(np.isfinite(values)))

    def to_dict(self):
        """JSON layout: grid, residuals, norms, gates, order_estimates."""
        return {
            'grid': self.grid,
            'residuals': {
                'R_id': self.R_id,
                'R_hol': list(self.R_hol),
                'R_hol_l2': list(self.R_hol_l2),
            },
            'norms': {
                'g_sup': self.g_sup,
                'sup': list(self.sup_norms),
                'l2': list(self.l2_norms),
            },
            'tolerances': self.tolerances,
            'gates': self.gates,
            'stage_gates': self.stage_gates,
            'order_estimates': self.order_estimates,
            'passed': self.passed,
        }


def offset_fields(spec: PolydiscSpec, alpha):
    """f_j = z_j - alpha_j as GridFields."""
    return tuple(GridField(spec, spec.coords(j) - complex(alpha[j - 1])) for j in range(1, spec.n + 1))


def dbar_levels(field_: GridField, rho=None) -> Dict[str, float]:
    """{'sup', 'l2'} size of fd_dbar(field_) over every direction on the rho-interior."""
    partials = [fd_dbar(field_, k) for k in range(1, field_.spec.n + 1)]
    return {
        'sup': max(interior_max(d, rho) for d in partials),
        'l2': float(np.sqrt(sum(l2_norm(d, rho) ** 2 for d in partials))),
    }


def uncorrected_levels(lifts, rho=None) -> Dict[str, float]:
    """Largest dbar_levels over the lifts L_1..L_n, i.e. R_hol with no correction at all."""
    levels = [dbar_levels(L, rho) for L in lifts]
    return {'sup': max(lv['sup'] for lv in levels), 'l2': max(lv['l2'] for lv in levels)}


def lift_reference(g, alpha, spec: PolydiscSpec, cutoff: Optional[CutoffSpec] = None, rho=None) -> Dict[str, float]:
    """
    Rebuild the uncorrected lifts of g and measure their dbar defect.

    Args:
        g (HolomorphicInput): Input vanishing at alpha
        alpha (tuple): Basepoint
        spec (PolydiscSpec): Grid
        cutoff (CutoffSpec): Cutoff of the run (default radii around alpha)
        rho (float): Interior factor
    """
    cutoff = (cutoff or CutoffSpec(alpha)).validate(spec)
    split = taylor_split(g, alpha, spec, cutoff)
    lifts = build_lifts(sample(g, spec), alpha, split, build_cutoff(cutoff, spec), spec, cutoff)
    return uncorrected_levels(lifts.L, rho)


def _gate(name, measured, tolerance):
    return {'name': name, 'stage': 'contract', 'measured': float(measured),
            'tolerance': float(tolerance), 'passed': bool(measured <= tolerance)}


def compute_residuals(g: GridField, components, alpha, spec: PolydiscSpec, uncorrected: Dict,
                      rho=None, tol_id=None, tol_hol=None, norm='sup') -> ResidualReport:
    """
    Measure a decomposition and gate it.

    Args:
        g (GridField): Sampled input
        components (tuple): g_1..g_n as GridFields
        alpha (tuple): Basepoint
        spec (PolydiscSpec): Shared grid
        uncorrected (dict): {'sup': float, 'l2': float} dbar defect of the uncorrected lifts
        rho (float): Interior factor (default spec.shrink)
        tol_id (float): Absolute identity tolerance; default TOL_ID_REL * sup|g|
        tol_hol (float): Absolute holomorphy tolerance; default from uncorrected and the stencil floor
        norm (str): 'sup' gates R_hol, 'l2' gates R_hol_l2

    Raises:
        SpecMismatchError: if the fields do not share spec or the count is not n
    """
    if norm not in ('sup', 'l2'):
        raise ValueError(f"norm must be 'sup' or 'l2', got {norm!r}")
    if len(components) != spec.n:
        raise SpecMismatchError(f"{len(components)} components for n={spec.n}")
    for field_ in (g, *components):
        if field_.spec != spec:
            raise SpecMismatchError("decomposition fields do not share the requested grid")
    rho = spec.shrink if rho is None else rho

    f = offset_fields(spec, alpha)
    rebuilt = GridField.zeros(spec)
    for fj, gj in zip(f, components):
        rebuilt = rebuilt + fj * gj
    R_id = interior_max(g - rebuilt, rho)

    levels = [dbar_levels(gj, rho) for gj in components]
    R_hol = [lv['sup'] for lv in levels]
    R_hol_l2 = [lv['l2'] for lv in levels]

    sup_norms = tuple(interior_max(gj, rho) for gj in components)
    l2_norms = tuple(l2_norm(gj) for gj in components)
    g_sup = interior_max(g, rho)
    stencil = dbar_levels(g, rho)

    floor_scale = ABS_FLOOR * max(1.0, g_sup)
    tol_id = TOL_ID_REL * g_sup + floor_scale if tol_id is None else float(tol_id)
    if tol_hol is None:
        tol_hol = HOL_REDUCTION * uncorrected[norm] + GATE_FACTOR * stencil[norm] + floor_scale
    measured_hol = R_hol if norm == 'sup' else R_hol_l2

    gates = [_gate('identity', R_id, tol_id)]
    gates += [_gate(f'holomorphy g{j}', r, tol_hol) for j, r in enumerate(measured_hol, start=1)]
    report = ResidualReport(
        R_id=R_id, R_hol=tuple(R_hol), R_hol_l2=tuple(R_hol_l2),
        sup_norms=sup_norms, l2_norms=l2_norms, g_sup=g_sup,
        grid={**spec.echo(), 'rho': rho},
        tolerances={'identity': tol_id, 'holomorphy': float(tol_hol), 'norm': norm,
                    'stencil_floor': {k: float(v) for k, v in stencil.items()},
                    'uncorrected': {k: float(uncorrected[k]) for k in ('sup', 'l2')}},
        gates=gates)
    report.gates.append({'name': 'finite', 'stage': 'contract', 'measured': 0.0 if report.is_finite() else 1.0,
                         'tolerance': 0.0, 'passed': report.is_finite()})
    logger.debug(f"residuals: R_id {R_id:.3e}, R_hol {max(R_hol):.3e}, tol_hol {tol_hol:.3e} "
                 f"(uncorrected {uncorrected[norm]:.3e}, stencil {stencil[norm]:.3e})")
    return report


def verify_decomposition(g, alpha, result, spec: PolydiscSpec, cutoff: Optional[CutoffSpec] = None, rho=None,
                         tol_id=None, tol_hol=None, norm='sup') -> ResidualReport:
    """
    Recompute the report of a decomposition from scratch.

    Nothing measured by the pipeline is reused: the uncorrected lifts are
    rebuilt from g to set the holomorphy tolerance.

    Args:
        g (HolomorphicInput): Input vanishing at alpha
        alpha (tuple): Basepoint
        result: DecompositionResult, or a plain tuple of g_1..g_n GridFields
        spec (PolydiscSpec): Grid the fields must live on
        cutoff (CutoffSpec): Cutoff of the run (default: the result's, else default radii)
        rho, tol_id, tol_hol, norm: as compute_residuals

    Raises:
        SpecMismatchError: if the fields do not live on spec
    """
    components = getattr(result, 'g_components', result)
    cutoff = cutoff or getattr(result, 'cutoff', None)
    for gj in components:
        if gj.spec != spec:
            raise SpecMismatchError(f"g_j lives on M={gj.spec.M}, n={gj.spec.n}; expected M={spec.M}, n={spec.n}")
    rho = spec.shrink if rho is None else rho
    uncorrected = lift_reference(g, alpha, spec, cutoff, rho)
    return compute_residuals(sample(g, spec), tuple(components), alpha, spec, uncorrected,
                             rho=rho, tol_id=tol_id, tol_hol=tol_hol, norm=norm)
