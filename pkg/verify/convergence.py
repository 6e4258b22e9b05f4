# verify/convergence.py
"""
Convergence study: run the pipeline on a ladder of grids and tabulate
residuals, norms, ratios and observed orders.

    ratio_k = R(M_k) / R(M_(k-1))
    order_k = log(R(M_(k-1)) / R(M_k)) / log(M_k / M_(k-1))

Residuals already at round-off (<= FLOOR_REL * max(sup|g|, 1) on both
levels) are marked 'at-floor' and carry NaN ratio and order.

A ladder is accepted when every consecutive pair has R_id and R_hol either
at-floor, shrinking by ACCEPT_RATIO or better, or converging at order
ACCEPT_ORDER or better, and no level failed.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
import pandas as pd
from loguru import logger

from config.settings import ACCEPT_ORDER, ACCEPT_RATIO, FLOOR_REL, KOSZUL_THREADS
from utils.error_handler import ErrorHandler, KoszulError


@dataclass
class ConvergenceStudy:
    """
    Attributes:
        table (pd.DataFrame): One row per grid level
        accepted (bool): acceptance(table) and no failed level
        errors (dict): ErrorHandler summary of failed levels
    """

    table: pd.DataFrame
    accepted: bool
    errors: Dict = field(default_factory=dict)

    def order_estimates(self) -> Dict:
        """Latest pair of levels as a plain dict for JSON reports."""
        if len(self.table) < 2:
            return {}
        last = self.table.iloc[-1]
        return {
            'M': [int(m) for m in self.table['M']],
            'R_id_ratio': _plain(last['R_id_ratio']),
            'R_id_order': _plain(last['R_id_order']),
            'R_id_status': last['R_id_status'],
            'R_hol_ratio': _plain(last['R_hol_ratio']),
            'R_hol_order': _plain(last['R_hol_order']),
            'R_hol_status': last['R_hol_status'],
        }

    def to_csv(self, path):
        self.table.to_csv(path, index=False, float_format='%.6e')
        logger.info(f"✓ convergence table written to {path}")


def _plain(value):
    return None if value is None or not np.isfinite(value) else float(value)


def _trend(values, Ms, floor):
    """Ratio, order and status per level (first level has none)."""
    ratios, orders, status = [np.nan], [np.nan], ['base']
    for k in range(1, len(values)):
        previous, current = values[k - 1], values[k]
        if not (np.isfinite(previous) and np.isfinite(current)):
            ratios.append(np.nan)
            orders.append(np.nan)
            status.append('failed')
        elif previous <= floor and current <= floor:
            ratios.append(np.nan)
            orders.append(np.nan)
            status.append('at-floor')
        else:
            ratio = current / previous if previous > 0 else np.inf
            ratios.append(ratio)
            orders.append(np.log(previous / current) / np.log(Ms[k] / Ms[k - 1]) if current > 0 else np.inf)
            status.append('converging' if ratio < 1 else 'stalled')
    return ratios, orders, status


def convergence_study(g, alpha, specs, cutoff=None, accept_ratio=ACCEPT_RATIO, accept_order=ACCEPT_ORDER,
                      workers=None, **options) -> ConvergenceStudy:
    """
    Run gleason_decompose on every grid and tabulate the trend.

    Args:
        g (HolomorphicInput): Input vanishing at alpha
        alpha (tuple): Basepoint
        specs (list): PolydiscSpecs with increasing M
        cutoff (CutoffSpec): Shared cutoff
        accept_ratio (float): Largest allowed residual ratio between consecutive levels
        accept_order (float): Smallest observed order accepted instead of the ratio
        workers (int): Levels run concurrently (default KOSZUL_THREADS)
        **options: GleasonPipeline keyword arguments

    Returns:
        ConvergenceStudy
    """
    from gleason_pipeline import gleason_decompose

    specs = list(specs)
    Ms = [spec.M for spec in specs]
    if len(specs) < 2:
        raise ValueError("a convergence study needs at least two grid levels")
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ValueError(f"grid levels must increase strictly, got M = {Ms}")

    handler = ErrorHandler()

    def run_level(spec):
        try:
            return gleason_decompose(g, alpha, spec, cutoff, **options)
        except KoszulError as exc:
            handler.log_error(f"M={spec.M}", exc)
            return None

    logger.info(f"🔧 convergence study over M = {Ms}")
    with ThreadPoolExecutor(max_workers=workers or KOSZUL_THREADS) as pool:
        results = list(pool.map(run_level, specs))

    table = tabulate(specs, results)
    accepted = acceptance(table, accept_ratio, accept_order) and not handler.has_errors()
    for _, row in table.iterrows():
        logger.info(f"   M={int(row['M'])}: R_id {row['R_id']:.2e} ({row['R_id_status']}), "
                    f"R_hol {row['R_hol']:.2e} ({row['R_hol_status']})")
    logger.info(f"{'✅' if accepted else '❌'} convergence acceptance: {accepted}")
    return ConvergenceStudy(table, accepted, handler.summary())


def acceptance(table: pd.DataFrame, accept_ratio=ACCEPT_RATIO, accept_order=ACCEPT_ORDER) -> bool:
    """True when R_id and R_hol both settle on every consecutive pair of levels."""
    pairs = table.iloc[1:]
    if pairs.empty:
        return False
    for name in ('R_id', 'R_hol'):
        settled = ((pairs[f'{name}_status'] == 'at-floor')
                   | (pairs[f'{name}_ratio'] <= accept_ratio)
                   | (pairs[f'{name}_order'] >= accept_order))
        if not settled.all():
            return False
    return True


def tabulate(specs, results) -> pd.DataFrame:
    """
    One row per level from DecompositionResults (None marks a failed level).
    """
    Ms = [spec.M for spec in specs]
    rows: List[Dict] = []
    for spec, result in zip(specs, results):
        row = {'M': spec.M, 'h': spec.h_min}
        if result is None:
            row.update({'R_id': np.nan, 'R_hol': np.nan, 'R_hol_l2': np.nan, 'g_sup': np.nan,
                        'fd_floor': np.nan, 'passed': False})
        else:
            report = result.report
            row.update({'R_id': report.R_id, 'R_hol': max(report.R_hol), 'R_hol_l2': max(report.R_hol_l2),
                        'g_sup': report.g_sup, 'fd_floor': result.fd_floor['sup'], 'passed': report.passed})
            for j, (sup, l2) in enumerate(zip(report.sup_norms, report.l2_norms), start=1):
                row[f'sup_g{j}'] = sup
                row[f'l2_g{j}'] = l2
        rows.append(row)
    table = pd.DataFrame(rows)

    g_sup = float(np.nanmax(table['g_sup'])) if table['g_sup'].notna().any() else 0.0
    floor = FLOOR_REL * max(g_sup, 1.0)
    for name in ('R_id', 'R_hol'):
        ratios, orders, status = _trend(table[name].to_numpy(dtype=float), Ms, floor)
        table[f'{name}_ratio'] = ratios
        table[f'{name}_order'] = orders
        table[f'{name}_status'] = status
    return table


def norm_changes(study: ConvergenceStudy) -> Dict[str, float]:
    """Largest relative change of each norm column between consecutive levels."""
    changes = {}
    for column in study.table.columns:
        if column.startswith(('sup_g', 'l2_g')):
            values = study.table[column].to_numpy(dtype=float)
            with np.errstate(divide='ignore', invalid='ignore'):
                rel = np.abs(np.diff(values)) / np.abs(values[:-1])
            changes[column] = float(np.nanmax(rel)) if np.isfinite(rel).any() else np.nan
    return changes
