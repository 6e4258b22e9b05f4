# cli/commands.py
"""
Subcommands decompose, laws, dbar and converge.

Exit codes: 0 success, 1 gate or contract failure, 2 usage or configuration error.
"""

import argparse
import json
import os
import sys

from loguru import logger

from algebra.exterior import ExteriorIndex, KoszulForm, dbar_form
from algebra.poly_text import parse_basis, parse_form, parse_poly
from cli.run_config import build_run_config
from config.settings import DBAR_TOL_REL, KOSZUL_THREADS
from gleason.cutoff import CutoffSpec
from grid.field_io import export_fields_csv, import_fields_csv
from grid.holomorphic_input import HolomorphicInput
from grid.polydisc import PolydiscSpec, sample
from solvers.dbar_solver import DbarProblem, DbarSolver, form_max
from utils.error_handler import (
    ClosednessError,
    ConfigError,
    DimensionMismatchError,
    GridSpecError,
    KoszulError,
    PolyParseError,
    SolverBreakdownError,
    SpecMismatchError,
    VanishingError,
)
from utils.function_registry import get_function, list_functions
from utils.log_setup import configure_logging

EXIT_OK, EXIT_GATE, EXIT_CONFIG = 0, 1, 2
CONFIG_ERRORS = (ConfigError, PolyParseError, GridSpecError, VanishingError, DimensionMismatchError,
                 SpecMismatchError)


# ========== HELPERS ==========

def _spec(config, M):
    n = config.n
    centers = tuple(config.centers) if config.centers else (0j,) * n
    radii = tuple(config.radii) if config.radii else (1.0,) * n
    return PolydiscSpec(n, centers, radii, M=M, shrink=config.rho)


def _input(config) -> HolomorphicInput:
    if config.fn is not None:
        return get_function(config.fn, config.n, config.basepoint)
    with open(config.poly_file, 'r', encoding='utf-8') as f:
        poly = parse_poly(f.read(), config.n)
    name = os.path.splitext(os.path.basename(config.poly_file))[0]
    return HolomorphicInput.from_poly(poly, basepoint=config.basepoint, name=name)


def _cutoff(config):
    return CutoffSpec(config.basepoint, config.r_in, config.r_out)


def _write_json(payload, path):
    if path is None:
        print(json.dumps(payload, indent=2))
        return
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f, indent=2)
    logger.info(f"✓ report written to {path}")


def _pipeline_options(config):
    return {'rho': config.rho, 'norm': config.norm, 'tol_id': config.tol_id, 'tol_hol': config.tol_hol,
            'method': config.method}


# ========== COMMANDS ==========

def cmd_decompose(config) -> int:
    """Run the pipeline, write the JSON report (and optional CSV fields)."""
    from gleason_pipeline import GleasonPipeline
    from verify.convergence import ConvergenceStudy, tabulate

    g = _input(config)
    cutoff = _cutoff(config)
    spec = _spec(config, config.M[0])
    try:
        result = GleasonPipeline(spec, cutoff, **_pipeline_options(config)).decompose(g)
    except KoszulError as exc:
        if isinstance(exc, CONFIG_ERRORS):
            raise
        logger.error(f"decomposition failed: {exc}")
        _write_json({'grid': spec.echo(), 'error': str(exc), 'stage': getattr(exc, 'stage', None),
                     'type': type(exc).__name__, 'passed': False}, config.out)
        return EXIT_GATE

    report = result.report
    coarse_M = spec.M // 2
    if config.orders and coarse_M >= 8:
        coarse_spec = _spec(config, coarse_M)
        try:
            coarse = GleasonPipeline(coarse_spec, cutoff, **_pipeline_options(config)).decompose(g)
        except KoszulError as exc:
            logger.warning(f"order estimate skipped, M={coarse_M} failed: {exc}")
            coarse = None
        table = tabulate([coarse_spec, spec], [coarse, result])
        report.order_estimates = ConvergenceStudy(table, True).order_estimates()

    _write_json(result.to_dict(), config.out)
    if config.fields_out:
        fields = {'g': sample(g, spec)}
        fields.update({f'g{j}': gj for j, gj in enumerate(result.g_components, start=1)})
        export_fields_csv(fields, config.fields_out)
    return EXIT_OK if result.passed else EXIT_GATE


def cmd_laws(config) -> int:
    """Run the exact law suite; exit 1 on any violation."""
    from verify.law_suite import run_law_suite

    summary = run_law_suite(config.seed, config.trials, inject_sign_error=config.inject_sign_error)
    _write_json(summary.to_dict(), config.out)
    return EXIT_OK if summary.passed else EXIT_GATE


def _form_from_fields(fields, n):
    components = {}
    for name, values in fields.items():
        J, K = parse_basis(name, n, 1)
        if J.degree:
            raise ConfigError(f"field column {name!r} carries e-generators; dbar data is a (0,s)-form")
        components[(ExteriorIndex(), K)] = values
    degrees = {K.degree for _, K in components}
    if len(degrees) != 1:
        raise ConfigError(f"field columns mix form degrees {sorted(degrees)}")
    return KoszulForm(n, 0, degrees.pop(), components)


def _beta(config, spec):
    n = config.n
    if config.field_file is not None:
        return _form_from_fields(import_fields_csv(config.field_file, spec), n)
    path = config.form_file or config.potential_file
    with open(path, 'r', encoding='utf-8') as f:
        form = parse_form(f.read(), n)
    if form.r != 0:
        raise ConfigError(f"{path}: expected a (0,s)-form, got ({form.r},{form.s})")
    if config.potential_file is not None:
        form = dbar_form(form)
    if form.s < 1:
        raise ConfigError(f"{path}: dbar data needs s >= 1, got s={form.s}")
    return form.map_coefficients(lambda p: sample(p, spec))


def cmd_dbar(config) -> int:
    """Solve dbar u = beta; exit 0 iff the residual meets its tolerance."""
    spec = _spec(config, config.M[0])
    beta = _beta(config, spec)
    beta_max = form_max(beta, config.rho)
    tolerance = config.tol_hol if config.tol_hol is not None else DBAR_TOL_REL * beta_max
    payload = {'grid': {**spec.echo(), 'rho': config.rho}, 'degree': [beta.r, beta.s], 'tolerance': tolerance}

    solver = DbarSolver(spec, method=config.method, workers=KOSZUL_THREADS)
    try:
        solution = solver.solve(DbarProblem(beta, spec, rho=config.rho))
    except ClosednessError as exc:
        logger.error(f"closedness gate: {exc}")
        payload.update({'error': str(exc), 'closedness': exc.measured,
                        'closedness_tolerance': exc.tolerance, 'passed': False})
        _write_json(payload, config.out)
        return EXIT_GATE
    except SolverBreakdownError as exc:
        logger.error(f"solver breakdown: {exc}")
        payload.update({'error': str(exc), 'passed': False})
        _write_json(payload, config.out)
        return EXIT_GATE

    passed = solution.residual <= tolerance
    payload.update({'solution': solution.to_dict(), 'passed': passed})
    _write_json(payload, config.out)
    if config.fields_out and not solution.u.is_zero():
        export_fields_csv({f"u_{'^'.join(f'dzb{k}' for k in K.indices) or '1'}": w
                           for (_, K), w in solution.u.items()}, config.fields_out)
    logger.info(f"{'✅' if passed else '❌'} residual {solution.residual:.3e} vs tolerance {tolerance:.3e}")
    return EXIT_OK if passed else EXIT_GATE


def cmd_converge(config) -> int:
    """Run the convergence study; CSV table to --out (or stdout)."""
    from verify.convergence import convergence_study

    g = _input(config)
    specs = [_spec(config, M) for M in config.M]
    study = convergence_study(g, config.basepoint, specs, _cutoff(config), **_pipeline_options(config))
    if config.out:
        os.makedirs(os.path.dirname(os.path.abspath(config.out)), exist_ok=True)
        study.to_csv(config.out)
    else:
        print(study.table.to_csv(index=False, float_format='%.6e'))
    return EXIT_OK if study.accepted else EXIT_GATE


COMMAND_TABLE = {
    'decompose': cmd_decompose,
    'laws': cmd_laws,
    'dbar': cmd_dbar,
    'converge': cmd_converge,
}


# ========== PARSER ==========

def _add_grid_flags(p):
    p.add_argument('--n', type=int, help="dimension (1..3)")
    p.add_argument('--M', help="grid size per axis; converge takes a list such as 16,32")
    p.add_argument('--rho', type=float, help="interior factor for residuals")
    p.add_argument('--centers', help="disc centres, comma separated complex numbers")
    p.add_argument('--radii', help="disc radii, comma separated")
    p.add_argument('--method', choices=('fft', 'direct'), help="Cauchy transform evaluation")


def _add_input_flags(p):
    p.add_argument('--fn', help=f"registry function ({', '.join(list_functions())})")
    p.add_argument('--poly-file', help="polynomial input file")
    p.add_argument('--alpha', help="basepoint, comma separated complex numbers")
    p.add_argument('--r-in', type=float, help="cutoff inner radius (relative)")
    p.add_argument('--r-out', type=float, help="cutoff outer radius (relative)")
    p.add_argument('--tol-id', type=float, help="absolute identity tolerance")
    p.add_argument('--tol-hol', type=float, help="absolute holomorphy tolerance")
    p.add_argument('--norm', choices=('sup', 'l2'), help="norm of the holomorphy gate")


def build_parser():
    parser = argparse.ArgumentParser(prog='koszul', description="Gleason decompositions on polydiscs")
    parser.add_argument('--config', help="key = value configuration file")
    parser.add_argument('--log-level', help="loguru level (default KOSZUL_LOG_LEVEL)")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('decompose', help="decompose g = sum (z_j - alpha_j) g_j")
    _add_grid_flags(p)
    _add_input_flags(p)
    p.add_argument('--out', help="JSON report path (stdout if omitted)")
    p.add_argument('--fields-out', help="CSV dump of g and g_j")
    p.add_argument('--no-orders', dest='orders', action='store_false', default=None,
                   help="skip the M/2 run used for order estimates")

    p = sub.add_parser('laws', help="exact Koszul law suite")
    p.add_argument('--seed', type=int)
    p.add_argument('--trials', type=int)
    p.add_argument('--out', help="JSON summary path (stdout if omitted)")
    p.add_argument('--inject-sign-error', action='store_true', default=None,
                   help="flip the anti-derivation sign to test the harness")

    p = sub.add_parser('dbar', help="solve dbar u = beta on the polydisc grid")
    _add_grid_flags(p)
    p.add_argument('--form-file', help="(0,s)-form text, e.g. 'dzb1 : zb2'")
    p.add_argument('--potential-file', help="(0,s-1)-form text; beta is its dbar")
    p.add_argument('--field-file', help="CSV snapshot with dzb... columns")
    p.add_argument('--tol-hol', type=float, help="absolute residual tolerance")
    p.add_argument('--out', help="JSON report path (stdout if omitted)")
    p.add_argument('--fields-out', help="CSV dump of u")

    p = sub.add_parser('converge', help="convergence study over several M")
    _add_grid_flags(p)
    _add_input_flags(p)
    p.add_argument('--out', help="CSV table path (stdout if omitted)")
    return parser


def main(argv=None) -> int:
    """
    Entry point.

    Returns:
        int: exit code 0, 1 or 2
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG

    configure_logging(args.log_level)
    flags = {k: v for k, v in vars(args).items() if k not in ('command', 'config', 'log_level')}
    try:
        config = build_run_config(args.command, flags, args.config)
        return COMMAND_TABLE[args.command](config)
    except CONFIG_ERRORS as exc:
        logger.error(f"configuration error: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KoszulError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_GATE
