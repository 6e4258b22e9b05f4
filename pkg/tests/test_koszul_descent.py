# tests/test_koszul_descent.py
import numpy as np
import pytest

from algebra.exterior import HolomorphicMap, KoszulForm, descent_residual, tau
from gleason.cutoff import CutoffSpec, build_cutoff, support_cutoff
from gleason.gates import GatePolicy
from gleason.koszul_descent import KoszulDescent, build_X, koszul_descent
from gleason.lifts import assemble_W, build_lifts
from gleason.taylor_split import taylor_split
from grid.polydisc import GridField, PolydiscSpec, sample
from solvers.dbar_solver import form_max
from utils.error_handler import GateError
from utils.function_registry import get_function
from verify.residuals import offset_fields


def grid_setup(M=16):
    spec = PolydiscSpec.unit(2, M=M)
    alpha = (0j, 0j)
    cutoff = CutoffSpec(alpha)
    F = HolomorphicMap(offset_fields(spec, alpha), zero_locus_hint=alpha)
    X = build_X(F, support_cutoff(cutoff, spec), spec, min_denominator=0.01 * (1 - 1e-9))
    return spec, alpha, cutoff, F, X


def test_symbolic_witness(z, zb):
    F = HolomorphicMap((z(2, 1), z(2, 2)))
    W = KoszulForm(2, 1, 1, {((1,), (1,)): -z(2, 2), ((2,), (1,)): z(2, 1)})
    Y = KoszulForm.basis(2, (1, 2), (), zb(2, 1))
    assert descent_residual(Y, W, F).is_zero()


def test_x_contracts_to_the_support_cutoff():
    spec, _, cutoff, F, X = grid_setup()
    chi_supp = support_cutoff(cutoff, spec)
    contracted = tau(F, X).component((), ())
    gap = np.where(spec.mask, contracted.values - chi_supp.values, 0)
    assert np.max(np.abs(gap)) <= 1e-14
    assert (X.r, X.s) == (1, 0)


def test_x_guard_near_the_zero():
    spec, _, _, F, _ = grid_setup()
    with pytest.raises(GateError) as info:
        build_X(F, GridField.constant(spec, 1.0), spec)
    assert info.value.stage == 'build_X'


def test_zero_data_gives_zero_solution():
    spec, _, _, F, X = grid_setup()
    result = koszul_descent(KoszulForm(2, 1, 1), F, spec, X, GatePolicy(1e-3), width=0.2)
    assert result.Y.is_zero()
    assert (result.Y.r, result.Y.s) == (2, 0)
    assert result.solves == []


def test_degree_outside_descent_range():
    spec, _, _, F, X = grid_setup()
    descent = KoszulDescent(F, X, spec, GatePolicy(1e-3), width=0.2)
    with pytest.raises(ValueError):
        descent.descend(KoszulForm(2, 2, 1))
    with pytest.raises(ValueError):
        descent.descend(KoszulForm(2, 1, 0))


def test_top_degree_descent_on_the_grid():
    spec, alpha, cutoff, F, X = grid_setup()
    g = get_function('z1', 2)
    split = taylor_split(g, alpha, spec, cutoff)
    lifts = build_lifts(sample(g, spec), alpha, split, build_cutoff(cutoff, spec), spec, cutoff)
    W = assemble_W(lifts)

    policy = GatePolicy(1e-3)
    result = koszul_descent(W, F, spec, X, policy, width=0.2, rho=spec.shrink)
    assert result.depth == 1
    assert result.solve_counts() == {1: 1}
    assert (result.Y.r, result.Y.s) == (2, 0)
    assert np.isfinite(result.contract)
    assert result.contract <= 0.25 * form_max(W, spec.shrink)
    names = {gate.name for gate in result.gates}
    assert {'tau_vanishes', 'core_support', 'contract'} <= names
