# tests/test_lifts.py
import numpy as np
import pytest

from algebra.exterior import HolomorphicMap, dbar_form, tau
from algebra.symbolic import PolyExpr
from gleason.cutoff import CutoffSpec, build_cutoff
from gleason.lifts import assemble_W, build_lifts, exact_W, lift_form, offsets, surrogate_lifts
from gleason.taylor_split import exact_split, taylor_split
from grid.polydisc import GridField, PolydiscSpec, interior_max, sample
from utils.error_handler import GateError
from utils.function_registry import get_function


def grid_lifts(name, M, n=2):
    spec = PolydiscSpec.unit(n, M=M)
    alpha = (0j,) * n
    cutoff = CutoffSpec(alpha)
    g = get_function(name, n)
    split = taylor_split(g, alpha, spec, cutoff)
    chi = build_cutoff(cutoff, spec)
    return spec, chi, sample(g, spec), build_lifts(sample(g, spec), alpha, split, chi, spec, cutoff)


@pytest.mark.parametrize("name", ['z1', 'bilinear', 'expsum'])
def test_lift_identity_is_exact(name):
    spec, _, g, lifts = grid_lifts(name, 16)
    assert lifts.n == 2
    assert lifts.identity_residual <= 1e-12 * max(1.0, interior_max(g))


def test_lifts_follow_the_cutoff():
    spec, chi, g, lifts = grid_lifts('bilinear', 16)
    f = offsets(spec, (0j, 0j))
    S = sum(np.abs(fj) ** 2 for fj in f)
    core = (chi.values == 1) & spec.mask
    outside = (chi.values == 0) & spec.mask
    lam = exact_split(get_function('bilinear', 2).poly)
    for j in range(2):
        L = lifts.L[j].values
        assert np.max(np.abs(L[core] - sample(lam[j], spec).values[core])) <= 1e-12
        expected = g.values * np.conj(f[j]) / np.where(S > 0, S, 1.0)
        assert np.max(np.abs(L[outside] - expected[outside])) <= 1e-12


def test_quotient_guard_inside_the_core():
    spec = PolydiscSpec.unit(2, M=16)
    alpha = (0j, 0j)
    cutoff = CutoffSpec(alpha)
    g = get_function('z1', 2)
    split = taylor_split(g, alpha, spec, cutoff)
    with pytest.raises(GateError) as info:
        build_lifts(sample(g, spec), alpha, split, GridField.zeros(spec), spec, cutoff)
    assert info.value.stage == 'lifts'


def test_stencil_floor_shrinks_with_the_grid():
    gaps = []
    for M in (16, 32):
        _, _, _, lifts = grid_lifts('bilinear', M)
        gap = assemble_W(lifts) - exact_W(lifts)
        gaps.append(max(interior_max(w) for _, w in gap.items()))
    assert gaps[1] < gaps[0] / 2


def test_exact_w_needs_closed_form_derivatives(z):
    lifts = surrogate_lifts(z(2, 1), (PolyExpr.one(2), PolyExpr.zero(2)))
    with pytest.raises(ValueError):
        exact_W(lifts)


@pytest.mark.parametrize("n", [2, 3])
def test_surrogate_lifts_satisfy_the_descent_hypotheses(z, n):
    g = z(n, 1) * z(n, 2) + z(n, 2) * z(n, 2)
    lifts = surrogate_lifts(g, exact_split(g))
    F = HolomorphicMap(tuple(z(n, j) for j in range(1, n + 1)))

    rebuilt = sum((z(n, j) * lifts.L[j - 1] for j in range(1, n + 1)), PolyExpr.zero(n))
    assert rebuilt == g

    W = assemble_W(lifts)
    assert (W.r, W.s) == (1, 1)
    assert dbar_form(W).is_zero()
    assert tau(F, W).is_zero()
    assert (lift_form(lifts).r, lift_form(lifts).s) == (1, 0)
