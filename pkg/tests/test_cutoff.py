# tests/test_cutoff.py
import numpy as np
import pytest

from gleason.cutoff import (
    CutoffSpec,
    build_cutoff,
    cutoff_dbar,
    scaled_distance,
    smooth_step,
    smooth_step_derivative,
    support_cutoff,
)
from grid.polydisc import PolydiscSpec, fd_dbar, interior_max
from utils.error_handler import GridSpecError


def test_smooth_step_profile():
    t = np.linspace(-0.5, 1.5, 81)
    sigma = smooth_step(t)
    assert np.all(sigma[t <= 0] == 0)
    assert np.all(sigma[t >= 1] == 1)
    assert np.all(np.diff(sigma) >= 0)
    assert smooth_step(0.5) == pytest.approx(0.5)
    assert smooth_step(0.3) + smooth_step(0.7) == pytest.approx(1.0)


def test_smooth_step_derivative_matches_difference_quotient():
    t = np.linspace(0.05, 0.95, 19)
    eps = 1e-6
    quotient = (smooth_step(t + eps) - smooth_step(t - eps)) / (2 * eps)
    assert np.allclose(smooth_step_derivative(t), quotient, atol=1e-6)
    assert smooth_step_derivative(0.5) == pytest.approx(2.0)


@pytest.mark.parametrize("n,M", [(1, 32), (2, 16)])
def test_cutoff_levels(n, M):
    spec = PolydiscSpec.unit(n, M=M)
    cutoff = CutoffSpec((0j,) * n)
    chi = build_cutoff(cutoff, spec).values
    rho = scaled_distance(cutoff, spec)
    assert np.all(chi[rho <= cutoff.r_in] == 1)
    assert np.all(chi[rho >= cutoff.r_out] == 0)
    assert np.all((chi >= 0) & (chi <= 1))
    assert chi[(M // 2,) * (2 * n)] == 1


def test_cutoff_decreases_along_a_ray():
    spec = PolydiscSpec.unit(1, M=64)
    chi = build_cutoff(CutoffSpec((0j,)), spec).values
    ray = chi[32:, 32]
    assert np.all(np.diff(ray) <= 0)


def test_exact_dbar_matches_stencil():
    spec = PolydiscSpec.unit(1, M=64)
    cutoff = CutoffSpec((0j,))
    chi = build_cutoff(cutoff, spec)
    exact = cutoff_dbar(cutoff, spec, 1)
    gap = interior_max(fd_dbar(chi, 1) - exact)
    assert gap <= 0.05 * interior_max(exact)


def test_exact_dbar_vanishes_off_the_transition():
    spec = PolydiscSpec.unit(2, M=16)
    cutoff = CutoffSpec((0j, 0j))
    rho = scaled_distance(cutoff, spec)
    for j in (1, 2):
        values = cutoff_dbar(cutoff, spec, j).values
        assert np.all(values[(rho <= cutoff.r_in) | (rho >= cutoff.r_out)] == 0)


def test_support_cutoff_vanishes_near_basepoint():
    spec = PolydiscSpec.unit(2, M=16)
    cutoff = CutoffSpec((0j, 0j))
    chi_supp = support_cutoff(cutoff, spec).values
    rho = scaled_distance(cutoff, spec)
    assert np.all(chi_supp[rho <= cutoff.r_in / 2] == 0)
    assert np.all(chi_supp[rho >= cutoff.r_in] == 1)


def test_cutoff_validation():
    with pytest.raises(GridSpecError):
        CutoffSpec((0j,), r_in=0.4, r_out=0.2)
    with pytest.raises(GridSpecError):
        CutoffSpec((0j,), exponent=0)
    with pytest.raises(GridSpecError):
        CutoffSpec((0.8 + 0j,)).validate(PolydiscSpec.unit(1, M=16))
    with pytest.raises(GridSpecError):
        CutoffSpec((0j,)).validate(PolydiscSpec.unit(2, M=16))
    assert CutoffSpec((0.3 + 0j,)).validate(PolydiscSpec.unit(1, M=16)).r_out == 0.4
