# tests/test_pipeline.py
import numpy as np
import pytest

from algebra.symbolic import PolyExpr
from config.settings import GATE_FACTOR, HOL_REDUCTION
from gleason.cutoff import CutoffSpec, build_cutoff
from gleason.lifts import build_lifts
from gleason.taylor_split import taylor_split
from gleason_pipeline import GleasonPipeline, gleason_decompose
from grid.holomorphic_input import HolomorphicInput
from grid.polydisc import GridField, PolydiscSpec, sample
from solvers.cauchy_transform import CauchyTransform
from utils.error_handler import (
    DimensionMismatchError,
    GateError,
    GridSpecError,
    SpecMismatchError,
    VanishingError,
)
from utils.function_registry import get_function
from verify.residuals import verify_decomposition

ORIGIN = (0j, 0j)


@pytest.fixture(scope='module')
def bilinear_run():
    spec = PolydiscSpec.unit(2, M=16)
    g = get_function('bilinear', 2)
    return spec, g, gleason_decompose(g, ORIGIN, spec)


def test_coordinate_input_passes():
    spec = PolydiscSpec.unit(2, M=16)
    result = gleason_decompose(get_function('z1', 2), ORIGIN, spec)
    assert result.report.R_id <= 1e-8
    assert result.passed
    assert result.descent['depth'] == 1
    assert result.descent['solve_counts'] == {'(0,1)': 1}


def test_bilinear_report(bilinear_run):
    spec, _, result = bilinear_run
    report = result.report
    assert report.R_id <= 1e-8 * max(1.0, report.g_sup)
    assert report.is_finite()
    assert len(result.g_components) == 2
    assert all(gj.spec == spec for gj in result.g_components)
    assert {g['name'] for g in report.gates} == {'identity', 'holomorphy g1', 'holomorphy g2', 'finite'}
    assert report.stage_gates
    assert result.fd_floor['solve'] > 0
    tolerances = report.tolerances
    assert tolerances['holomorphy'] == pytest.approx(
        HOL_REDUCTION * tolerances['uncorrected']['sup'] + GATE_FACTOR * tolerances['stencil_floor']['sup']
        + 1e-12 * max(1.0, report.g_sup))


def test_report_serializes(bilinear_run):
    _, _, result = bilinear_run
    payload = result.to_dict()
    assert set(payload) >= {'grid', 'residuals', 'norms', 'tolerances', 'gates', 'order_estimates',
                            'passed', 'descent'}
    assert payload['grid']['M'] == 16
    assert payload['descent']['depth'] == 1


def test_verify_reproduces_the_pipeline_report(bilinear_run):
    spec, g, result = bilinear_run
    report = verify_decomposition(g, ORIGIN, result, spec)
    assert report.R_id == pytest.approx(result.report.R_id, rel=1e-12, abs=1e-15)
    assert report.R_hol == pytest.approx(result.report.R_hol, rel=1e-12)
    assert report.passed == result.report.passed


def test_gauge_change_keeps_the_identity(bilinear_run):
    spec, g, result = bilinear_run
    h = sample(PolyExpr.z(2, 1) + 2 * PolyExpr.z(2, 2) * PolyExpr.z(2, 2), spec)
    z1, z2 = (GridField(spec, spec.coords(j)) for j in (1, 2))
    g1, g2 = result.g_components
    moved = (g1 + z2 * h, g2 - z1 * h)
    before = verify_decomposition(g, ORIGIN, result, spec)
    after = verify_decomposition(g, ORIGIN, moved, spec)
    assert abs(after.R_id - before.R_id) <= 1e-10


def test_exact_witness_passes_verification():
    spec = PolydiscSpec.unit(2, M=16)
    z2 = sample(PolyExpr.z(2, 2), spec)
    report = verify_decomposition(get_function('bilinear', 2), ORIGIN, (z2, z2), spec)
    assert report.R_id <= 1e-12
    assert max(report.R_hol) <= 1e-10
    assert report.passed


def test_zero_decomposition_is_detected():
    spec = PolydiscSpec.unit(2, M=16)
    zero = GridField.zeros(spec)
    report = verify_decomposition(get_function('z1', 2), ORIGIN, (zero, zero), spec)
    assert 0.8 <= report.R_id <= 0.9
    assert not report.passed
    assert not next(g for g in report.gates if g['name'] == 'identity')['passed']


def test_one_variable_decomposition_is_the_quotient():
    spec = PolydiscSpec.unit(1, M=32)
    result = gleason_decompose(get_function('expsum', 1), (0j,), spec)
    assert result.descent is None
    assert result.passed
    (g1,) = result.g_components

    def quotient(z):
        small = np.abs(z) < 1e-12
        return np.where(small, 1.0, np.expm1(z) / np.where(small, 1.0, z))

    expected = sample(quotient, spec)
    region = spec.interior_mask()
    assert np.max(np.abs(g1.values[region] - expected.values[region])) <= 1e-10


def test_shifted_basepoint():
    alpha = (0.1 + 0j, -0.1j)
    spec = PolydiscSpec.unit(2, M=16)
    result = gleason_decompose(get_function('bilinear', 2, basepoint=alpha), alpha, spec)
    assert result.report.R_id <= 1e-8
    assert result.passed


def test_deterministic_reports():
    spec = PolydiscSpec.unit(2, M=16)
    g = get_function('expsum', 2)
    first = gleason_decompose(g, ORIGIN, spec).to_dict()
    second = gleason_decompose(g, ORIGIN, spec).to_dict()
    assert first == second


def test_input_errors():
    spec = PolydiscSpec.unit(2, M=16)
    with pytest.raises(VanishingError):
        gleason_decompose(HolomorphicInput.from_callable(lambda z1, z2: np.exp(z1), 2), ORIGIN, spec)
    with pytest.raises(DimensionMismatchError):
        GleasonPipeline(spec).decompose(get_function('z1', 1))
    with pytest.raises(GridSpecError):
        gleason_decompose(get_function('z1', 2), (0.1 + 0j, 0j), spec)
    with pytest.raises(GridSpecError):
        GleasonPipeline(spec, CutoffSpec((0.2 + 0j, 0j))).decompose(get_function('z1', 2))
    with pytest.raises(GridSpecError):
        GleasonPipeline(PolydiscSpec.unit(4, M=8))


def test_verify_rejects_fields_on_another_grid(bilinear_run):
    _, g, result = bilinear_run
    with pytest.raises(SpecMismatchError):
        verify_decomposition(g, ORIGIN, result, PolydiscSpec.unit(2, M=24))


def test_weakened_correction_fails_the_holomorphy_gate(monkeypatch):
    original = CauchyTransform.apply
    monkeypatch.setattr(CauchyTransform, 'apply', lambda self, f, method='fft': original(self, f, method) * 0.1)
    spec = PolydiscSpec.unit(2, M=16)
    g = get_function('bilinear', 2)
    result = gleason_decompose(g, ORIGIN, spec)

    # the identity is algebraic and survives any correction
    assert result.report.R_id <= 1e-8 * max(1.0, result.report.g_sup)
    assert not result.passed
    holomorphy = [gate for gate in result.report.gates if gate['name'].startswith('holomorphy')]
    assert not all(gate['passed'] for gate in holomorphy)
    assert not verify_decomposition(g, ORIGIN, result, spec).passed


def test_missing_correction_breaks_down(monkeypatch):
    monkeypatch.setattr(CauchyTransform, 'apply', lambda self, f, method='fft': f * 0.0)
    with pytest.raises(GateError) as info:
        gleason_decompose(get_function('bilinear', 2), ORIGIN, PolydiscSpec.unit(2, M=16))
    assert info.value.stage == 'descent[0]'


def test_uncorrected_lifts_fail_verification(bilinear_run):
    spec, g, result = bilinear_run
    cutoff = CutoffSpec(ORIGIN)
    split = taylor_split(g, ORIGIN, spec, cutoff)
    lifts = build_lifts(sample(g, spec), ORIGIN, split, build_cutoff(cutoff, spec), spec, cutoff)

    report = verify_decomposition(g, ORIGIN, lifts.L, spec)
    assert report.R_id <= 1e-10
    assert max(report.R_hol) == pytest.approx(report.tolerances['uncorrected']['sup'])
    assert not report.passed
    assert max(result.report.R_hol) <= report.tolerances['holomorphy']


@pytest.mark.parametrize("n", [1, 2])
def test_one_variable_input_decomposes_in_any_dimension(n):
    spec = PolydiscSpec.unit(n, M=32)
    g = HolomorphicInput.from_callable(lambda *z: np.expm1(z[0]) + 0 * z[-1], n, name='expm1_z1')
    result = gleason_decompose(g, (0j,) * n, spec)
    gates = {gate['name']: gate['passed'] for gate in result.report.gates}
    assert gates['identity']
    assert all(gates[f'holomorphy g{j}'] for j in range(1, n + 1))
    assert result.passed
