# tests/test_residuals.py
import pytest

from algebra.symbolic import PolyExpr
from config.settings import GATE_FACTOR, HOL_REDUCTION
from grid.polydisc import GridField, PolydiscSpec, sample
from utils.error_handler import SpecMismatchError
from verify.residuals import compute_residuals, offset_fields

UNCORRECTED = {'sup': 0.0, 'l2': 0.0}


@pytest.fixture
def witness():
    """g = z1 z2 + z2^2 with the exact split (z2, z2)."""
    spec = PolydiscSpec.unit(2, M=16)
    z1, z2 = PolyExpr.z(2, 1), PolyExpr.z(2, 2)
    g = sample(z1 * z2 + z2 * z2, spec)
    return spec, g, (sample(z2, spec), sample(z2, spec))


def test_exact_witness(witness):
    spec, g, components = witness
    report = compute_residuals(g, components, (0j, 0j), spec, UNCORRECTED)
    assert report.R_id <= 1e-12
    assert report.passed
    assert report.g_sup > 0
    assert report.sup_norms[0] == pytest.approx(report.sup_norms[1])
    assert report.grid['rho'] == spec.shrink
    assert report.tolerances['norm'] == 'sup'


def test_l2_norm_mode(witness):
    spec, g, components = witness
    report = compute_residuals(g, components, (0j, 0j), spec, UNCORRECTED, norm='l2')
    assert report.tolerances['norm'] == 'l2'
    assert report.passed


def test_holomorphy_gate_catches_conjugates(witness):
    spec, g, (g1, g2) = witness
    # move zbar1 between the components: the identity survives, holomorphy does not
    bump = sample(PolyExpr.zbar(2, 1), spec)
    z1, z2 = offset_fields(spec, (0j, 0j))
    report = compute_residuals(g, (g1 + z2 * bump, g2 - z1 * bump), (0j, 0j), spec, UNCORRECTED)
    assert report.R_id <= 1e-12
    assert min(report.R_hol) > 0.5
    assert [gate['passed'] for gate in report.gates] == [True, False, False, True]


def test_absolute_overrides(witness):
    spec, g, _ = witness
    zero = GridField.zeros(spec)
    strict = compute_residuals(g, (zero, zero), (0j, 0j), spec, UNCORRECTED)
    loose = compute_residuals(g, (zero, zero), (0j, 0j), spec, UNCORRECTED, tol_id=10.0)
    assert not strict.passed and loose.passed
    assert loose.tolerances['identity'] == 10.0


def test_shape_errors(witness):
    spec, g, (g1, _) = witness
    with pytest.raises(SpecMismatchError):
        compute_residuals(g, (g1,), (0j, 0j), spec, UNCORRECTED)
    other = GridField.zeros(PolydiscSpec.unit(2, M=8))
    with pytest.raises(SpecMismatchError):
        compute_residuals(g, (g1, other), (0j, 0j), spec, UNCORRECTED)
    with pytest.raises(ValueError):
        compute_residuals(g, (g1, g1), (0j, 0j), spec, UNCORRECTED, norm='max')


def test_report_dict(witness):
    spec, g, components = witness
    payload = compute_residuals(g, components, (0j, 0j), spec, UNCORRECTED).to_dict()
    assert payload['residuals']['R_id'] <= 1e-12
    assert len(payload['norms']['sup']) == 2
    assert payload['passed'] is True


def test_holomorphy_tolerance_follows_the_uncorrected_defect(witness):
    spec, g, (g1, g2) = witness
    bump = sample(PolyExpr.zbar(2, 1), spec)
    z1, z2 = offset_fields(spec, (0j, 0j))
    moved = (g1 + z2 * bump, g2 - z1 * bump)
    R_hol = compute_residuals(g, moved, (0j, 0j), spec, UNCORRECTED).R_hol

    generous = {'sup': 2 * max(R_hol) / HOL_REDUCTION, 'l2': 0.0}
    assert compute_residuals(g, moved, (0j, 0j), spec, generous).passed

    tight = {'sup': 0.5 * min(R_hol) / HOL_REDUCTION, 'l2': 0.0}
    report = compute_residuals(g, moved, (0j, 0j), spec, tight)
    assert not report.passed
    tolerances = report.tolerances
    assert tolerances['uncorrected']['sup'] == tight['sup']
    assert tolerances['holomorphy'] == pytest.approx(
        HOL_REDUCTION * tight['sup'] + GATE_FACTOR * tolerances['stencil_floor']['sup'] + 1e-12 * max(1.0, report.g_sup))


def test_stencil_floor_comes_from_the_input(witness):
    spec, g, components = witness
    # a quadratic is differentiated exactly by the fourth-order stencils
    floor = compute_residuals(g, components, (0j, 0j), spec, UNCORRECTED).tolerances['stencil_floor']
    assert floor['sup'] <= 1e-12
    assert floor['l2'] <= 1e-12
