# tests/test_polydisc.py
import numpy as np
import pytest

from algebra.symbolic import PolyExpr, poly_dbar
from grid.field_io import export_fields_csv, fields_to_frame, import_fields_csv
from grid.holomorphic_input import HolomorphicInput
from grid.polydisc import (
    GridField,
    PolydiscSpec,
    coverage_weights,
    fd_dbar,
    interior_max,
    l2_norm,
    sample,
)
from utils.error_handler import (
    GridSpecError,
    NonFiniteSampleError,
    SpecMismatchError,
    VanishingError,
)


@pytest.fixture(scope='module')
def bidisc():
    return PolydiscSpec.unit(2, M=16)


@pytest.mark.parametrize("kwargs", [
    dict(M=15), dict(M=6), dict(shrink=1.0), dict(shrink=0.0),
])
def test_spec_validation(kwargs):
    with pytest.raises(GridSpecError):
        PolydiscSpec.unit(1, **kwargs)
    with pytest.raises(GridSpecError):
        PolydiscSpec(1, (0j,), (-1.0,))


def test_centre_is_a_node():
    spec = PolydiscSpec(1, (0.25 + 0.5j,), (0.5,), M=8)
    assert spec.disc_coords(1)[4, 4] == 0.25 + 0.5j
    assert spec.mask[4, 4]


def test_sample_constant_and_coordinates(bidisc):
    one = sample(lambda z1, z2: np.ones_like(z1 * z2), bidisc)
    assert np.all(one.values[bidisc.mask] == 1)

    z1 = sample(PolyExpr.z(2, 1), bidisc)
    assert np.array_equal(z1.values, np.broadcast_to(bidisc.coords(1), bidisc.shape))


def test_sample_exp_at_centre(bidisc):
    f = sample(lambda z1, z2: np.exp(z1 + z2), bidisc)
    assert f.values[8, 8, 8, 8] == 1


def test_sample_rejects_non_finite_inside_mask():
    spec = PolydiscSpec.unit(1, M=16)
    with pytest.raises(NonFiniteSampleError):
        sample(lambda z: 1 / z, spec)
    # pole on the circle, off the strict mask: zeroed silently
    f = sample(lambda z: 1 / (z + 1), spec)
    assert np.all(np.isfinite(f.values))


def test_fields_need_same_spec(bidisc):
    other = PolydiscSpec.unit(2, M=18)
    with pytest.raises(SpecMismatchError):
        GridField.zeros(bidisc) + GridField.zeros(other)


def test_fd_dbar_exact_on_low_degree(bidisc):
    n = 2
    zb1 = sample(PolyExpr.zbar(n, 1), bidisc)
    assert interior_max(fd_dbar(zb1, 1) - 1) <= 1e-10
    assert interior_max(fd_dbar(zb1, 2)) <= 1e-10

    holo = sample(PolyExpr.z(n, 1) ** 2 * PolyExpr.z(n, 2), bidisc)
    assert interior_max(fd_dbar(holo, 1)) <= 1e-8
    assert interior_max(fd_dbar(holo, 2)) <= 1e-8


def test_fd_dbar_matches_symbolic_oracle(bidisc):
    p = PolyExpr.z(2, 1) * PolyExpr.zbar(2, 1)
    error = fd_dbar(sample(p, bidisc), 1) - sample(poly_dbar(p, 1), bidisc)
    assert interior_max(error) <= 1e-9


def test_fd_dbar_converges_on_degree_six():
    p = PolyExpr.z(1, 1) ** 3 * PolyExpr.zbar(1, 1) ** 3
    errors = []
    for M in (16, 32):
        spec = PolydiscSpec.unit(1, M=M)
        oracle = sample(poly_dbar(p, 1), spec)
        errors.append(interior_max(fd_dbar(sample(p, spec), 1) - oracle))
    assert 0 < errors[1] <= errors[0] / 4


def test_fd_dbar_is_linear(bidisc):
    rng = np.random.default_rng(0)
    a = GridField(bidisc, rng.normal(size=bidisc.shape))
    b = GridField(bidisc, rng.normal(size=bidisc.shape))
    lhs = fd_dbar(a * 2 + b, 2)
    rhs = fd_dbar(a, 2) * 2 + fd_dbar(b, 2)
    assert np.max(np.abs((lhs - rhs).values)) <= 1e-9


def test_fd_dbar_zero_off_mask(bidisc):
    f = fd_dbar(sample(PolyExpr.zbar(2, 2), bidisc), 2)
    assert not np.any(f.values[~bidisc.mask])


def test_interior_max_examples():
    spec = PolydiscSpec.unit(1, M=64)
    assert interior_max(GridField.zeros(spec)) == 0
    assert interior_max(GridField.constant(spec, 1.0)) == 1
    assert abs(interior_max(sample(PolyExpr.z(1, 1), spec), 0.5) - 0.5) <= 1e-12
    with pytest.raises(GridSpecError):
        interior_max(GridField.zeros(spec), 0.0)


def test_l2_norm_examples():
    spec = PolydiscSpec.unit(1, M=32)
    assert l2_norm(GridField.zeros(spec)) == 0
    assert abs(l2_norm(GridField.constant(spec, 1.0)) - np.sqrt(np.pi)) <= 1e-9
    f = sample(lambda z: np.exp(z), spec)
    assert abs(l2_norm(f * (3 - 4j)) - 5 * l2_norm(f)) <= 1e-12 * l2_norm(f)


def test_norms_monotone_under_domination():
    spec = PolydiscSpec.unit(1, M=16)
    small = sample(lambda z: z / 2, spec)
    large = sample(lambda z: np.ones_like(z), spec)
    assert interior_max(small) <= interior_max(large)
    assert l2_norm(small) <= l2_norm(large)


def test_coverage_weights_cover_disc_area():
    weights = coverage_weights(0.3 + 0.2j, 0.7, 24)
    assert abs(weights.sum() - np.pi * 0.49) <= 1e-10
    spec = PolydiscSpec(1, (0.3 + 0.2j,), (0.7,), M=24)
    assert not np.any(weights[~spec.mask])
    assert np.all(weights[spec.mask] > 0)


def test_csv_round_trip(tmp_path, bidisc):
    f = sample(lambda z1, z2: np.exp(z1) * z2 + 1j, bidisc)
    path = export_fields_csv({'f': f}, str(tmp_path / 'f.csv'))
    back = import_fields_csv(path, bidisc)
    assert np.array_equal(back['f'].values, f.values)


def test_csv_masked_only_frame(bidisc):
    frame = fields_to_frame({'one': GridField.constant(bidisc, 1)}, masked_only=True)
    assert len(frame) == int(bidisc.mask.sum())
    assert list(frame.columns[:5]) == ['x1', 'y1', 'x2', 'y2', 'mask']


def test_csv_rejects_other_grid(tmp_path, bidisc):
    path = export_fields_csv({'f': GridField.zeros(bidisc)}, str(tmp_path / 'f.csv'))
    with pytest.raises(SpecMismatchError):
        import_fields_csv(path, PolydiscSpec.unit(2, M=18))


def test_holomorphic_input_vanishing_and_derivative():
    g = HolomorphicInput.from_callable(lambda z1, z2: np.exp(z1 + 2 * z2) - 1, 2)
    g.check_vanishing()
    point = [np.array(0.3 - 0.1j), np.array(0.2j)]
    exact = 2 * np.exp(0.3 - 0.1j + 0.4j)
    assert abs(g.derivative(2, point) - exact) <= 1e-11

    shifted = HolomorphicInput.from_callable(lambda z: np.exp(z), 1)
    with pytest.raises(VanishingError):
        shifted.check_vanishing()
    shifted.with_basepoint_shift().check_vanishing()


def test_holomorphic_input_rejects_zbar():
    with pytest.raises(ValueError):
        HolomorphicInput.from_poly(PolyExpr.zbar(1, 1))
