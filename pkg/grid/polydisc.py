# grid/polydisc.py
"""
Polydisc discretization.

Each complex variable z_j gets an M x M Cartesian grid on the bounding square
of its disc, with nodes x_k = Re(c_j) - R_j + k*h_j, k = 0..M-1 and
h_j = 2 R_j / M (so the disc centre is a node). A field over the polydisc is a
dense array of shape (M,)*2n with axes ordered (x_1, y_1, x_2, y_2, ...).

The mask is the strict interior of the open polydisc. Quadrature uses the
exact area of each cell intersected with the disc; coverage of cells whose
node lies outside the disc is handed to the nearest masked node, so the total
weight equals the disc area and only masked nodes carry weight.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from numbers import Number
from typing import Tuple

import numpy as np
from loguru import logger
from scipy import integrate

from config.settings import DEFAULT_M, DEFAULT_RHO
from utils.error_handler import GridSpecError, NonFiniteSampleError, SpecMismatchError


@dataclass(frozen=True)
class PolydiscSpec:
    """Product of n discs plus grid resolution and interior shrink factor."""

    n: int
    centers: Tuple[complex, ...]
    radii: Tuple[float, ...]
    M: int = DEFAULT_M
    shrink: float = DEFAULT_RHO

    def __post_init__(self):
        object.__setattr__(self, 'centers', tuple(complex(c) for c in self.centers))
        object.__setattr__(self, 'radii', tuple(float(r) for r in self.radii))
        if self.n < 1:
            raise GridSpecError(f"dimension must be positive, got {self.n}")
        if len(self.centers) != self.n or len(self.radii) != self.n:
            raise GridSpecError(f"need {self.n} centers and radii, got {len(self.centers)} and {len(self.radii)}")
        if any(not np.isfinite(r) or r <= 0 for r in self.radii):
            raise GridSpecError(f"radii must be positive, got {self.radii}")
        if self.M < 8 or self.M % 2:
            raise GridSpecError(f"M must be even and at least 8, got {self.M}")
        if not 0 < self.shrink < 1:
            raise GridSpecError(f"shrink must lie in (0,1), got {self.shrink}")

    @classmethod
    def unit(cls, n, M=DEFAULT_M, shrink=DEFAULT_RHO):
        """Unit polydisc centred at the origin."""
        return cls(n, (0j,) * n, (1.0,) * n, M, shrink)

    # ========== GEOMETRY ==========

    @property
    def shape(self):
        return (self.M,) * (2 * self.n)

    @property
    def size(self):
        return self.M ** (2 * self.n)

    def h(self, j):
        """Grid spacing of variable j (1-based)."""
        return 2.0 * self.radii[j - 1] / self.M

    @property
    def h_min(self):
        return min(self.h(j) for j in range(1, self.n + 1))

    def axes(self, j):
        """Array axes (x_j, y_j) of variable j."""
        return 2 * (j - 1), 2 * (j - 1) + 1

    def axis_nodes(self, j):
        """Real node coordinates (x, y) of variable j."""
        c, R = self.centers[j - 1], self.radii[j - 1]
        k = np.arange(self.M)
        return c.real - R + k * self.h(j), c.imag - R + k * self.h(j)

    def disc_coords(self, j):
        """M x M complex node values z_j[ix, iy]."""
        x, y = self.axis_nodes(j)
        return x[:, None] + 1j * y[None, :]

    def expand(self, j, plane):
        """Reshape an M x M array of variable j so it broadcasts over the full grid."""
        shape = [1] * (2 * self.n)
        ax, ay = self.axes(j)
        shape[ax] = shape[ay] = self.M
        return np.reshape(plane, shape)

    def coords(self, j):
        """z_j as a broadcastable array over the full grid."""
        return self.expand(j, self.disc_coords(j))

    @cached_property
    def disc_masks(self):
        return tuple(
            np.abs(self.disc_coords(j) - self.centers[j - 1]) < self.radii[j - 1]
            for j in range(1, self.n + 1)
        )

    def disc_mask(self, j):
        return self.disc_masks[j - 1]

    @cached_property
    def mask(self):
        full = np.ones(self.shape, dtype=bool)
        for j in range(1, self.n + 1):
            full = full & self.expand(j, self.disc_mask(j))
        full.flags.writeable = False
        return full

    def interior_mask(self, rho=None):
        """Masked nodes with |z_j - c_j| <= rho * R_j for every j."""
        rho = self.shrink if rho is None else rho
        if not 0 < rho <= 1:
            raise GridSpecError(f"interior factor must lie in (0,1], got {rho}")
        region = np.ones(self.shape, dtype=bool)
        for j in range(1, self.n + 1):
            c, R = self.centers[j - 1], self.radii[j - 1]
            plane = self.disc_mask(j) & (np.abs(self.disc_coords(j) - c) <= rho * R)
            region = region & self.expand(j, plane)
        return region

    # ========== QUADRATURE ==========

    @cached_property
    def disc_weight_tables(self):
        return tuple(
            coverage_weights(self.centers[j - 1], self.radii[j - 1], self.M)
            for j in range(1, self.n + 1)
        )

    def disc_weights(self, j):
        """Per-node area weights of disc j (zero off the mask)."""
        return self.disc_weight_tables[j - 1]

    @cached_property
    def weights(self):
        full = np.ones(self.shape)
        for j in range(1, self.n + 1):
            full = full * self.expand(j, self.disc_weights(j))
        full.flags.writeable = False
        return full

    def echo(self):
        """Plain-data summary for reports."""
        return {
            'n': self.n,
            'centers': [[c.real, c.imag] for c in self.centers],
            'radii': list(self.radii),
            'M': self.M,
            'h': [self.h(j) for j in range(1, self.n + 1)],
            'shrink': self.shrink,
        }


def _cell_disc_area(x0, x1, y0, y1, cx, cy, R):
    """Area of [x0,x1] x [y0,y1] intersected with the disc |w - c| < R."""

    def chord(x):
        half = np.sqrt(max(R * R - (x - cx) ** 2, 0.0))
        return max(0.0, min(y1, cy + half) - max(y0, cy - half))

    breaks = [cx - R, cx + R]
    for y in (y0, y1):
        d = R * R - (y - cy) ** 2
        if d > 0:
            breaks.extend((cx - np.sqrt(d), cx + np.sqrt(d)))
    points = sorted(b for b in breaks if x0 < b < x1)
    area, _ = integrate.quad(chord, x0, x1, points=points or None,
                             epsabs=1e-14 * (x1 - x0) ** 2, limit=200)
    return area


@lru_cache(maxsize=32)
def coverage_weights(center, R, M):
    """
    Cell-coverage quadrature weights for one disc.

    Args:
        center (complex): Disc centre
        R (float): Disc radius
        M (int): Nodes per axis

    Returns:
        np.ndarray: M x M weights summing to pi R^2, nonzero only at masked nodes
    """
    h = 2.0 * R / M
    cx, cy = center.real, center.imag
    x = cx - R + np.arange(M) * h
    y = cy - R + np.arange(M) * h
    X, Y = np.meshgrid(x, y, indexing='ij')

    dx_near = np.maximum(np.abs(X - cx) - h / 2, 0.0)
    dy_near = np.maximum(np.abs(Y - cy) - h / 2, 0.0)
    near = np.hypot(dx_near, dy_near)
    far = np.hypot(np.abs(X - cx) + h / 2, np.abs(Y - cy) + h / 2)

    weights = np.where(far <= R, h * h, 0.0)
    boundary = np.argwhere((far > R) & (near < R))
    for ix, iy in boundary:
        weights[ix, iy] = _cell_disc_area(x[ix] - h / 2, x[ix] + h / 2,
                                          y[iy] - h / 2, y[iy] + h / 2, cx, cy, R)

    mask = np.hypot(X - cx, Y - cy) < R
    stray = np.argwhere(~mask & (weights > 0))
    inside = np.argwhere(mask)
    for ix, iy in stray:
        d2 = (inside[:, 0] - ix) ** 2 + (inside[:, 1] - iy) ** 2
        tx, ty = inside[int(np.argmin(d2))]
        weights[tx, ty] += weights[ix, iy]
        weights[ix, iy] = 0.0

    logger.debug(f"coverage weights: M={M}, {len(boundary)} boundary cells, "
                 f"{len(stray)} moved, area error {weights.sum() - np.pi * R * R:.2e}")
    weights.flags.writeable = False
    return weights


# ========== FIELDS ==========

class GridField:
    """
    Complex field sampled on every node of a PolydiscSpec grid.

    Immutable. Arithmetic with another GridField requires the same spec;
    numbers broadcast.
    """

    __slots__ = ('spec', '_values')
    __array_ufunc__ = None

    def __init__(self, spec: PolydiscSpec, values, copy=True):
        values = np.asarray(values, dtype=complex)
        if values.shape != spec.shape:
            values = np.broadcast_to(values, spec.shape)
            copy = True
        if copy or not values.flags.c_contiguous:
            values = np.array(values, dtype=complex, copy=True)
        values.flags.writeable = False
        self.spec = spec
        self._values = values

    @classmethod
    def zeros(cls, spec):
        return cls(spec, np.zeros(spec.shape, dtype=complex), copy=False)

    @classmethod
    def constant(cls, spec, value):
        return cls(spec, np.full(spec.shape, complex(value)))

    @property
    def values(self):
        return self._values

    @property
    def mask(self):
        return self.spec.mask

    def masked_values(self):
        """Values with everything off the mask set to 0."""
        return np.where(self.spec.mask, self._values, 0)

    def _other(self, other):
        if isinstance(other, GridField):
            if other.spec is not self.spec and other.spec != self.spec:
                raise SpecMismatchError("fields live on different polydisc grids")
            return other._values
        if isinstance(other, Number):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._other(other)
        return NotImplemented if v is NotImplemented else GridField(self.spec, self._values + v, copy=False)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        return NotImplemented if v is NotImplemented else GridField(self.spec, self._values - v, copy=False)

    def __rsub__(self, other):
        v = self._other(other)
        return NotImplemented if v is NotImplemented else GridField(self.spec, v - self._values, copy=False)

    def __mul__(self, other):
        v = self._other(other)
        return NotImplemented if v is NotImplemented else GridField(self.spec, self._values * v, copy=False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Number):
            return NotImplemented
        return GridField(self.spec, self._values / other, copy=False)

    def __neg__(self):
        return GridField(self.spec, -self._values, copy=False)

    def conj(self):
        return GridField(self.spec, np.conj(self._values), copy=False)

    def dbar(self, j):
        return fd_dbar(self, j)

    def is_zero(self):
        return not np.any(self._values)

    def __repr__(self):
        return f"GridField(n={self.spec.n}, M={self.spec.M}, max|f|={np.max(np.abs(self._values)):.3e})"


def sample(f, spec: PolydiscSpec) -> GridField:
    """
    Sample an evaluator, PolyExpr or HolomorphicInput at every grid node.

    Non-finite values off the mask are replaced by 0.

    Raises:
        NonFiniteSampleError: if any masked node samples to NaN or inf
    """
    coords = [spec.coords(j) for j in range(1, spec.n + 1)]
    with np.errstate(all='ignore'):
        if hasattr(f, 'evaluate'):
            values = f.evaluate(coords)
        else:
            values = f(*coords)
    values = np.broadcast_to(np.asarray(values, dtype=complex), spec.shape)

    bad = ~np.isfinite(values)
    if bad.any():
        masked_bad = bad & spec.mask
        if masked_bad.any():
            node = tuple(int(i) for i in np.argwhere(masked_bad)[0])
            raise NonFiniteSampleError(f"{int(masked_bad.sum())} non-finite masked samples, first at node {node}")
        logger.debug(f"zeroed {int(bad.sum())} non-finite samples off the mask")
        values = np.where(bad, 0, values)
    return GridField(spec, values)


# ========== FINITE DIFFERENCES ==========

@lru_cache(maxsize=64)
def _stencil_weights(offsets):
    """First-derivative weights at 0 for integer node offsets, unit spacing."""
    L = len(offsets)
    V = np.vander(np.asarray(offsets, dtype=float), L, increasing=True).T
    rhs = np.zeros(L)
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


def _run_extents(mask2d):
    """Masked neighbours available before/after each node along axis 0."""
    M = mask2d.shape[0]
    before = np.zeros(mask2d.shape, dtype=int)
    after = np.zeros(mask2d.shape, dtype=int)
    for a in range(1, M):
        before[a] = np.where(mask2d[a] & mask2d[a - 1], before[a - 1] + 1, 0)
    for a in range(M - 2, -1, -1):
        after[a] = np.where(mask2d[a] & mask2d[a + 1], after[a + 1] + 1, 0)
    return before, after


@lru_cache(maxsize=32)
def _derivative_plan(spec: PolydiscSpec, j: int, direction: int):
    """
    Offset -> M x M weight plane for d/dx (direction 0) or d/dy (direction 1) on disc j.

    Five-point stencils, shifted inside the mask near its edge; runs shorter
    than five nodes use every node they have.
    """
    mask2d = spec.disc_mask(j)
    m = mask2d if direction == 0 else mask2d.T
    before, after = _run_extents(m)
    length = np.minimum(5, before + after + 1)
    lo = np.maximum(-((length - 1) // 2), -before)
    lo = np.minimum(lo, after - (length - 1))

    plan = {}
    h = spec.h(j)
    for L, start in sorted(set(zip(length[m].tolist(), lo[m].tolist()))):
        if L < 2:
            continue
        selected = m & (length == L) & (lo == start)
        for offset, w in zip(range(start, start + L), _stencil_weights(tuple(range(start, start + L)))):
            plane = plan.setdefault(offset, np.zeros(m.shape))
            plane[selected] += w / h
    if direction == 1:
        plan = {o: p.T.copy() for o, p in plan.items()}
    return {o: spec.expand(j, p) for o, p in sorted(plan.items())}


def _partial(values, spec, j, direction):
    axis = spec.axes(j)[direction]
    out = np.zeros(values.shape, dtype=complex)
    for offset, plane in _derivative_plan(spec, j, direction).items():
        out += np.roll(values, -offset, axis=axis) * plane
    return out


def fd_dbar(f: GridField, j: int) -> GridField:
    """
    Wirtinger derivative d/dzbar_j = (d/dx_j + i d/dy_j)/2 by fourth-order differences.

    Stencils only read masked nodes; the result is zero off the mask.
    """
    spec = f.spec
    if not 1 <= j <= spec.n:
        raise ValueError(f"axis {j} outside 1..{spec.n}")
    values = f.values
    result = 0.5 * (_partial(values, spec, j, 0) + 1j * _partial(values, spec, j, 1))
    return GridField(spec, np.where(spec.mask, result, 0), copy=False)


def interior_max(f: GridField, rho=None) -> float:
    """
    Max |f| over masked nodes with |z_j - c_j| <= rho R_j for all j.

    Raises:
        GridSpecError: if no node qualifies
    """
    region = f.spec.interior_mask(rho)
    if not region.any():
        raise GridSpecError(f"no grid node inside the interior region (rho={rho})")
    return float(np.max(np.abs(f.values[region])))


def l2_norm(f: GridField, rho=None) -> float:
    """
    Quadrature L2 norm over the polydisc, optionally restricted to the rho-interior.
    """
    density = np.abs(f.values) ** 2 * f.spec.weights
    if rho is not None:
        density = np.where(f.spec.interior_mask(rho), density, 0.0)
    return float(np.sqrt(np.sum(density)))
