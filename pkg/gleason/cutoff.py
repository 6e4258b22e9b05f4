# gleason/cutoff.py
"""
Smooth cutoff chi around the basepoint.

    rho(z) = sqrt(sum_j |z_j - alpha_j|^2 / R_j^2)
    chi(z) = sigma((r_out - rho) / (r_out - r_in))
    sigma(t) = psi(t) / (psi(t) + psi(1 - t)),  psi(t) = exp(-1/t^p) for t > 0, else 0

so chi = 1 for rho <= r_in, chi = 0 for rho >= r_out and 0 < chi < 1 between.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config.settings import DEFAULT_R_IN, DEFAULT_R_OUT
from grid.polydisc import GridField, PolydiscSpec
from utils.error_handler import GridSpecError


def _psi(t, p):
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, t, 1.0)
    return np.where(t > 0, np.exp(-1.0 / safe ** p), 0.0)


def _dpsi(t, p):
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, t, 1.0)
    return np.where(t > 0, p * safe ** (-p - 1) * np.exp(-1.0 / safe ** p), 0.0)


def smooth_step(t, p=1.0):
    """sigma(t): 0 for t <= 0, 1 for t >= 1, C-infinity in between."""
    a, b = _psi(t, p), _psi(1.0 - np.asarray(t, dtype=float), p)
    return a / (a + b)


def smooth_step_derivative(t, p=1.0):
    t = np.asarray(t, dtype=float)
    a, b = _psi(t, p), _psi(1.0 - t, p)
    da, db = _dpsi(t, p), _dpsi(1.0 - t, p)
    return (da * b + a * db) / (a + b) ** 2


@dataclass(frozen=True)
class CutoffSpec:
    """
    Cutoff radii around alpha, relative to the polydisc radii.

    Attributes:
        center (tuple): alpha
        r_in (float): chi = 1 for scaled distance <= r_in
        r_out (float): chi = 0 for scaled distance >= r_out
        exponent (float): p in exp(-1/t^p), the smooth-step profile
    """

    center: Tuple[complex, ...]
    r_in: float = DEFAULT_R_IN
    r_out: float = DEFAULT_R_OUT
    exponent: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'center', tuple(complex(a) for a in self.center))
        if not 0 < self.r_in < self.r_out:
            raise GridSpecError(f"cutoff radii need 0 < r_in < r_out, got {self.r_in}, {self.r_out}")
        if self.exponent <= 0:
            raise GridSpecError(f"profile exponent must be positive, got {self.exponent}")

    def validate(self, spec: PolydiscSpec):
        """The closed r_out-ball around alpha must sit strictly inside the polydisc."""
        if len(self.center) != spec.n:
            raise GridSpecError(f"cutoff centre has {len(self.center)} coordinates, grid has n={spec.n}")
        for j in range(spec.n):
            c, R = spec.centers[j], spec.radii[j]
            if abs(self.center[j] - c) + self.r_out * R >= R:
                raise GridSpecError(
                    f"r_out-ball around alpha leaves disc {j + 1}: "
                    f"|alpha - c| + r_out R = {abs(self.center[j] - c) + self.r_out * R:.3f} >= R = {R}")
        return self

    def scaled(self, r_in, r_out):
        """Same centre and profile, other radii."""
        return CutoffSpec(self.center, r_in, r_out, self.exponent)


def scaled_distance(cutoff: CutoffSpec, spec: PolydiscSpec):
    """rho(z) over the full grid."""
    total = 0
    for j in range(1, spec.n + 1):
        offset = spec.coords(j) - cutoff.center[j - 1]
        total = total + np.abs(offset) ** 2 / spec.radii[j - 1] ** 2
    return np.broadcast_to(np.sqrt(total), spec.shape)


def _profile_argument(cutoff, rho):
    return (cutoff.r_out - rho) / (cutoff.r_out - cutoff.r_in)


def build_cutoff(cutoff: CutoffSpec, spec: PolydiscSpec) -> GridField:
    """chi sampled on the grid."""
    cutoff.validate(spec)
    rho = scaled_distance(cutoff, spec)
    return GridField(spec, smooth_step(_profile_argument(cutoff, rho), cutoff.exponent), copy=False)


def cutoff_dbar(cutoff: CutoffSpec, spec: PolydiscSpec, j: int) -> GridField:
    """
    Exact d chi / d zbar_j = sigma'(t) * (-1/(r_out - r_in)) * (z_j - alpha_j) / (2 R_j^2 rho).
    """
    rho = scaled_distance(cutoff, spec)
    t = _profile_argument(cutoff, rho)
    slope = smooth_step_derivative(t, cutoff.exponent)
    offset = np.broadcast_to(spec.coords(j) - cutoff.center[j - 1], spec.shape)
    safe_rho = np.where(rho > 0, rho, 1.0)
    drho = offset / (2 * spec.radii[j - 1] ** 2 * safe_rho)
    values = np.where(slope != 0, -slope / (cutoff.r_out - cutoff.r_in) * drho, 0)
    return GridField(spec, values, copy=False)


def support_cutoff(cutoff: CutoffSpec, spec: PolydiscSpec) -> GridField:
    """chi_supp = 1 - chi with radii (r_in/2, r_in): 0 near alpha, 1 wherever the lift derivatives live."""
    inner = cutoff.scaled(cutoff.r_in / 2, cutoff.r_in)
    return 1 - build_cutoff(inner, spec)
