# gleason/gates.py
"""
Numerical gates of the pipeline.

Every check becomes a GateRecord. A failed gate is only recorded (it drives
the exit status); a measurement beyond BREAKDOWN_FACTOR x tolerance, or a
non-finite one, raises GateError naming the stage.
"""

from dataclasses import asdict, dataclass
from typing import List

import numpy as np
from loguru import logger

from config.settings import BREAKDOWN_FACTOR, GATE_FACTOR
from utils.error_handler import GateError

ABS_FLOOR = 1e-12


@dataclass(frozen=True)
class GateRecord:
    name: str
    stage: str
    measured: float
    tolerance: float
    passed: bool

    def to_dict(self):
        return asdict(self)


class GatePolicy:
    """
    Tolerances relative to the stencil floor measured on the lifts.

    tolerance(scale) = gate_factor * floor_rel * scale + ABS_FLOOR * scale
    """

    def __init__(self, floor_rel, gate_factor=GATE_FACTOR, breakdown_factor=BREAKDOWN_FACTOR):
        """
        Args:
            floor_rel (float): max |fd_dbar(L) - dbar L| / max |dbar L|
            gate_factor (float): Allowed multiple of the floor
            breakdown_factor (float): Multiple of the tolerance that aborts the run
        """
        if not np.isfinite(floor_rel) or floor_rel < 0:
            raise GateError('floor', f"stencil floor is not a finite non-negative number: {floor_rel}")
        self.floor_rel = float(floor_rel)
        self.gate_factor = gate_factor
        self.breakdown_factor = breakdown_factor
        self.records: List[GateRecord] = []

    def tolerance(self, scale):
        return (self.gate_factor * self.floor_rel + ABS_FLOOR) * float(scale)

    def breakdown(self, scale):
        """Threshold beyond which a measurement aborts the run."""
        return self.breakdown_factor * self.tolerance(scale)

    def check(self, stage, name, measured, scale) -> GateRecord:
        """
        Record measured against tolerance(scale).

        Raises:
            GateError: on a non-finite measurement or a breakdown
        """
        return self.record(stage, name, measured, self.tolerance(scale))

    def record(self, stage, name, measured, tolerance) -> GateRecord:
        """Record against an explicit tolerance (same breakdown rule)."""
        measured, tolerance = float(measured), float(tolerance)
        if not np.isfinite(measured):
            raise GateError(stage, f"{name} is not finite", measured=measured, tolerance=tolerance)

        gate = GateRecord(name, stage, measured, tolerance, measured <= tolerance)
        self.records.append(gate)
        if gate.passed:
            logger.debug(f"gate {stage}/{name}: {measured:.3e} <= {tolerance:.3e}")
        else:
            logger.warning(f"gate {stage}/{name} failed: {measured:.3e} > {tolerance:.3e}")
        if measured > self.breakdown_factor * tolerance:
            logger.error(f"gate {stage}/{name} broke down")
            raise GateError(stage, f"{name} = {measured:.3e} exceeds {self.breakdown_factor:g} x tolerance "
                                   f"{tolerance:.3e}", measured=measured, tolerance=tolerance)
        return gate

    def failed(self):
        return [g for g in self.records if not g.passed]

    def to_list(self):
        return [g.to_dict() for g in self.records]
