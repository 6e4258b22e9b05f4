# grid/field_io.py
"""
CSV snapshots of grid fields.

One row per grid node in C order: coordinate columns x1, y1, ..., xn, yn,
a `mask` column, then `<name>_re`, `<name>_im` for every field.
"""

import os

import numpy as np
import pandas as pd
from loguru import logger

from grid.polydisc import GridField, PolydiscSpec
from utils.error_handler import SpecMismatchError


def _coordinate_columns(spec: PolydiscSpec):
    columns = {}
    grids = np.meshgrid(*[nodes for j in range(1, spec.n + 1) for nodes in spec.axis_nodes(j)],
                        indexing='ij')
    for j in range(1, spec.n + 1):
        ax, ay = spec.axes(j)
        columns[f"x{j}"] = grids[ax].ravel()
        columns[f"y{j}"] = grids[ay].ravel()
    return columns


def fields_to_frame(fields, masked_only=False):
    """
    Build a DataFrame from {name: GridField}.

    Args:
        fields (dict): Fields over one common spec
        masked_only (bool): Keep only nodes inside the polydisc
    """
    fields = dict(fields)
    if not fields:
        raise ValueError("no fields to export")
    spec = next(iter(fields.values())).spec
    columns = _coordinate_columns(spec)
    columns['mask'] = spec.mask.ravel().astype(int)
    for name, field in fields.items():
        if field.spec != spec:
            raise SpecMismatchError(f"field {name!r} lives on a different grid")
        columns[f"{name}_re"] = field.values.real.ravel()
        columns[f"{name}_im"] = field.values.imag.ravel()
    frame = pd.DataFrame(columns)
    if masked_only:
        frame = frame[frame['mask'] == 1].reset_index(drop=True)
    return frame


def export_fields_csv(fields, path, masked_only=False):
    """Write fields to CSV with round-trip float precision."""
    frame = fields_to_frame(fields, masked_only=masked_only)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    frame.to_csv(path, index=False, float_format='%.17g')
    logger.info(f"✓ Wrote {len(fields)} field(s), {len(frame)} rows to {path}")
    return path


def import_fields_csv(path, spec: PolydiscSpec):
    """
    Read a full-grid snapshot written by export_fields_csv.

    Returns:
        dict: name -> GridField

    Raises:
        SpecMismatchError: if the file does not cover spec's grid
    """
    frame = pd.read_csv(path)
    if len(frame) != spec.size:
        raise SpecMismatchError(f"{path}: {len(frame)} rows, grid needs {spec.size}")

    expected = _coordinate_columns(spec)
    for name, column in expected.items():
        if name not in frame.columns:
            raise SpecMismatchError(f"{path}: missing coordinate column {name}")
        if not np.allclose(frame[name].to_numpy(), column, rtol=0, atol=1e-9 * max(spec.radii)):
            raise SpecMismatchError(f"{path}: column {name} does not match the grid")

    fields = {}
    for column in frame.columns:
        if column.endswith('_re'):
            name = column[:-3]
            imag = frame.get(f"{name}_im")
            values = frame[column].to_numpy() + 1j * (imag.to_numpy() if imag is not None else 0)
            fields[name] = GridField(spec, values.reshape(spec.shape), copy=False)
    logger.info(f"✓ Read {len(fields)} field(s) from {path}")
    return fields
