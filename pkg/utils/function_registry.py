# utils/function_registry.py
"""
Named test functions for the CLI and the acceptance runs.
Every entry vanishes at the origin; a nonzero basepoint subtracts g(alpha).
"""

import numpy as np
from loguru import logger

from algebra.symbolic import PolyExpr
from grid.holomorphic_input import HolomorphicInput
from utils.error_handler import ConfigError


def _z1(n):
    return PolyExpr.z(n, 1)


def _zero(n):
    return PolyExpr.zero(n)


def _bilinear(n):
    z1, z2 = PolyExpr.z(n, 1), PolyExpr.z(n, 2)
    return z1 * z2 + z2 * z2


def _expsum(*z):
    return np.exp(sum(z)) - 1


def _sinpoly(*z):
    return np.sin(z[0]) + z[1] * np.exp(z[0])


# name -> (builder, kind, smallest n)
REGISTRY = {
    'z1': (_z1, 'poly', 1),
    'zero': (_zero, 'poly', 1),
    'bilinear': (_bilinear, 'poly', 2),
    'expsum': (_expsum, 'callable', 1),
    'sinpoly': (_sinpoly, 'callable', 2),
}


def list_functions():
    return sorted(REGISTRY)


def get_function(name, n, basepoint=None) -> HolomorphicInput:
    """
    Build a registry input in dimension n.

    Args:
        name (str): Registry key
        n (int): Dimension
        basepoint (tuple): alpha (default origin)

    Raises:
        ConfigError: for an unknown name or a dimension the function needs more of
    """
    if name not in REGISTRY:
        raise ConfigError(f"unknown function {name!r}; choose one of {', '.join(list_functions())}")
    builder, kind, min_n = REGISTRY[name]
    if n < min_n:
        raise ConfigError(f"function {name!r} needs n >= {min_n}, got n={n}")

    if kind == 'poly':
        g = HolomorphicInput.from_poly(builder(n), name=name)
    else:
        g = HolomorphicInput.from_callable(builder, n, name=name)
    if basepoint is None or not any(basepoint):
        return g

    moved = HolomorphicInput(n, basepoint, evaluator=g.evaluator, poly=g.poly, name=name)
    logger.debug(f"{name}: moved to alpha={moved.basepoint}, subtracting g(alpha)={moved.value_at_basepoint():.3e}")
    return moved.with_basepoint_shift()
