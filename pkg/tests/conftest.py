# tests/conftest.py
import os
import sys

import pytest

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from algebra.symbolic import PolyExpr  # noqa: E402


@pytest.fixture
def z():
    """z(n, j) -> the polynomial z_j."""
    return PolyExpr.z


@pytest.fixture
def zb():
    """zb(n, j) -> the polynomial conj(z_j)."""
    return PolyExpr.zbar
