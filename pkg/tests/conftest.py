"""
Pytest configuration and fixtures for the coamoeba modules.

Quick Start
-----------

1. Use the named circuits, each a validated PointConfiguration::

    def test_my_invariant(quadratic, unit_square):
        assert profile(quadratic).raw_gale == (1, -2, 1)

2. Build coefficient vectors with `exact_coeffs` (integers or "p/q" arguments
   over pi stay exact) or `polar_coeffs`::

    def test_with_coefficients(hypocycloid):
        coeffs = exact_coeffs(1, 1, 1, -3)

3. Randomized tests take the seeded `rng` fixture so every run sees the same
   draws. Full-scale runs are marked `slow`::

    pytest -m "not slow"

4. Problem files for CLI tests come from `write_problem(tmp_path, name, data)`.

5. Property tests draw exact angles from the `angles_over_pi(size)` strategy.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from coamoeba_config import CoamoebaConfig
from integer_geometry import PointConfiguration, validate
from phase_engine import CoefficientVector

# =============================================================================
# Named Circuits
# =============================================================================

QUADRATIC = ((0,), (1,), (2,))
CENTRED_QUADRATIC = ((-1,), (0,), (1,))
UNIT_SQUARE = ((0, 0), (1, 0), (0, 1), (1, 1))
HYPOCYCLOID = ((0, 0), (1, 2), (2, 1), (1, 1))
VERTEX_FAMILY = ((0, 0), (1, 0), (0, 3), (3, 1))
NON_EQUIMODULAR = ((0, 0), (2, 0), (0, 1), (1, 1))
PLANAR_SIMPLEX = ((0, 0), (1, 0), (0, 1), (-1, -1))


@pytest.fixture
def quadratic() -> PointConfiguration:
    """{0, 1, 2}: 1 + z + xi z^2."""
    return validate(QUADRATIC)


@pytest.fixture
def centred_quadratic() -> PointConfiguration:
    """{-1, 0, 1}, already in special orthogonal form."""
    return validate(CENTRED_QUADRATIC)


@pytest.fixture
def unit_square() -> PointConfiguration:
    return validate(UNIT_SQUARE)


@pytest.fixture
def hypocycloid() -> PointConfiguration:
    """Support of 1 + z w^2 + z^2 w - 3 z w."""
    return validate(HYPOCYCLOID)


@pytest.fixture
def vertex_family() -> PointConfiguration:
    """Support of 1 + z1 + z2^3 + xi z1^3 z2."""
    return validate(VERTEX_FAMILY)


@pytest.fixture
def non_equimodular() -> PointConfiguration:
    return validate(NON_EQUIMODULAR)


@pytest.fixture
def planar_simplex() -> PointConfiguration:
    """Unimodular triangle around the origin, Vol 3."""
    return validate(PLANAR_SIMPLEX)


# =============================================================================
# Randomness
# =============================================================================


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator; identical draws on every run."""
    return np.random.default_rng(CoamoebaConfig.DEFAULT_SEED)


@pytest.fixture
def project_root() -> Path:
    """Return the project root directory."""
    return Path(__file__).parent.parent


# =============================================================================
# Helper Functions
# =============================================================================


def exact_coeffs(*values: int) -> CoefficientVector:
    """Nonzero integer coefficients; arguments are exactly 0 or 1 (over pi)."""
    return CoefficientVector.from_complex(values)


def polar_coeffs(moduli: Sequence[float], arguments_over_pi: Sequence[int | str | float]) -> CoefficientVector:
    """Coefficients r_k e^(i pi a_k); int and "p/q" arguments stay exact."""
    args = [a if isinstance(a, float) else Fraction(a) for a in arguments_over_pi]
    return CoefficientVector.from_polar(list(moduli), args)


def write_problem(tmp_path: Path, name: str, data: object) -> Path:
    """Write a JSON problem file under tmp_path and return its path."""
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


# =============================================================================
# Hypothesis Strategies
# =============================================================================


@st.composite
def angles_over_pi(draw: st.DrawFn, size: int) -> list[Fraction]:
    """Exact angles p/q in [0, 2) with small denominators."""
    denominators = st.integers(min_value=1, max_value=12)
    values = []
    for _ in range(size):
        q = draw(denominators)
        p = draw(st.integers(min_value=0, max_value=2 * q - 1))
        values.append(Fraction(p, q))
    return values
