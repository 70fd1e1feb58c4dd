"""
coamoeba_utils.py

Shared utilities for the coamoeba modules.

This module contains the pieces used by every other module:
- The error hierarchy, each error carrying its CLI exit code
- fail(): log-then-raise helper
- Angle arithmetic in radians and in exact rational multiples of pi
- TorusPoint, the argument vector type shared by all modules
- Parsing of coefficient and angle literals from JSON problem files

Exact angles are stored "over pi": the Fraction q stands for q * pi and is
kept reduced to [0, 2) unless stated otherwise.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import NoReturn

from coamoeba_config import CoamoebaConfig

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Exact numbers accepted wherever a coefficient or angle may be rational
Exact = int | Fraction


# ============================================================================
# ERRORS
# ============================================================================


class CoamoebaError(Exception):
    """Base error; exit_code is what the CLI returns for it."""

    exit_code: int = CoamoebaConfig.EXIT_VALIDATION


class ValidationError(CoamoebaError):
    """Input does not satisfy an operation's precondition."""

    exit_code = CoamoebaConfig.EXIT_VALIDATION


class WrongCardinality(ValidationError):
    """Point count differs from dimension + 2."""


class NotFullDimensional(ValidationError):
    """The augmented point matrix is rank deficient."""


class DegenerateInput(ValidationError):
    """Zero coefficient, empty polynomial or wrong dimension."""


class NotSpecialOrthogonalForm(ValidationError):
    """Configuration is not in special orthogonal form."""


class NoAdmissibleChoice(ValidationError):
    """No monomial pairing satisfies the interior-line check."""


class NotInComplement(ValidationError):
    """Argument vector lies in the closed lopsided coamoeba."""


class InvalidProblemSpec(ValidationError):
    """Malformed JSON problem file."""


class DegeneracyError(CoamoebaError):
    """Mathematically degenerate situation, reported rather than guessed."""

    exit_code = CoamoebaConfig.EXIT_DEGENERACY


class DegenerateCircuit(DegeneracyError):
    """Some maximal minor vanishes (pyramid)."""


class NonUnimodularKernelBasis(DegeneracyError):
    """Kernel-row transform is invertible over Q but not over Z."""


class SingularExponentMatrix(DegeneracyError):
    """Binomial system with det M = 0."""


class EmptyCurve(DegeneracyError):
    """No fiber produced a root."""


class IdenticallyZeroResultant(DegeneracyError):
    """Resultant vanishes identically (common factor)."""


class DegenerateEdgePolynomial(DegeneracyError):
    """Edge truncation lost its leading or trailing term."""


class SingularElimination(DegeneracyError):
    """No elimination pair yields two genuine trinomials."""


class NonGenericSystem(DegeneracyError):
    """System has infinitely many or no isolated roots."""


class NumericallyIndeterminate(CoamoebaError):
    """Result sits inside the tolerance band of a boundary."""

    exit_code = CoamoebaConfig.EXIT_INDETERMINATE


def fail(error_type: type[CoamoebaError], msg: str) -> NoReturn:
    """
    Log an error message and raise it as the given error type.

    Args:
        error_type: CoamoebaError subclass to raise
        msg: Error message

    Raises:
        CoamoebaError: Always raised after logging
    """
    logger.error(msg)
    raise error_type(msg)


# ============================================================================
# ANGLES
# ============================================================================


def reduce_angle(angle: float) -> float:
    """Reduce radians to [0, 2*pi), folding values within tolerance of 2*pi onto 0."""
    reduced = math.fmod(angle, TWO_PI)
    if reduced < 0.0:
        reduced += TWO_PI
    if TWO_PI - reduced <= CoamoebaConfig.ANGLE_TOLERANCE:
        return 0.0
    return reduced


def arg_pi(z: complex) -> float:
    """Principal argument in (-pi, pi]."""
    phase = cmath.phase(z)
    return math.pi if phase <= -math.pi else phase


def principal_angle(angle: float) -> float:
    """Map radians to (-pi, pi]."""
    reduced = reduce_angle(angle)
    return reduced - TWO_PI if reduced > math.pi else reduced


def angular_distance(a: float, b: float) -> float:
    """Distance on the circle, in [0, pi]."""
    d = reduce_angle(a - b)
    return min(d, TWO_PI - d)


def reduce_over_pi(q: Fraction) -> Fraction:
    """Reduce an exact angle over pi to [0, 2)."""
    return q % 2


def principal_over_pi(q: Fraction) -> Fraction:
    """Map an exact angle over pi to (-1, 1]."""
    r = q % 2
    return r - 2 if r > 1 else r


def radians_from_over_pi(q: Fraction) -> float:
    """Float radians for an exact multiple of pi."""
    return float(q) * math.pi


def unit_from_over_pi(q: Fraction) -> complex:
    """exp(i*q*pi), exact for multiples of pi/2."""
    r = q % 2
    exact_units = {Fraction(0): 1 + 0j, Fraction(1, 2): 1j, Fraction(1): -1 + 0j, Fraction(3, 2): -1j}
    if r in exact_units:
        return exact_units[r]
    return cmath.exp(1j * math.pi * float(r))


def exact_argument(z: complex) -> Fraction | None:
    """Exact argument over pi for nonzero values on the coordinate axes, else None."""
    if z.imag == 0.0 and z.real > 0.0:
        return Fraction(0)
    if z.imag == 0.0 and z.real < 0.0:
        return Fraction(1)
    if z.real == 0.0 and z.imag > 0.0:
        return Fraction(1, 2)
    if z.real == 0.0 and z.imag < 0.0:
        return Fraction(3, 2)
    return None


def format_over_pi(value: Fraction | float) -> str | float:
    """Serialize an angle over pi: "p/q" when exact, float otherwise."""
    if isinstance(value, Fraction):
        return str(value)
    return float(value)


# ============================================================================
# TORUS POINTS
# ============================================================================


@dataclass(frozen=True)
class TorusPoint:
    """
    An argument vector on the real n-torus.

    Attributes:
        angles: Radians, each reduced to [0, 2*pi)
        exact: Optional exact angles over pi, each in [0, 2)
    """

    angles: tuple[float, ...]
    exact: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "angles", tuple(reduce_angle(a) for a in self.angles))
        if self.exact is not None:
            exact = tuple(reduce_over_pi(Fraction(q)) for q in self.exact)
            object.__setattr__(self, "exact", exact)
            object.__setattr__(self, "angles", tuple(radians_from_over_pi(q) for q in exact))

    @classmethod
    def from_over_pi(cls, values: Iterable[Exact | str]) -> TorusPoint:
        """Build an exact point from multiples of pi (ints, Fractions or "p/q" strings)."""
        exact = tuple(Fraction(v) for v in values)
        return cls(angles=tuple(radians_from_over_pi(q) for q in exact), exact=exact)

    @classmethod
    def from_radians(cls, values: Iterable[float]) -> TorusPoint:
        return cls(angles=tuple(float(v) for v in values))

    @property
    def dimension(self) -> int:
        return len(self.angles)

    def over_pi(self) -> tuple[Fraction | float, ...]:
        """Angles over pi, exact when available."""
        if self.exact is not None:
            return self.exact
        return tuple(a / math.pi for a in self.angles)

    def distance(self, other: TorusPoint) -> float:
        """Max of componentwise angular distances."""
        return max(
            (angular_distance(a, b) for a, b in zip(self.angles, other.angles, strict=True)),
            default=0.0,
        )

    def shifted(self, other: TorusPoint) -> TorusPoint:
        """Componentwise sum mod 2*pi."""
        if self.exact is not None and other.exact is not None:
            return TorusPoint.from_over_pi(a + b for a, b in zip(self.exact, other.exact, strict=True))
        return TorusPoint.from_radians(a + b for a, b in zip(self.angles, other.angles, strict=True))


# ============================================================================
# PARSING
# ============================================================================


def parse_exact(value: object) -> Fraction:
    """
    Parse an exact rational from an int, Fraction or "p/q" string.

    Args:
        value: The literal to parse

    Returns:
        The Fraction

    Raises:
        InvalidProblemSpec: If the literal is not an exact rational
    """
    if isinstance(value, bool):
        fail(InvalidProblemSpec, f"Expected a rational literal, got boolean {value!r}")
    if isinstance(value, int | Fraction):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidProblemSpec(f"Invalid rational literal {value!r}: {e}") from e
    fail(InvalidProblemSpec, f"Expected a rational literal, got {value!r}")


def parse_angle_over_pi(value: object) -> Fraction | float:
    """Parse an angle over pi: exact when given as int/"p/q", float otherwise."""
    if isinstance(value, float):
        return value
    return parse_exact(value)


def integer_vectors(points: Sequence[Sequence[object]]) -> tuple[tuple[int, ...], ...]:
    """
    Coerce nested sequences to a tuple of integer tuples.

    Raises:
        InvalidProblemSpec: If some entry is not an integer
    """
    result: list[tuple[int, ...]] = []
    for point in points:
        coords: list[int] = []
        for value in point:
            if isinstance(value, bool) or not isinstance(value, int):
                fail(InvalidProblemSpec, f"Point coordinates must be integers, got {value!r} in {point!r}")
            coords.append(value)
        result.append(tuple(coords))
    return tuple(result)
