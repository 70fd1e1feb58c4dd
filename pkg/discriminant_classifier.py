"""
discriminant_classifier.py

The circuit A-discriminant and the U0/U1 split of the coefficient space.

For a circuit with primitive Gale vector b the discriminant is the binomial

    Delta(f) = c_plus * prod_{b_k < 0} f_k^(-b_k) - c_minus * prod_{b_k > 0} f_k^(b_k)

with c_plus = prod_{b_k > 0} b_k^(b_k) and c_minus = prod_{b_k < 0} b_k^(-b_k)
(signed bases). Dividing by the first product gives the reduced form
Delta_B(xi) = c_plus - c_minus * xi in the single variable xi = prod_k f_k^(b_k).

classify_space() decides U0 (Vol complement components) versus U1 (Vol - 1)
with the constructive test-point criterion; the closed-form sign inequality is
kept alongside as space_inequality().
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from coamoeba_config import CoamoebaConfig
from coamoeba_utils import (
    DegenerateInput,
    NumericallyIndeterminate,
    TorusPoint,
    fail,
    format_over_pi,
    reduce_over_pi,
)
from integer_geometry import (
    CircuitKind,
    CircuitProfile,
    CongruenceSystem,
    PointConfiguration,
    Support,
    profile,
    solve_congruences,
)
from numeric_kernel import BinomialSystem, UnivariatePoly, cluster_roots, roots, solve_binomial_system
from phase_engine import CoefficientVector, OverPi, gale_argument_sum

logger = logging.getLogger(__name__)


# ============================================================================
# DISCRIMINANT
# ============================================================================


@dataclass(frozen=True)
class CircuitDiscriminant:
    """
    The binomial discriminant of a circuit.

    Attributes:
        gale: Oriented primitive Gale vector
        plus_exponents: Exponent of f_k in the c_plus monomial (-b_k for b_k < 0)
        minus_exponents: Exponent of f_k in the c_minus monomial (b_k for b_k > 0)
        plus_constant: prod over b_k > 0 of b_k^b_k
        minus_constant: prod over b_k < 0 of b_k^(-b_k), sign included
    """

    gale: tuple[int, ...]
    plus_exponents: tuple[int, ...]
    minus_exponents: tuple[int, ...]
    plus_constant: int
    minus_constant: int

    def evaluate(self, values: Sequence[complex | Fraction | int]) -> complex | Fraction:
        """Delta at a coefficient vector; exact for rational input."""
        plus = math.prod((v**e for v, e in zip(values, self.plus_exponents, strict=True)), start=1)
        minus = math.prod((v**e for v, e in zip(values, self.minus_exponents, strict=True)), start=1)
        return self.plus_constant * plus - self.minus_constant * minus  # type: ignore[return-value]

    def reduced_variable(self, values: Sequence[complex]) -> complex:
        """xi = prod_k f_k^(b_k)."""
        return complex(np.prod([complex(v) ** b for v, b in zip(values, self.gale, strict=True)]))

    def reduced_polynomial(self) -> UnivariatePoly:
        """Delta_B(xi) = c_plus - c_minus * xi."""
        return UnivariatePoly.from_terms({0: self.plus_constant, 1: -self.minus_constant})

    def describe(self) -> str:
        """Human-readable reduced form, e.g. '1 - 4*xi'."""
        sign = "-" if self.minus_constant > 0 else "+"
        return f"{self.plus_constant} {sign} {abs(self.minus_constant)}*xi"

    def to_json(self) -> dict[str, object]:
        return {
            "gale": list(self.gale),
            "plus_exponents": list(self.plus_exponents),
            "minus_exponents": list(self.minus_exponents),
            "plus_constant": self.plus_constant,
            "minus_constant": self.minus_constant,
            "reduced_form": self.describe(),
        }


def discriminant(config: PointConfiguration) -> CircuitDiscriminant:
    """
    Build the binomial discriminant from the circuit profile.

    Raises:
        DegenerateCircuit: For pyramids

    Example:
        >>> discriminant(PointConfiguration(n=1, points=((0,), (1,), (2,)))).describe()
        '1 - 4*xi'
    """
    prof = profile(config)
    prof.require_nondegenerate()
    b = prof.primitive_gale
    plus_constant = math.prod((bk**bk for bk in b if bk > 0), start=1)
    minus_constant = math.prod(((bk) ** (-bk) for bk in b if bk < 0), start=1)
    result = CircuitDiscriminant(
        gale=b,
        plus_exponents=tuple(-bk if bk < 0 else 0 for bk in b),
        minus_exponents=tuple(bk if bk > 0 else 0 for bk in b),
        plus_constant=plus_constant,
        minus_constant=minus_constant,
    )
    logger.debug(f"[Discriminant] B={b}: Delta_B = {result.describe()}")
    return result


def discriminant_in(config: PointConfiguration, coeffs: CoefficientVector, kappa: int) -> UnivariatePoly:
    """
    Delta as a polynomial in the single coefficient f_kappa, the others fixed.

    Its roots are the coefficients f_kappa at which f acquires a singular point.
    """
    disc = discriminant(config)
    if not 0 <= kappa < config.size:
        fail(DegenerateInput, f"Coefficient index {kappa} outside 0..{config.size - 1}")
    values = list(coeffs.values)

    def rest(exponents: tuple[int, ...]) -> complex:
        return complex(np.prod([values[k] ** e for k, e in enumerate(exponents) if k != kappa]))

    plus = disc.plus_constant * rest(disc.plus_exponents)
    minus = disc.minus_constant * rest(disc.minus_exponents)
    terms: dict[int, complex] = {}
    terms[disc.plus_exponents[kappa]] = terms.get(disc.plus_exponents[kappa], 0) + plus
    terms[disc.minus_exponents[kappa]] = terms.get(disc.minus_exponents[kappa], 0) - minus
    return UnivariatePoly.from_terms(terms)


# ============================================================================
# DISCRIMINANT COAMOEBA
# ============================================================================


@dataclass(frozen=True)
class DiscriminantMembership:
    """
    Whether the phases can be rotated onto the Gale signs.

    Attributes:
        member: A solution (theta, phi) of fhat_k(theta) * e^{i phi} = delta_k exists
        witness: theta* of one solution
        phase_over_pi: phi of that solution
        scalar_agrees: The Gale-sum congruence gave the same answer
    """

    member: bool
    witness: TorusPoint | None = None
    phase_over_pi: OverPi | None = None
    scalar_agrees: bool = True


def _target_arguments(prof: CircuitProfile, coeffs: CoefficientVector) -> list[OverPi]:
    """(0 for delta_k = +1, 1 for delta_k = -1) - arg f_k, over pi."""
    return [(0 if s > 0 else 1) - a for s, a in zip(prof.signs, coeffs.arguments(), strict=True)]


def scalar_membership(config: Support, coeffs: CoefficientVector, prof: CircuitProfile) -> bool:
    """sum_k arg(f_k) b_k == sum_{b_k < 0} b_k (mod 2g), raw Gale vector, over pi."""
    b = prof.raw_gale
    g = prof.lattice_index
    s = gale_argument_sum(config, coeffs, b)
    target = sum(bk for bk in b if bk < 0)
    diff = s - target
    if isinstance(diff, Fraction):
        return diff % (2 * g) == 0
    r = math.fmod(diff, 2 * g)
    r = r + 2 * g if r < 0 else r
    tolerance = CoamoebaConfig.ANGLE_TOLERANCE / math.pi * max(1, sum(abs(x) for x in b))
    return min(r, 2 * g - r) <= tolerance


def in_discriminant_coamoeba(config: PointConfiguration, coeffs: CoefficientVector) -> DiscriminantMembership:
    """
    Test membership of the coefficient arguments in the discriminant coamoeba.

    Solves <a_k, theta> + phi == arg(delta_k) - arg(f_k) (mod 2*pi) by Smith
    normal form and cross-checks with the scalar Gale congruence.

    Raises:
        DegenerateCircuit: For pyramids
    """
    prof = profile(config)
    prof.require_nondegenerate()
    if coeffs.size != config.size:
        fail(DegenerateInput, f"{coeffs.size} coefficients for {config.size} points")
    lhs = [[*point, 1] for point in config.points]
    rhs = _target_arguments(prof, coeffs)
    if all(isinstance(r, Fraction) for r in rhs):
        system = CongruenceSystem.exact(lhs, [Fraction(r) for r in rhs])
    else:
        system = CongruenceSystem.radians(lhs, [math.pi * float(r) for r in rhs])
    solution = solve_congruences(system)
    scalar = scalar_membership(config, coeffs, prof)
    agrees = scalar == solution.consistent
    if not agrees:
        logger.warning(
            f"[Discriminant] congruence ({solution.consistent}) and scalar ({scalar}) tests disagree "
            f"for {config.points}"
        )
    point = solution.particular
    if not solution.consistent or point is None:
        return DiscriminantMembership(member=False, scalar_agrees=agrees)

    over_pi = point.over_pi()
    if point.exact is not None:
        witness = TorusPoint.from_over_pi(point.exact[: config.n])
        phase: OverPi = reduce_over_pi(point.exact[config.n])
    else:
        witness = TorusPoint.from_radians(point.angles[: config.n])
        phase = float(over_pi[config.n])
    return DiscriminantMembership(member=True, witness=witness, phase_over_pi=phase, scalar_agrees=agrees)


# ============================================================================
# SPACE CLASSIFICATION
# ============================================================================


class SpaceLabel(Enum):
    U0 = "U0"
    U1 = "U1"


class Certificate(Enum):
    OFF_DISCRIMINANT_COAMOEBA = "off_discriminant_coamoeba"
    TEST_POINT_IN_COMPLEMENT = "test_point_in_complement"
    TEST_POINT_COVERED = "test_point_covered"


@dataclass(frozen=True)
class SpaceClass:
    """
    Classification of f in the space of coamoebas.

    Attributes:
        label: U0 (Vol complement components) or U1 (Vol - 1)
        certificate: Why
        witness: theta* with fhat(theta*) aligned to the Gale signs, when member
        restriction_minimum: min over r > 0 of the delta-signed real restriction,
            divided by the interior monomial (simplex circuits only)
        complement_components: Components of the closed-coamoeba complement
    """

    label: SpaceLabel
    certificate: Certificate
    witness: TorusPoint | None = None
    restriction_minimum: float | None = None
    complement_components: int = 0

    def to_json(self) -> dict[str, object]:
        return {
            "class": self.label.value,
            "certificate": self.certificate.value,
            "witness_over_pi": None
            if self.witness is None
            else [format_over_pi(v) for v in self.witness.over_pi()],
            "restriction_minimum": self.restriction_minimum,
            "complement_components": self.complement_components,
        }


def closed_form_value(config: PointConfiguration, coeffs: CoefficientVector) -> Fraction:
    """
    (-1)^Vol * Delta(delta_0 |f_0|, ..., delta_N |f_N|), exactly.

    Moduli are converted to Fractions without rounding.
    """
    prof = profile(config)
    disc = discriminant(config)
    signed = [Fraction(s) * Fraction(m) for s, m in zip(prof.signs, coeffs.moduli, strict=True)]
    value = disc.evaluate(signed)
    assert isinstance(value, Fraction)
    return value if prof.normalized_volume % 2 == 0 else -value


class SignConvention(Enum):
    CALIBRATED = "calibrated"  # U1 iff value >= 0
    PRINTED = "printed"  # U1 iff value <= 0


def space_inequality(
    config: PointConfiguration,
    coeffs: CoefficientVector,
    *,
    convention: SignConvention = SignConvention.CALIBRATED,
) -> bool:
    """
    Closed-form U1 test for a simplex circuit in the discriminant coamoeba.

    The calibrated convention agrees with classify_space(); the printed one is
    its mirror and is kept for comparison.
    """
    value = closed_form_value(config, coeffs)
    if convention is SignConvention.CALIBRATED:
        return value >= 0
    return value <= 0


def restriction_minimum(config: PointConfiguration, coeffs: CoefficientVector) -> float:
    """
    min over r > 0 of sum_v |f_v| r^(a_v - a_int) - |f_int| for a simplex circuit.

    The minimum sits where the weights |f_v| r^(a_v - a_int) are proportional
    to the barycentric weights b_v / Vol of the interior point; those ratios
    form a binomial system in r with positive real targets.
    """
    prof = profile(config)
    interior = prof.interior_index
    if interior is None:
        fail(DegenerateInput, f"Restriction minimum needs a simplex circuit, got {prof.kind.value}")
    vertices = prof.positive
    moduli = coeffs.moduli
    b = prof.primitive_gale
    v0 = vertices[0]
    a_int = config.points[interior]
    matrix = tuple(
        tuple(x - y for x, y in zip(config.points[v], config.points[v0], strict=True)) for v in vertices[1:]
    )
    targets = tuple(complex((moduli[v0] * b[v]) / (moduli[v] * b[v0])) for v in vertices[1:])
    solution = solve_binomial_system(
        BinomialSystem(matrix=matrix, targets=targets, target_args_over_pi=tuple(Fraction(0) for _ in targets))
    )[0]
    logs = np.array(solution.log_moduli)
    total = 0.0
    for v in vertices:
        alpha = np.array(config.points[v]) - np.array(a_int)
        total += moduli[v] * math.exp(float(alpha @ logs))
    minimum = total - moduli[interior]
    logger.debug(f"[Classify] restriction minimum {minimum:.6g} at log r = {logs.tolist()}")
    return minimum


def classify_space(
    config: PointConfiguration,
    coeffs: CoefficientVector,
    *,
    tolerance: float | None = None,
) -> SpaceClass:
    """
    Classify f as U0 or U1.

    Off the discriminant coamoeba f is U0. On it, vertex circuits are U1 and
    simplex circuits are U1 exactly when the delta-signed real restriction
    vanishes somewhere on the positive orthant, i.e. when theta* is covered.

    Args:
        config: Nondegenerate circuit
        coeffs: Coefficients
        tolerance: Relative band around a zero minimum
            (default: CoamoebaConfig.INDETERMINACY_TOLERANCE)

    Raises:
        DegenerateCircuit: For pyramids
        NumericallyIndeterminate: If the minimum is inside the band and the
            exact closed form is nonzero
    """
    tolerance = CoamoebaConfig.INDETERMINACY_TOLERANCE if tolerance is None else tolerance
    prof = profile(config)
    prof.require_nondegenerate()
    volume = prof.normalized_volume
    index = prof.lattice_index
    membership = in_discriminant_coamoeba(config, coeffs)

    if not membership.member:
        result = SpaceClass(
            label=SpaceLabel.U0,
            certificate=Certificate.OFF_DISCRIMINANT_COAMOEBA,
            complement_components=volume * index,
        )
    elif prof.kind is CircuitKind.VERTEX:
        result = SpaceClass(
            label=SpaceLabel.U1,
            certificate=Certificate.TEST_POINT_COVERED,
            witness=membership.witness,
            complement_components=(volume - 1) * index,
        )
    else:
        minimum = restriction_minimum(config, coeffs)
        interior = prof.interior_index
        assert interior is not None
        scale = coeffs.moduli[interior]
        covered = minimum <= 0
        if abs(minimum) <= tolerance * scale:
            value = closed_form_value(config, coeffs)
            if value != 0:
                fail(
                    NumericallyIndeterminate,
                    f"Restriction minimum {minimum:.3e} is within {tolerance:.0e} of zero\n"
                    f"  closed form (-1)^Vol Delta = {float(value):.3e}",
                )
            covered = True
        result = SpaceClass(
            label=SpaceLabel.U1 if covered else SpaceLabel.U0,
            certificate=Certificate.TEST_POINT_COVERED if covered else Certificate.TEST_POINT_IN_COMPLEMENT,
            witness=membership.witness,
            restriction_minimum=minimum,
            complement_components=(volume - 1 if covered else volume) * index,
        )
    logger.info(f"[Classify] {config.points}: {result.label.value} ({result.certificate.value})")
    return result


# ============================================================================
# ORACLES AND SWEEPS
# ============================================================================


def univariate_component_count(
    config: Support,
    coeffs: CoefficientVector,
    *,
    tolerance: float | None = None,
) -> int:
    """
    Complement arcs of the closed coamoeba of a univariate polynomial.

    The coamoeba is the finite set of root arguments; m distinct arguments
    cut the circle into m arcs.
    """
    if config.n != 1:
        fail(DegenerateInput, f"Univariate oracle needs dimension 1, got {config.n}")
    poly = UnivariatePoly.from_terms({p[0]: c for p, c in zip(config.points, coeffs.values, strict=True)})
    units = [r / abs(r) for r in roots(poly)]
    return len(cluster_roots(units, tolerance=tolerance))


@dataclass(frozen=True)
class SweepRow:
    modulus: float
    argument_over_pi: OverPi
    label: str  # "U0", "U1" or "indeterminate"

    def to_json(self) -> dict[str, object]:
        return {
            "modulus": self.modulus,
            "argument_over_pi": format_over_pi(self.argument_over_pi),
            "class": self.label,
        }


def sweep(
    config: PointConfiguration,
    coeffs: CoefficientVector,
    kappa: int,
    moduli: Sequence[float],
    arguments_over_pi: Sequence[OverPi],
) -> tuple[SweepRow, ...]:
    """Classify f with f_kappa replaced by r * e^(i*pi*a) over a grid of (r, a)."""
    rows: list[SweepRow] = []
    for r in moduli:
        for raw in arguments_over_pi:
            a: OverPi = Fraction(raw) if isinstance(raw, int) else raw
            value = CoefficientVector.from_polar([r], [a]).values[0]
            exact_arg = a if isinstance(a, Fraction) else None
            varied = coeffs.replace(kappa, value, exact_arg)
            try:
                label = classify_space(config, varied).label.value
            except NumericallyIndeterminate:
                label = "indeterminate"
            rows.append(SweepRow(modulus=float(r), argument_over_pi=a, label=label))
    return tuple(rows)
