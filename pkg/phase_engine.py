"""
phase_engine.py

Pointwise phase analysis on the argument torus.

For f = sum_k f_k z^(a_k) and an argument vector theta, the unit phases
fhat_k(theta) = exp(i(arg f_k + <a_k, theta>)) decide everything here:
- colopsided_at(): do the phases fit in a closed half-plane (angular-gap test)?
- lopsided_membership(): theta lies in the lopsided coamoeba L_f
- order_map() / order_pairing(): the principal-branch pairing with the Gale vector
- complement_index_set(): the order values of all complement components
- shell(): the torus line arrangement of the edge truncations (planar only)

All angles in this module are handled "over pi". Exact (Fraction) arithmetic
is used whenever every coefficient argument and every angle is rational.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from coamoeba_config import CoamoebaConfig
from coamoeba_utils import (
    DegenerateEdgePolynomial,
    DegenerateInput,
    NotInComplement,
    TorusPoint,
    exact_argument,
    fail,
    format_over_pi,
    principal_over_pi,
    reduce_over_pi,
    unit_from_over_pi,
)
from integer_geometry import CircuitProfile, Support, convex_hull_2d, profile, validate
from numeric_kernel import UnivariatePoly, roots

logger = logging.getLogger(__name__)

OverPi = Fraction | float

def _tol() -> float:
    """Float comparison tolerance over pi."""
    return CoamoebaConfig.ANGLE_TOLERANCE / math.pi


def _reduce(value: OverPi) -> OverPi:
    if isinstance(value, Fraction):
        return reduce_over_pi(value)
    reduced = math.fmod(value, 2.0)
    if reduced < 0.0:
        reduced += 2.0
    return 0.0 if 2.0 - reduced <= _tol() else reduced


def _principal(value: OverPi) -> OverPi:
    if isinstance(value, Fraction):
        return principal_over_pi(value)
    reduced = _reduce(value)
    return reduced - 2.0 if reduced > 1.0 + _tol() else reduced


def _close(a: OverPi, b: OverPi) -> bool:
    """Equality on the circle (over pi)."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return reduce_over_pi(a - b) == 0
    d = _reduce(float(a) - float(b))
    return min(float(d), 2.0 - float(d)) <= _tol()


# ============================================================================
# COEFFICIENTS AND PHASES
# ============================================================================


@dataclass(frozen=True)
class CoefficientVector:
    """
    Coefficients f in C_*^A, indexed like the support's points.

    Attributes:
        values: Complex coefficients, all nonzero
        arguments_over_pi: Exact arguments in [0, 2) when every one is known
    """

    values: tuple[complex, ...]
    arguments_over_pi: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        values = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", values)
        zeros = [k for k, v in enumerate(values) if v == 0]
        if zeros:
            fail(DegenerateInput, f"Coefficients must be nonzero, got zero at indices {zeros}")
        if self.arguments_over_pi is None:
            detected = [exact_argument(v) for v in values]
            if all(a is not None for a in detected):
                object.__setattr__(self, "arguments_over_pi", tuple(a for a in detected if a is not None))
        else:
            exact = tuple(reduce_over_pi(Fraction(a)) for a in self.arguments_over_pi)
            if len(exact) != len(values):
                fail(DegenerateInput, f"{len(exact)} arguments for {len(values)} coefficients")
            object.__setattr__(self, "arguments_over_pi", exact)

    @classmethod
    def from_complex(cls, values: Iterable[complex | float | int]) -> CoefficientVector:
        return cls(values=tuple(complex(v) for v in values))

    @classmethod
    def from_polar(cls, moduli: Sequence[float], arguments_over_pi: Sequence[OverPi]) -> CoefficientVector:
        """
        Build from moduli and arguments over pi; Fractions stay exact.

        Example:
            >>> CoefficientVector.from_polar([1.0, 2.0], [Fraction(0), Fraction(1, 2)]).values
            ((1+0j), 2j)
        """
        values = tuple(
            float(r) * unit_from_over_pi(a) if isinstance(a, Fraction) else cmath.rect(float(r), math.pi * a)
            for r, a in zip(moduli, arguments_over_pi, strict=True)
        )
        exact = None
        if all(isinstance(a, Fraction) for a in arguments_over_pi):
            exact = tuple(Fraction(a) for a in arguments_over_pi)
        return cls(values=values, arguments_over_pi=exact)

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def moduli(self) -> tuple[float, ...]:
        return tuple(abs(v) for v in self.values)

    @property
    def exact(self) -> bool:
        return self.arguments_over_pi is not None

    def argument_over_pi(self, k: int) -> OverPi:
        """Argument of f_k over pi; a Fraction when exact."""
        if self.arguments_over_pi is not None:
            return self.arguments_over_pi[k]
        return _reduce(cmath.phase(self.values[k]) / math.pi)

    def arguments(self) -> tuple[OverPi, ...]:
        return tuple(self.argument_over_pi(k) for k in range(self.size))

    def truncate(self, indices: Iterable[int]) -> CoefficientVector:
        keep = tuple(indices)
        exact = None
        if self.arguments_over_pi is not None:
            exact = tuple(self.arguments_over_pi[k] for k in keep)
        return CoefficientVector(values=tuple(self.values[k] for k in keep), arguments_over_pi=exact)

    def replace(self, k: int, value: complex, argument_over_pi: Fraction | None = None) -> CoefficientVector:
        """Copy with f_k replaced; exactness survives when argument_over_pi is given."""
        values = list(self.values)
        values[k] = complex(value)
        exact = None
        if self.arguments_over_pi is not None and argument_over_pi is not None:
            args = list(self.arguments_over_pi)
            args[k] = argument_over_pi
            exact = tuple(args)
        return CoefficientVector(values=tuple(values), arguments_over_pi=exact)

    def to_json(self) -> list[dict[str, object]]:
        return [
            {"modulus": abs(v), "argument_over_pi": format_over_pi(self.argument_over_pi(k))}
            for k, v in enumerate(self.values)
        ]


@dataclass(frozen=True)
class PhaseVector:
    """Unit phases fhat_k(theta) and their arguments over pi."""

    phases: tuple[complex, ...]
    arguments_over_pi: tuple[OverPi, ...]

    @property
    def exact(self) -> bool:
        return all(isinstance(a, Fraction) for a in self.arguments_over_pi)


def _check_sizes(config: Support, coeffs: CoefficientVector, theta: TorusPoint | None = None) -> None:
    if coeffs.size != config.size:
        fail(DegenerateInput, f"{coeffs.size} coefficients for {config.size} points")
    if theta is not None and theta.dimension != config.n:
        fail(DegenerateInput, f"Angle vector has dimension {theta.dimension}, support {config.n}")


def phase_arguments(config: Support, coeffs: CoefficientVector, theta: TorusPoint) -> tuple[OverPi, ...]:
    """arg f_k + <a_k, theta>, over pi and reduced; exact when possible."""
    _check_sizes(config, coeffs, theta)
    if coeffs.arguments_over_pi is not None and theta.exact is not None:
        return tuple(
            reduce_over_pi(arg + sum((a * t for a, t in zip(point, theta.exact, strict=True)), Fraction(0)))
            for arg, point in zip(coeffs.arguments_over_pi, config.points, strict=True)
        )
    angles = [t / math.pi for t in theta.angles]
    return tuple(
        _reduce(float(coeffs.argument_over_pi(k)) + sum(a * t for a, t in zip(point, angles, strict=True)))
        for k, point in enumerate(config.points)
    )


def phase_vector(config: Support, coeffs: CoefficientVector, theta: TorusPoint) -> PhaseVector:
    """
    The unit phases fhat(theta).

    Example:
        >>> config = Support(n=2, points=((0, 0), (1, 0), (0, 1)))
        >>> ones = CoefficientVector.from_complex([1, 1, 1])
        >>> phase_vector(config, ones, TorusPoint.from_over_pi([1, 1])).phases
        ((1+0j), (-1+0j), (-1+0j))
    """
    args = phase_arguments(config, coeffs, theta)
    phases = tuple(
        unit_from_over_pi(a) if isinstance(a, Fraction) else cmath.exp(1j * math.pi * a) for a in args
    )
    return PhaseVector(phases=phases, arguments_over_pi=args)


# ============================================================================
# COLOPSIDEDNESS
# ============================================================================


@dataclass(frozen=True)
class AngularGap:
    """Largest empty arc between consecutive phases: (start, start + size), over pi."""

    size: OverPi
    start: OverPi


def max_angular_gap(arguments_over_pi: Sequence[OverPi]) -> AngularGap:
    """
    Largest gap between consecutive arguments on the circle.

    Example:
        >>> max_angular_gap([Fraction(0), Fraction(1, 2), Fraction(1)]).size
        Fraction(1, 1)
    """
    if not arguments_over_pi:
        fail(DegenerateInput, "Angular gap of an empty phase set")
    values = sorted(_reduce(a) for a in arguments_over_pi)
    if len(values) == 1:
        full: OverPi = Fraction(2) if isinstance(values[0], Fraction) else 2.0
        return AngularGap(size=full, start=values[0])
    best_size: OverPi = -1
    best_start: OverPi = values[0]
    for i, current in enumerate(values):
        following = values[i + 1] if i + 1 < len(values) else values[0] + 2
        gap = following - current
        if gap > best_size:
            best_size, best_start = gap, current
    return AngularGap(size=best_size, start=best_start)


class VerdictKind(Enum):
    COLOPSIDED = "Colopsided"
    OPEN = "Open"
    REAL_DEGENERATE = "RealDegenerate"


@dataclass(frozen=True)
class ColopsidednessVerdict:
    """
    Outcome of the half-plane test at one argument vector.

    Attributes:
        kind: Colopsided, Open or RealDegenerate
        gap: Largest angular gap between phases, over pi
        witness_over_pi: phi with Re(e^{i phi} fhat_k) >= 0 for all k (Colopsided only)
        strict: All phases in the open half-plane (theta off the closed L_f)
        line_over_pi: Direction in [0, 1) of the common real line (RealDegenerate only)
    """

    kind: VerdictKind
    gap: OverPi
    witness_over_pi: OverPi | None = None
    strict: bool = False
    line_over_pi: OverPi | None = None

    @property
    def colopsided(self) -> bool:
        return self.kind is VerdictKind.COLOPSIDED

    def to_json(self) -> dict[str, object]:
        return {
            "kind": self.kind.value,
            "gap_over_pi": format_over_pi(self.gap),
            "strict": self.strict,
            "witness_over_pi": None if self.witness_over_pi is None else format_over_pi(self.witness_over_pi),
            "line_over_pi": None if self.line_over_pi is None else format_over_pi(self.line_over_pi),
        }


def verdict_from_arguments(arguments_over_pi: Sequence[OverPi]) -> ColopsidednessVerdict:
    """
    Half-plane verdict from phase arguments via the angular-gap criterion.

    A gap larger than pi means all phases sit in an open half-plane. A gap of
    exactly pi leaves them in a closed half-plane: colopsided when some phase
    is off the boundary line, real-degenerate otherwise.
    """
    gap = max_angular_gap(arguments_over_pi)
    exact = isinstance(gap.size, Fraction)
    size, start = gap.size, gap.start

    above_half = size > 1 if exact else size > 1 + _tol()
    if above_half:
        centre = start + 1 + size / 2
        return ColopsidednessVerdict(
            kind=VerdictKind.COLOPSIDED, gap=size, witness_over_pi=_reduce(-centre), strict=True
        )
    on_half = size == 1 if exact else abs(size - 1) <= _tol()
    if on_half:
        interior = [a for a in arguments_over_pi if not _close(a, start) and not _close(a, start + 1)]
        if interior:
            three_halves: OverPi = Fraction(3, 2) if exact else 1.5
            return ColopsidednessVerdict(
                kind=VerdictKind.COLOPSIDED, gap=size, witness_over_pi=_reduce(-(start + three_halves))
            )
        line = _reduce(start + 1)
        line = line - 1 if line >= 1 else line
        return ColopsidednessVerdict(kind=VerdictKind.REAL_DEGENERATE, gap=size, line_over_pi=line)
    return ColopsidednessVerdict(kind=VerdictKind.OPEN, gap=size)


def colopsided_at(config: Support, coeffs: CoefficientVector, theta: TorusPoint) -> ColopsidednessVerdict:
    """
    Decide whether f is colopsided at theta.

    Args:
        config: Support of f (any point set)
        coeffs: Coefficients of f
        theta: Argument vector

    Returns:
        Colopsided (with witness phase), Open or RealDegenerate
    """
    verdict = verdict_from_arguments(phase_arguments(config, coeffs, theta))
    logger.debug(f"[Phase] theta={theta.over_pi()} -> {verdict.kind.value} (gap {verdict.gap})")
    return verdict


def lopsided_membership(config: Support, coeffs: CoefficientVector, theta: TorusPoint) -> bool:
    """True iff theta lies in the lopsided coamoeba (f not colopsided there)."""
    return not colopsided_at(config, coeffs, theta).colopsided


def truncation_colopsided_count(config: Support, coeffs: CoefficientVector, theta: TorusPoint) -> int:
    """
    How many one-point truncations f_(k hat) are colopsided at theta.

    theta is outside L_f exactly when all of them are.
    """
    _check_sizes(config, coeffs, theta)
    count = 0
    for k in range(config.size):
        keep = [j for j in range(config.size) if j != k]
        if colopsided_at(config.truncate(keep), coeffs.truncate(keep), theta).colopsided:
            count += 1
    return count


# ============================================================================
# ZONOTOPE AND ORDER MAP
# ============================================================================


@dataclass(frozen=True)
class Zonotope1D:
    """The interval [-pi*Vol, pi*Vol] swept by the order map."""

    half_length_over_pi: int

    @property
    def half_length(self) -> float:
        return math.pi * self.half_length_over_pi

    @property
    def length(self) -> float:
        return 2.0 * self.half_length

    def contains(self, value_over_pi: OverPi, *, strict: bool = True) -> bool:
        bound = self.half_length_over_pi
        if strict:
            return -bound < value_over_pi < bound
        return -bound <= value_over_pi <= bound


def zonotope(prof: CircuitProfile) -> Zonotope1D:
    """Zonotope of the primitive Gale vector: half length pi times the normalized volume."""
    prof.require_nondegenerate()
    return Zonotope1D(half_length_over_pi=sum(abs(b) for b in prof.primitive_gale) // 2)


def _base_index(config: Support) -> int:
    origin = config.index_of([0] * config.n)
    return origin if origin >= 0 else 0


def order_pairing(config: Support, coeffs: CoefficientVector, theta: TorusPoint) -> OverPi:
    """
    Principal-branch pairing sum_k Arg(fhat_k / fhat_base) * b_k, over pi.

    Defined at every theta; the basepoint is the monomial at the origin, or
    point 0 when there is none. Uses the primitive Gale vector.

    Example:
        >>> config = validate([[0], [1], [2]])
        >>> ones = CoefficientVector.from_complex([1, 1, 1])
        >>> order_pairing(config, ones, TorusPoint.from_over_pi([Fraction(1, 2)]))
        Fraction(0, 1)
    """
    prof = profile(validate(config.points))
    args = phase_arguments(config, coeffs, theta)
    base = args[_base_index(config)]
    total: OverPi = Fraction(0) if all(isinstance(a, Fraction) for a in args) else 0.0
    for arg, b in zip(args, prof.primitive_gale, strict=True):
        total += _principal(arg - base) * b
    return total


def order_map(config: Support, coeffs: CoefficientVector, theta: TorusPoint) -> OverPi:
    """
    Order of the complement component containing theta, over pi.

    Raises:
        NotInComplement: If theta lies in the closed lopsided coamoeba
    """
    verdict = colopsided_at(config, coeffs, theta)
    if not (verdict.colopsided and verdict.strict):
        fail(
            NotInComplement,
            f"f is not strictly colopsided at theta={theta.over_pi()}\n"
            f"  verdict: {verdict.kind.value}, gap {verdict.gap} * pi",
        )
    return order_pairing(config, coeffs, theta)


@dataclass(frozen=True)
class IndexSet:
    """
    Order values of the complement components, over pi.

    Attributes:
        values_over_pi: (Arg f . B + 2Z) inside the open zonotope, ascending
        zonotope: The zonotope of the primitive Gale vector
        lattice_index: Index of ZA in Z^n
        degenerate_alignment: An order value fell on the zonotope boundary
    """

    values_over_pi: tuple[OverPi, ...]
    zonotope: Zonotope1D
    lattice_index: int
    degenerate_alignment: bool

    @property
    def cardinality(self) -> int:
        return len(self.values_over_pi)

    @property
    def lifted_cardinality(self) -> int:
        """Order values counted on the original torus, a lattice_index-fold cover."""
        return self.cardinality * self.lattice_index

    def to_json(self) -> dict[str, object]:
        return {
            "order_values_over_pi": [format_over_pi(v) for v in self.values_over_pi],
            "cardinality": self.cardinality,
            "volume": self.zonotope.half_length_over_pi,
            "lattice_index": self.lattice_index,
            "lifted_cardinality": self.lifted_cardinality,
            "degenerate_alignment": self.degenerate_alignment,
        }


def gale_argument_sum(config: Support, coeffs: CoefficientVector, gale: Sequence[int]) -> OverPi:
    """sum_k arg(f_k) * gale_k, over pi (not reduced)."""
    _check_sizes(config, coeffs)
    args = coeffs.arguments()
    if all(isinstance(a, Fraction) for a in args):
        return sum((Fraction(a) * b for a, b in zip(args, gale, strict=True)), Fraction(0))
    return sum(float(a) * b for a, b in zip(args, gale, strict=True))


def complement_index_set(config: Support, coeffs: CoefficientVector) -> IndexSet:
    """
    Enumerate the order values of the complement components.

    The values are s + 2j (over pi) strictly inside (-Vol, Vol), with
    s = sum_k arg(f_k) b_k and Vol the normalized volume. There are Vol of
    them, or Vol - 1 when s is congruent to Vol mod 2.
    Counts are on the normalized lattice; `lifted_cardinality` gives the count on
    the original torus (1 + z1^3 + z2^3 + xi z1 z2 lists 3 values, lifted to 9).

    Raises:
        DegenerateCircuit: For pyramids
    """
    prof = profile(validate(config.points))
    zono = zonotope(prof)
    volume = zono.half_length_over_pi
    s = gale_argument_sum(config, coeffs, prof.primitive_gale)

    if isinstance(s, Fraction):
        offset: OverPi = (s + volume) % 2
        degenerate = offset == 0
    else:
        offset = math.fmod(s + volume, 2.0)
        if offset < 0:
            offset += 2.0
        degenerate = offset <= _tol() or 2.0 - offset <= _tol()
        if 2.0 - offset <= _tol():
            offset = 0.0
    first = -volume + (offset if not degenerate else 2)

    values: list[OverPi] = []
    current = first
    while current < volume - (0 if isinstance(current, Fraction) else _tol()):
        values.append(current)
        current = current + 2
    result = IndexSet(
        values_over_pi=tuple(values),
        zonotope=zono,
        lattice_index=prof.lattice_index,
        degenerate_alignment=degenerate,
    )
    logger.debug(f"[Order] s={s}, Vol={volume}: {len(values)} order values")
    return result


# ============================================================================
# SHELL
# ============================================================================


@dataclass(frozen=True)
class LineFamily:
    """
    Coamoeba of one edge truncation: lines <direction, theta> == offset (mod 2*pi).

    Attributes:
        edge: Indices of the points on the edge, in order along it
        direction: Primitive edge direction, first nonzero entry positive
        offsets_over_pi: One offset per root of the edge polynomial, in [0, 2)
        exact: Offsets are exact rationals
    """

    edge: tuple[int, ...]
    direction: tuple[int, ...]
    offsets_over_pi: tuple[OverPi, ...]
    exact: bool

    def contains(self, theta: TorusPoint) -> bool:
        value: OverPi
        if theta.exact is not None and self.exact:
            value = sum((d * t for d, t in zip(self.direction, theta.exact, strict=True)), Fraction(0))
        else:
            value = sum(d * t / math.pi for d, t in zip(self.direction, theta.angles, strict=True))
        return any(_close(value, offset) for offset in self.offsets_over_pi)

    def to_json(self) -> dict[str, object]:
        return {
            "edge": list(self.edge),
            "direction": list(self.direction),
            "offsets_over_pi": [format_over_pi(o) for o in self.offsets_over_pi],
        }


def _edge_points(config: Support, u: int, v: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Points on segment [a_u, a_v] ordered along it, with their lattice positions."""
    a_u, a_v = config.points[u], config.points[v]
    delta = (a_v[0] - a_u[0], a_v[1] - a_u[1])
    length = math.gcd(*delta)
    step = (delta[0] // length, delta[1] // length)
    on_edge: list[tuple[int, int]] = []
    for k, p in enumerate(config.points):
        rel = (p[0] - a_u[0], p[1] - a_u[1])
        if rel[0] * step[1] - rel[1] * step[0] != 0:
            continue
        position = rel[0] // step[0] if step[0] != 0 else rel[1] // step[1]
        if 0 <= position <= length:
            on_edge.append((position, k))
    on_edge.sort()
    return tuple(k for _, k in on_edge), tuple(pos for pos, _ in on_edge)


def shell(config: Support, coeffs: CoefficientVector) -> tuple[LineFamily, ...]:
    """
    The shell: coamoebas of the edge truncations of a planar polynomial.

    Along an edge with primitive direction d, f_edge = z^(a_u) g(z^d) and the
    coamoeba is {<d, theta> == arg t : g(t) = 0}. Binomial edges are solved
    in closed form, longer edges through numeric_kernel.roots().

    Raises:
        DegenerateInput: If the support is not planar
        DegenerateEdgePolynomial: If an edge polynomial loses an end term
    """
    if config.n != 2:
        fail(DegenerateInput, f"shell needs a planar support, got dimension {config.n}")
    _check_sizes(config, coeffs)
    hull = convex_hull_2d(config.points)
    families: list[LineFamily] = []
    for i, u in enumerate(hull):
        v = hull[(i + 1) % len(hull)]
        indices, positions = _edge_points(config, u, v)
        a_u, a_v = config.points[u], config.points[v]
        length = positions[-1]
        direction = tuple((a_v[j] - a_u[j]) // length for j in range(2))
        sign = 1 if (direction[0] > 0 or (direction[0] == 0 and direction[1] > 0)) else -1

        f_first, f_last = coeffs.values[indices[0]], coeffs.values[indices[-1]]
        if f_first == 0 or f_last == 0:
            fail(DegenerateEdgePolynomial, f"Edge {indices} lost an end coefficient")

        offsets: list[OverPi]
        if len(indices) == 2:
            # t^L = -f_first / f_last
            arg_first = coeffs.argument_over_pi(indices[0])
            arg_last = coeffs.argument_over_pi(indices[1])
            base = arg_first + 1 - arg_last
            offsets = [(base + 2 * m) / length for m in range(length)]
            exact = all(isinstance(a, Fraction) for a in (arg_first, arg_last))
        else:
            poly = UnivariatePoly.from_terms(
                {pos: coeffs.values[k] for k, pos in zip(indices, positions, strict=True)}
            )
            offsets = [cmath.phase(t) / math.pi for t in roots(poly)]
            exact = False
        if not exact:
            offsets = [float(o) for o in offsets]
        normalized = sorted({_reduce(sign * o) for o in offsets})
        families.append(
            LineFamily(
                edge=indices,
                direction=tuple(sign * d for d in direction),
                offsets_over_pi=tuple(normalized),
                exact=exact,
            )
        )
    logger.debug(f"[Shell] {len(families)} edge families for {config.points}")
    return tuple(families)
