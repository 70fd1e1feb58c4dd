"""
system_solver.py

Two-polynomial systems on a planar circuit, reduced to a pair of trinomials

    F1 = f1 z^(a0) + z^(a2) + f2 z^(a3)
    F2 = f3 z^(a1) + z^(a2) + f4 z^(a3)

and solved by a hidden-variable Sylvester resultant. sector_census() groups
the roots by argument vector; for simplex circuits no sector may hold more
than two roots, and a sector where either trinomial is nonreal holds at most one.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import mpmath
import numpy as np

from coamoeba_config import CoamoebaConfig
from coamoeba_utils import (
    TWO_PI,
    DegenerateInput,
    IdenticallyZeroResultant,
    NoAdmissibleChoice,
    NonGenericSystem,
    SingularElimination,
    TorusPoint,
    ValidationError,
    fail,
)
from integer_geometry import CircuitKind, PointConfiguration, Support, profile, validate
from numeric_kernel import UnivariatePoly, cluster_roots, roots, sylvester_resultant
from phase_engine import CoefficientVector, lopsided_membership, phase_vector

logger = logging.getLogger(__name__)

Point = tuple[int, ...]


# ============================================================================
# SYSTEMS
# ============================================================================


@dataclass(frozen=True)
class CircuitSystem:
    """
    A trinomial pair sharing the monomials z^(a2) and z^(a3).

    Attributes:
        points: (a0, a1, a2, a3)
        coefficients: (f1, f2, f3, f4)
    """

    points: tuple[Point, Point, Point, Point]
    coefficients: tuple[complex, complex, complex, complex]

    def __post_init__(self) -> None:
        if any(c == 0 for c in self.coefficients):
            fail(DegenerateInput, f"Trinomial coefficients must be nonzero, got {self.coefficients}")

    @property
    def config(self) -> PointConfiguration:
        return validate(self.points)

    def first(self) -> tuple[Support, CoefficientVector]:
        a0, _, a2, a3 = self.points
        f1, f2, _, _ = self.coefficients
        return Support(n=2, points=(a0, a2, a3)), CoefficientVector.from_complex([f1, 1, f2])

    def second(self) -> tuple[Support, CoefficientVector]:
        _, a1, a2, a3 = self.points
        _, _, f3, f4 = self.coefficients
        return Support(n=2, points=(a1, a2, a3)), CoefficientVector.from_complex([f3, 1, f4])

    def polynomials(self) -> tuple[dict[Point, complex], dict[Point, complex]]:
        a0, a1, a2, a3 = self.points
        f1, f2, f3, f4 = self.coefficients
        return {a0: f1, a2: 1 + 0j, a3: f2}, {a1: f3, a2: 1 + 0j, a3: f4}

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.coefficients)

    @property
    def interior_line(self) -> bool:
        return interior_line_ok(self.points, 0, 1)

    def to_json(self) -> dict[str, object]:
        return {
            "points": [list(p) for p in self.points],
            "reduced": [{"re": c.real, "im": c.imag} for c in self.coefficients],
            "interior_line": self.interior_line,
        }


def interior_line_ok(points: Sequence[Sequence[int]], i0: int, i1: int) -> bool:
    """
    The line through the two other points separates a_i0 from a_i1.

    Then that line meets the interior of the Newton polygon.
    """
    i2, i3 = (k for k in range(4) if k not in (i0, i1))
    p2, p3 = points[i2], points[i3]

    def side(p: Sequence[int]) -> int:
        cross = (p3[0] - p2[0]) * (p[1] - p2[1]) - (p3[1] - p2[1]) * (p[0] - p2[0])
        return (cross > 0) - (cross < 0)

    return side(points[i0]) * side(points[i1]) < 0


def _approx_zero(value: complex, scale: float) -> bool:
    return abs(value) <= 1e-12 * max(scale, 1e-300)


def reduce_to_trinomials(
    points: Sequence[Sequence[int]],
    first: Sequence[complex],
    second: Sequence[complex],
    *,
    require_interior_line: bool = False,
) -> CircuitSystem:
    """
    Eliminate one monomial from each of two polynomials on a planar circuit.

    Ordered pairs (i0, i1) are tried in turn: F1 = q_i1 P - p_i1 Q loses a_i1 and
    F2 = q_i0 P - p_i0 Q loses a_i0. A pair is valid when all six remaining
    coefficients are nonzero; pairs whose remaining line separates a_i0 from
    a_i1 are preferred. Each trinomial is divided by its a2 coefficient.

    Raises:
        SingularElimination: If P and Q are proportional or no pair is valid
        NoAdmissibleChoice: If require_interior_line and no valid pair passes it
    """
    config = validate(points)
    p = np.array([complex(c) for c in first])
    q = np.array([complex(c) for c in second])
    if p.shape != (4,) or q.shape != (4,):
        fail(DegenerateInput, "reduce_to_trinomials needs four coefficients per polynomial")
    scale = float(max(np.max(np.abs(p)), np.max(np.abs(q))))
    if np.linalg.matrix_rank(np.stack([p, q]), tol=1e-12 * scale) < 2:
        fail(SingularElimination, f"Polynomials are proportional:\n  P = {p.tolist()}\n  Q = {q.tolist()}")

    fallback: CircuitSystem | None = None
    for i0, i1 in itertools.permutations(range(4), 2):
        i2, i3 = (k for k in range(4) if k not in (i0, i1))
        f_one = q[i1] * p - p[i1] * q
        f_two = q[i0] * p - p[i0] * q
        needed = (f_one[i0], f_one[i2], f_one[i3], f_two[i1], f_two[i2], f_two[i3])
        if any(_approx_zero(c, scale * scale) for c in needed):
            continue
        system = CircuitSystem(
            points=(config.points[i0], config.points[i1], config.points[i2], config.points[i3]),
            coefficients=(
                complex(f_one[i0] / f_one[i2]),
                complex(f_one[i3] / f_one[i2]),
                complex(f_two[i1] / f_two[i2]),
                complex(f_two[i3] / f_two[i2]),
            ),
        )
        if interior_line_ok(config.points, i0, i1):
            logger.debug(f"[Reduce] eliminated with a0={config.points[i0]}, a1={config.points[i1]}")
            return system
        fallback = fallback or system

    if fallback is None:
        fail(SingularElimination, f"No elimination pair leaves two genuine trinomials on {config.points}")
    if require_interior_line:
        fail(NoAdmissibleChoice, f"No elimination pair satisfies the interior-line check on {config.points}")
    logger.warning(f"[Reduce] interior-line hypothesis fails for every pair on {config.points}")
    return fallback


# ============================================================================
# SOLVING
# ============================================================================


def _evaluate(poly: dict[Point, complex], z: Sequence[complex]) -> tuple[complex, float]:
    """Value and term scale of a bivariate Laurent polynomial."""
    terms = [c * z[0] ** a[0] * z[1] ** a[1] for a, c in poly.items()]
    return complex(sum(terms)), max(abs(t) for t in terms)


def _gradient(poly: dict[Point, complex], z: Sequence[complex]) -> tuple[complex, complex]:
    return (
        complex(sum(c * a[0] * z[0] ** (a[0] - 1) * z[1] ** a[1] for a, c in poly.items())),
        complex(sum(c * a[1] * z[0] ** a[0] * z[1] ** (a[1] - 1) for a, c in poly.items())),
    )


def _newton(system: CircuitSystem, z: tuple[complex, complex], steps: int = 8) -> tuple[complex, complex]:
    first, second = system.polynomials()
    current = np.array(z, dtype=complex)
    for _ in range(steps):
        values = np.array([_evaluate(first, current)[0], _evaluate(second, current)[0]])
        jacobian = np.array([_gradient(first, current), _gradient(second, current)])
        try:
            step = np.linalg.solve(jacobian, values)
        except np.linalg.LinAlgError:
            break
        current = current - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(current))):
            break
    return complex(current[0]), complex(current[1])


def residual(system: CircuitSystem, z: Sequence[complex]) -> float:
    """max(|F1|, |F2|) relative to the largest term."""
    first, second = system.polynomials()
    v1, s1 = _evaluate(first, z)
    v2, s2 = _evaluate(second, z)
    return max(abs(v1) / s1, abs(v2) / s2)


def solve_system(
    system: CircuitSystem,
    *,
    tolerance: float | None = None,
) -> tuple[tuple[complex, complex], ...]:
    """
    All torus roots of the trinomial pair.

    The z2-resultant gives the z1 coordinates; each is completed from the
    z2-fiber of F1, matched against F2, Newton-polished and kept when the
    relative residual is below tolerance.

    Raises:
        NonGenericSystem: If the resultant vanishes identically
    """
    tolerance = CoamoebaConfig.SYSTEM_RESIDUAL_TOLERANCE if tolerance is None else tolerance
    first, second = system.polynomials()
    try:
        eliminated = sylvester_resultant(first, second, eliminate=1)
    except IdenticallyZeroResultant as e:
        raise NonGenericSystem(f"System has a common factor: {system.to_json()}") from e
    if eliminated.degree < 1:
        return ()

    found: list[tuple[complex, complex]] = []
    for cluster in cluster_roots(roots(eliminated)):
        z1 = cluster.value
        fiber: dict[int, complex] = {}
        for a, c in first.items():
            fiber[a[1]] = fiber.get(a[1], 0) + c * z1 ** a[0]
        poly = UnivariatePoly.from_terms(fiber).trimmed()
        if len(poly.coeffs) < 2:
            continue
        candidates = sorted(
            ((z1, z2) for z2 in roots(poly)),
            key=lambda z: abs(_evaluate(second, z)[0]) / _evaluate(second, z)[1],
        )
        for candidate in candidates[: cluster.multiplicity]:
            polished = _newton(system, candidate)
            if residual(system, polished) <= tolerance:
                found.append(polished)

    unique: list[tuple[complex, complex]] = []
    for z in found:
        if all(max(abs(z[0] - u[0]), abs(z[1] - u[1])) > 1e-9 * max(1.0, abs(u[0]), abs(u[1])) for u in unique):
            unique.append(z)
    logger.debug(f"[Solve] {len(unique)} roots (resultant degree {eliminated.degree})")
    return tuple(unique)


def refine_root(
    system: CircuitSystem,
    root: tuple[complex, complex],
    *,
    digits: int = CoamoebaConfig.EXTENDED_PRECISION_DIGITS,
) -> tuple[complex, complex]:
    """Polish a root at extended precision with mpmath.findroot."""
    first, second = system.polynomials()

    def as_function(poly: dict[Point, complex]) -> Callable[[object, object], object]:
        return lambda x, y: mpmath.fsum(mpmath.mpc(c) * x ** a[0] * y ** a[1] for a, c in poly.items())

    with mpmath.workdps(digits):
        refined = mpmath.findroot(
            [as_function(first), as_function(second)],
            (mpmath.mpc(root[0]), mpmath.mpc(root[1])),
        )
        return complex(refined[0]), complex(refined[1])


# ============================================================================
# SECTORS
# ============================================================================


def _torus_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.abs(np.angle(np.exp(1j * (a - b))))
    return float(np.max(d))


def is_real_at(config: Support, coeffs: CoefficientVector, theta: TorusPoint, *, tolerance: float) -> bool:
    """All phases of the polynomial at theta lie on one real line through 0."""
    phases = phase_vector(config, coeffs, theta).phases
    base = phases[0]
    return all(abs((p / base).imag) <= tolerance for p in phases[1:])


@dataclass(frozen=True)
class SectorReport:
    """
    Roots grouped by argument vector.

    Attributes:
        roots: The roots
        arguments: Argument vector of each root, radians in [0, 2*pi)
        clusters: Root indices sharing an argument vector
        nonreal_clusters: Clusters where F1 or F2 is nonreal at the shared argument
        refined: Roots re-solved at extended precision before clustering
    """

    roots: tuple[tuple[complex, complex], ...]
    arguments: tuple[tuple[float, float], ...]
    clusters: tuple[tuple[int, ...], ...]
    nonreal_clusters: tuple[bool, ...]
    refined: int = 0

    @property
    def max_cluster(self) -> int:
        return max((len(c) for c in self.clusters), default=0)

    @property
    def theorem_violations(self) -> int:
        """Sectors with three or more roots."""
        return sum(1 for c in self.clusters if len(c) >= 3)

    @property
    def proposition_violations(self) -> int:
        """Nonreal sectors with two or more roots."""
        return sum(1 for c, nonreal in zip(self.clusters, self.nonreal_clusters, strict=True) if nonreal and len(c) >= 2)

    def to_json(self) -> dict[str, object]:
        return {
            "roots": [[{"re": z.real, "im": z.imag} for z in r] for r in self.roots],
            "arguments_over_pi": [[a / math.pi for a in t] for t in self.arguments],
            "sector_clusters": [list(c) for c in self.clusters],
            "max_cluster": self.max_cluster,
            "nonreal_clusters": list(self.nonreal_clusters),
            "refined": self.refined,
        }


def sector_census(
    system: CircuitSystem,
    found: Sequence[tuple[complex, complex]],
    *,
    tolerance: float | None = None,
) -> SectorReport:
    """
    Cluster roots by argument vector (single linkage on the torus).

    Pairs whose argument distance falls within a factor 10 of the tolerance
    are re-solved at extended precision before the clusters are formed.
    """
    tolerance = CoamoebaConfig.SECTOR_TOLERANCE if tolerance is None else tolerance
    current = [tuple(z) for z in found]
    args = [np.mod(np.angle(np.array(z)), TWO_PI) for z in current]
    refined = 0
    near = {
        k
        for i, j in itertools.combinations(range(len(current)), 2)
        if tolerance / 10 <= _torus_distance(args[i], args[j]) <= tolerance * 10
        for k in (i, j)
    }
    for k in sorted(near):
        try:
            current[k] = refine_root(system, (current[k][0], current[k][1]))
            args[k] = np.mod(np.angle(np.array(current[k])), TWO_PI)
            refined += 1
        except (ValueError, ZeroDivisionError) as e:
            logger.warning(f"[Sectors] extended-precision refinement failed for root {k}: {e}")

    parent = list(range(len(current)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(current)), 2):
        if _torus_distance(args[i], args[j]) <= tolerance:
            parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(current)):
        groups.setdefault(find(i), []).append(i)
    clusters = tuple(tuple(g) for g in groups.values())

    nonreal: list[bool] = []
    realness_tolerance = max(tolerance, 1e-9) * 10
    for cluster in clusters:
        theta = TorusPoint.from_radians(args[cluster[0]].tolist())
        flags = [
            not is_real_at(cfg, coeffs, theta, tolerance=realness_tolerance)
            for cfg, coeffs in (system.first(), system.second())
        ]
        nonreal.append(any(flags))

    report = SectorReport(
        roots=tuple((complex(z[0]), complex(z[1])) for z in current),
        arguments=tuple((float(a[0]), float(a[1])) for a in args),
        clusters=clusters,
        nonreal_clusters=tuple(nonreal),
        refined=refined,
    )
    if report.theorem_violations or report.proposition_violations:
        logger.warning(
            f"[Sectors] {report.theorem_violations} sectors with >= 3 roots, "
            f"{report.proposition_violations} nonreal sectors with >= 2 roots"
        )
    return report


def system_lopsided_membership(system: CircuitSystem, theta: TorusPoint) -> bool:
    """theta is in L_f for the system: neither trinomial is colopsided there."""
    return all(lopsided_membership(cfg, coeffs, theta) for cfg, coeffs in (system.first(), system.second()))


# ============================================================================
# CAMPAIGNS
# ============================================================================


def random_simplex_system(
    rng: np.random.Generator,
    *,
    max_volume: int = CoamoebaConfig.MAX_CAMPAIGN_VOLUME,
    real: bool = False,
) -> CircuitSystem:
    """
    Random trinomial pair on a simplex circuit with Vol <= max_volume.

    The interior point becomes a2 and one vertex a3, so the line a2 a3
    separates the other two vertices a0 and a1.
    """
    low, high = CoamoebaConfig.MODULUS_RANGE
    while True:
        points = [tuple(int(x) for x in rng.integers(-2, 3, size=2)) for _ in range(4)]
        if len(set(points)) < 4:
            continue
        try:
            config = validate(points)
        except ValidationError:
            continue
        prof = profile(config)
        if prof.kind is not CircuitKind.SIMPLEX or prof.total_volume > max_volume:
            continue
        interior = prof.interior_index
        assert interior is not None
        v0, v1, v2 = prof.positive
        ordered = (config.points[v0], config.points[v1], config.points[interior], config.points[v2])
        moduli = np.exp(rng.uniform(math.log(low), math.log(high), size=4))
        if real:
            signs = rng.choice([-1.0, 1.0], size=4)
            coefficients = tuple(complex(s * m) for s, m in zip(signs, moduli, strict=True))
        else:
            angles = rng.uniform(0.0, TWO_PI, size=4)
            coefficients = tuple(complex(m * np.exp(1j * a)) for m, a in zip(moduli, angles, strict=True))
        return CircuitSystem(points=ordered, coefficients=coefficients)  # type: ignore[arg-type]


@dataclass(frozen=True)
class CampaignSummary:
    trials: int
    generic: int
    nongeneric: int
    max_cluster: int
    theorem_violations: int
    proposition_violations: int
    refined: int

    @property
    def generic_rate(self) -> float:
        return self.generic / self.trials if self.trials else 0.0

    def to_json(self) -> dict[str, object]:
        return {
            "trials": self.trials,
            "generic": self.generic,
            "generic_rate": self.generic_rate,
            "nongeneric": self.nongeneric,
            "max_cluster": self.max_cluster,
            "theorem_violations": self.theorem_violations,
            "proposition_violations": self.proposition_violations,
            "refined": self.refined,
        }


def fewnomial_campaign(
    trials: int = CoamoebaConfig.DEFAULT_TRIALS,
    seed: int = CoamoebaConfig.DEFAULT_SEED,
    *,
    max_volume: int = CoamoebaConfig.MAX_CAMPAIGN_VOLUME,
) -> CampaignSummary:
    """
    Solve random simplex-circuit systems and tally sector statistics.

    Even trials draw complex coefficients, odd trials real ones. A trial is
    generic when its root count equals Vol(A).
    """
    rng = np.random.default_rng(seed)
    generic = nongeneric = max_cluster = theorem = proposition = refined = 0
    for trial in range(trials):
        system = random_simplex_system(rng, max_volume=max_volume, real=trial % 2 == 1)
        try:
            found = solve_system(system)
        except NonGenericSystem:
            nongeneric += 1
            continue
        if len(found) == profile(system.config).total_volume:
            generic += 1
        report = sector_census(system, found)
        max_cluster = max(max_cluster, report.max_cluster)
        theorem += report.theorem_violations
        proposition += report.proposition_violations
        refined += report.refined
    summary = CampaignSummary(
        trials=trials,
        generic=generic,
        nongeneric=nongeneric,
        max_cluster=max_cluster,
        theorem_violations=theorem,
        proposition_violations=proposition,
        refined=refined,
    )
    logger.info(f"[Campaign] {summary.to_json()}")
    return summary
