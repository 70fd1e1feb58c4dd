"""
numeric_kernel.py

Numeric engines shared by the coamoeba modules:
- UnivariatePoly and roots(): companion eigenvalues refined by Aberth steps
- solve_binomial_system(): real logs for moduli, exact congruences for arguments
- batched_fiber_roots() / curve_sample(): data-parallel fiber solving for planar curves
- sylvester_resultant(): hidden-variable elimination for bivariate pairs
- mixed_volume_2d(): the Bernstein count for planar pairs
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from coamoeba_config import CoamoebaConfig
from coamoeba_utils import (
    DegenerateInput,
    EmptyCurve,
    IdenticallyZeroResultant,
    SingularExponentMatrix,
    TorusPoint,
    exact_argument,
    fail,
)
from integer_geometry import CongruenceSystem, Support, determinant, solve_congruences, twice_area

logger = logging.getLogger(__name__)

Coefficient = complex | Fraction | int


# ============================================================================
# UNIVARIATE POLYNOMIALS
# ============================================================================


@dataclass(frozen=True)
class UnivariatePoly:
    """
    Laurent polynomial sum_j coeffs[j] * x^(offset + j), lowest degree first.
    """

    coeffs: tuple[complex, ...]
    offset: int = 0

    @classmethod
    def from_terms(cls, terms: Mapping[int, Coefficient]) -> UnivariatePoly:
        """Build from {exponent: coefficient}; repeated exponents must be pre-summed."""
        if not terms:
            return cls(coeffs=(), offset=0)
        low, high = min(terms), max(terms)
        coeffs = tuple(complex(terms.get(e, 0)) for e in range(low, high + 1))
        return cls(coeffs=coeffs, offset=low)

    def trimmed(self) -> UnivariatePoly:
        """Drop zero coefficients at both ends."""
        coeffs = list(self.coeffs)
        offset = self.offset
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            offset += 1
        return UnivariatePoly(coeffs=tuple(coeffs), offset=offset)

    @property
    def degree(self) -> int:
        """Number of torus roots: span of the trimmed support."""
        return len(self.trimmed().coeffs) - 1

    @property
    def norm(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def evaluate(self, z: complex | np.ndarray) -> complex | np.ndarray:
        values = np.polyval(np.array(self.coeffs[::-1], dtype=complex), z)
        return values * np.power(z, self.offset)


def roots(
    poly: UnivariatePoly, *, max_iterations: int = 60
) -> tuple[complex, ...]:
    """
    All roots in C_* with multiplicity.

    Companion-matrix eigenvalues seed a simultaneous Aberth iteration; each
    refined root is kept only when it lowers the residual.

    Args:
        poly: Laurent polynomial, degree >= 1 after trimming
        max_iterations: Cap on Aberth sweeps

    Returns:
        Roots sorted by (argument, modulus)

    Raises:
        DegenerateInput: If fewer than two nonzero terms remain
    """
    trimmed = poly.trimmed()
    if len(trimmed.coeffs) < 2:
        fail(DegenerateInput, f"Polynomial has no torus roots: {poly}")
    high_first = np.array(trimmed.coeffs[::-1], dtype=complex)
    derivative = np.polyder(high_first)
    z = np.roots(high_first).astype(complex)

    def residual(points: np.ndarray) -> np.ndarray:
        return np.abs(np.polyval(high_first, points))

    best = z.copy()
    best_residual = residual(best)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(max_iterations):
            p = np.polyval(high_first, z)
            dp = np.polyval(derivative, z)
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            repulsion = np.sum(1.0 / diff, axis=1)
            step = ratio / (1.0 - ratio * repulsion)
            step = np.where(np.isfinite(step), step, 0.0)
            z = z - step
            current = residual(z)
            improved = current < best_residual
            best = np.where(improved, z, best)
            best_residual = np.where(improved, current, best_residual)
            if np.all(np.abs(step) <= 1e-16 * np.maximum(1.0, np.abs(z))):
                break

    return tuple(sorted((complex(r) for r in best), key=lambda r: (np.angle(r), abs(r))))


@dataclass(frozen=True)
class RootCluster:
    value: complex
    multiplicity: int


def cluster_roots(
    values: Sequence[complex], *, tolerance: float | None = None
) -> tuple[RootCluster, ...]:
    """Merge roots within relative distance tolerance (single linkage)."""
    tolerance = CoamoebaConfig.ROOT_CLUSTER_TOLERANCE if tolerance is None else tolerance
    labels = list(range(len(values)))

    def find(i: int) -> int:
        while labels[i] != i:
            labels[i] = labels[labels[i]]
            i = labels[i]
        return i

    for i, j in itertools.combinations(range(len(values)), 2):
        scale = max(1.0, abs(values[i]), abs(values[j]))
        if abs(values[i] - values[j]) <= tolerance * scale:
            labels[find(i)] = find(j)

    groups: dict[int, list[complex]] = {}
    for i, v in enumerate(values):
        groups.setdefault(find(i), []).append(v)
    return tuple(
        RootCluster(value=complex(np.mean(members)), multiplicity=len(members))
        for members in groups.values()
    )


# ============================================================================
# BINOMIAL SYSTEMS
# ============================================================================


@dataclass(frozen=True)
class BinomialSystem:
    """
    Equations z^(matrix[i]) = targets[i].

    target_args_over_pi carries exact target arguments when known, so the
    argument congruences are solved exactly.
    """

    matrix: tuple[tuple[int, ...], ...]
    targets: tuple[complex, ...]
    target_args_over_pi: tuple[Fraction, ...] | None = None


@dataclass(frozen=True)
class BinomialSolution:
    point: tuple[complex, ...]
    log_moduli: tuple[float, ...]
    arguments: TorusPoint


def solve_binomial_system(system: BinomialSystem) -> tuple[BinomialSolution, ...]:
    """
    Solve a square binomial system on the torus.

    Moduli come from M * log|z| = log|c|; arguments from the congruences
    M * theta == arg c (mod 2*pi), which have exactly |det M| solutions.

    Raises:
        SingularExponentMatrix: If det M = 0
    """
    matrix = [list(row) for row in system.matrix]
    det = determinant(matrix)
    if det == 0:
        fail(SingularExponentMatrix, f"Binomial exponent matrix is singular: {system.matrix}")

    targets = np.array(system.targets, dtype=complex)
    log_moduli = np.linalg.solve(np.array(matrix, dtype=float), np.log(np.abs(targets)))

    args = system.target_args_over_pi
    if args is None:
        exact = [exact_argument(c) for c in system.targets]
        if all(a is not None for a in exact):
            args = tuple(a for a in exact if a is not None)
    if args is not None:
        congruences = CongruenceSystem.exact(matrix, args)
    else:
        congruences = CongruenceSystem.radians(matrix, [float(np.angle(c)) for c in system.targets])
    solution = solve_congruences(congruences)

    results: list[BinomialSolution] = []
    worst = 0.0
    for theta in solution.solutions:
        point = tuple(
            complex(math.exp(r) * np.exp(1j * a)) for r, a in zip(log_moduli, theta.angles, strict=True)
        )
        for row, c in zip(matrix, system.targets, strict=True):
            value = complex(np.prod([p**e for p, e in zip(point, row, strict=True)]))
            worst = max(worst, abs(value - c) / max(abs(c), 1e-300))
        results.append(
            BinomialSolution(point=point, log_moduli=tuple(float(x) for x in log_moduli), arguments=theta)
        )
    if worst > CoamoebaConfig.BINOMIAL_RESIDUAL_TOLERANCE:
        logger.warning(f"[Binomial] relative residual {worst:.2e} above tolerance")
    logger.debug(f"[Binomial] |det M| = {abs(det)}, {len(results)} solutions")
    return tuple(results)


# ============================================================================
# FIBERS AND CURVE SAMPLING
# ============================================================================


def batched_fiber_roots(
    coeffs: np.ndarray, *, tolerance: float | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Roots of many polynomials of a common degree.

    Args:
        coeffs: Array (..., d + 1), lowest degree first
        tolerance: Relative floor for leading and trailing coefficients

    Returns:
        (roots of shape (..., d) with NaN on degenerate rows, degenerate mask)
    """
    tolerance = CoamoebaConfig.DEGENERATE_FIBER_TOLERANCE if tolerance is None else tolerance
    shape = coeffs.shape[:-1]
    d = coeffs.shape[-1] - 1
    flat = coeffs.reshape(-1, d + 1)
    scale = np.max(np.abs(flat), axis=1)
    degenerate = (np.abs(flat[:, -1]) <= tolerance * scale) | (np.abs(flat[:, 0]) <= tolerance * scale)
    safe = flat.copy()
    safe[degenerate] = 1.0

    with np.errstate(divide="ignore", invalid="ignore"):
        if d == 1:
            result = (-safe[:, 0] / safe[:, 1])[:, None]
        elif d == 2:
            c, b, a = safe[:, 0], safe[:, 1], safe[:, 2]
            disc = np.sqrt(b * b - 4 * a * c)
            disc = np.where((np.conj(b) * disc).real < 0, -disc, disc)
            q = -0.5 * (b + disc)
            result = np.stack([q / a, c / q], axis=1)
        else:
            monic = safe[:, :-1] / safe[:, -1:]
            companion = np.zeros((flat.shape[0], d, d), dtype=complex)
            companion[:, 1:, :-1] = np.eye(d - 1)
            companion[:, :, -1] = -monic
            result = np.linalg.eigvals(companion)

    result = result.astype(complex)
    result[degenerate] = np.nan
    return result.reshape(*shape, d), degenerate.reshape(shape)


def fiber_coefficients(config: Support, coeffs: Sequence[complex], z1: np.ndarray) -> np.ndarray:
    """Coefficients (lowest first) of f(z1, z2) as a polynomial in z2, one row per z1."""
    exponents2 = [p[1] for p in config.points]
    low = min(exponents2)
    d = max(exponents2) - low
    z1 = np.asarray(z1, dtype=complex)
    out = np.zeros((*z1.shape, d + 1), dtype=complex)
    for (e1, e2), c in zip(config.points, coeffs, strict=True):
        out[..., e2 - low] += complex(c) * np.power(z1, e1)
    return out


@dataclass(frozen=True)
class CurveGrid:
    """Log-radius x angle grid for the first coordinate."""

    log_radius_half_span: float
    radius_steps: int
    angle_steps: int

    @classmethod
    def for_resolution(cls, resolution: int) -> CurveGrid:
        return cls(
            log_radius_half_span=CoamoebaConfig.LOG_RADIUS_HALF_SPAN,
            radius_steps=CoamoebaConfig.RADIUS_STEPS_PER_PIXEL * resolution,
            angle_steps=CoamoebaConfig.FIBER_COLUMNS_PER_PIXEL * resolution,
        )

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(self.angle_steps) + 0.5) / self.angle_steps

    def log_radii(self) -> np.ndarray:
        return np.linspace(-self.log_radius_half_span, self.log_radius_half_span, self.radius_steps)


@dataclass(frozen=True)
class CurveSample:
    arguments: np.ndarray  # (k, 2) in [0, 2*pi)
    fibers: int
    skipped_fibers: int


def curve_sample(config: Support, coeffs: Sequence[complex], grid: CurveGrid) -> CurveSample:
    """
    Argument pairs of points on Z(f) over a grid of first coordinates.

    Raises:
        DegenerateInput: If the support is not planar
        EmptyCurve: If no fiber yields a root
    """
    if config.n != 2:
        fail(DegenerateInput, f"curve_sample needs a planar support, got dimension {config.n}")
    z1 = np.exp(grid.log_radii()[None, :] + 1j * grid.angles()[:, None])
    fiber = fiber_coefficients(config, coeffs, z1)
    if fiber.shape[-1] < 2:
        fail(EmptyCurve, f"Support {config.points} has no fibers with roots")
    found, degenerate = batched_fiber_roots(fiber)
    alpha = np.broadcast_to(np.angle(z1)[..., None], found.shape)
    keep = np.isfinite(found) & (found != 0)
    if not np.any(keep):
        fail(EmptyCurve, f"No fiber of {config.points} produced a root")
    args = np.stack([np.mod(alpha[keep], 2 * np.pi), np.mod(np.angle(found[keep]), 2 * np.pi)], axis=1)
    skipped = int(np.count_nonzero(degenerate))
    if skipped:
        logger.debug(f"[Curve] skipped {skipped} degenerate fibers")
    return CurveSample(arguments=args, fibers=int(degenerate.size), skipped_fibers=skipped)


# ============================================================================
# RESULTANTS
# ============================================================================


BivariatePoly = Mapping[tuple[int, int], Coefficient]


def _is_exact(poly: BivariatePoly) -> bool:
    return all(isinstance(c, int | Fraction) for c in poly.values())


def _in_eliminated(poly: BivariatePoly, eliminate: int) -> list[dict[int, Coefficient]]:
    """Coefficient polynomials (kept variable) indexed by degree in the eliminated one."""
    keep = 1 - eliminate
    low_e = min(e[eliminate] for e in poly)
    low_k = min(e[keep] for e in poly)
    degree = max(e[eliminate] for e in poly) - low_e
    rows: list[dict[int, Coefficient]] = [{} for _ in range(degree + 1)]
    for exps, c in poly.items():
        if c == 0:
            continue
        row = rows[exps[eliminate] - low_e]
        k = exps[keep] - low_k
        row[k] = row.get(k, 0) + c
    return rows


def _sylvester(p_rows: Sequence[object], q_rows: Sequence[object]) -> list[list[object]]:
    dp, dq = len(p_rows) - 1, len(q_rows) - 1
    size = dp + dq
    matrix: list[list[object]] = [[0] * size for _ in range(size)]
    # highest degree first along each row
    for i in range(dq):
        for j, c in enumerate(reversed(p_rows)):
            matrix[i][i + j] = c
    for i in range(dp):
        for j, c in enumerate(reversed(q_rows)):
            matrix[dq + i][i + j] = c
    return matrix


def sylvester_resultant(p: BivariatePoly, q: BivariatePoly, eliminate: int = 1) -> UnivariatePoly:
    """
    Resultant of two bivariate Laurent polynomials with respect to one variable.

    Both are shifted to ordinary polynomials first. Integer/Fraction inputs go
    through sympy exactly; complex inputs are evaluated on roots of unity and
    interpolated by FFT, each Sylvester determinant by pivoted LU.

    Args:
        p, q: {(e1, e2): coefficient}
        eliminate: 0 to eliminate z1, 1 to eliminate z2

    Returns:
        Polynomial in the kept variable

    Raises:
        IdenticallyZeroResultant: For pairs with a common factor
    """
    p_rows = _in_eliminated(p, eliminate)
    q_rows = _in_eliminated(q, eliminate)
    if len(p_rows) < 2 and len(q_rows) < 2:
        fail(IdenticallyZeroResultant, "Neither polynomial involves the eliminated variable")

    if _is_exact(p) and _is_exact(q):
        x = sympy.Symbol("x")

        def to_expr(row: dict[int, Coefficient]) -> sympy.Expr:
            return sympy.Add(*[sympy.Rational(str(c)) * x**k for k, c in row.items()])

        matrix = sympy.Matrix(_sylvester([to_expr(r) for r in p_rows], [to_expr(r) for r in q_rows]))
        resultant = sympy.Poly(sympy.expand(matrix.det(method="berkowitz")), x)
        if resultant.is_zero:
            fail(IdenticallyZeroResultant, f"Resultant vanishes identically for {dict(p)} and {dict(q)}")
        terms = {int(m[0]): complex(Fraction(str(c))) for m, c in resultant.terms()}
        return UnivariatePoly.from_terms(terms).trimmed()

    def degree_kept(rows: Sequence[dict[int, Coefficient]]) -> int:
        return max((max(r) for r in rows if r), default=0)

    dp, dq = len(p_rows) - 1, len(q_rows) - 1
    bound = dp * degree_kept(q_rows) + dq * degree_kept(p_rows)
    samples = bound + 1
    nodes = np.exp(2j * np.pi * np.arange(samples) / samples)

    def eval_rows(rows: Sequence[dict[int, Coefficient]], x: complex) -> list[complex]:
        return [sum(complex(c) * x**k for k, c in r.items()) for r in rows]

    values = np.array(
        [np.linalg.det(np.array(_sylvester(eval_rows(p_rows, x), eval_rows(q_rows, x)), dtype=complex))
         for x in nodes]
    )
    coeffs = np.fft.fft(values) / samples

    p_norm = max(abs(complex(c)) for c in p.values())
    q_norm = max(abs(complex(c)) for c in q.values())
    scale = max(p_norm**dq * q_norm**dp, 1e-300)
    if np.max(np.abs(coeffs)) <= CoamoebaConfig.INDETERMINACY_TOLERANCE * scale:
        fail(IdenticallyZeroResultant, "Resultant vanishes identically (numerically)")
    floor = 1e-11 * np.max(np.abs(coeffs))
    coeffs = np.where(np.abs(coeffs) <= floor, 0.0, coeffs)
    return UnivariatePoly(coeffs=tuple(complex(c) for c in coeffs), offset=0).trimmed()


def mixed_volume_2d(first: Sequence[Sequence[int]], second: Sequence[Sequence[int]]) -> int:
    """
    Mixed volume of two lattice polygons: Area(P + Q) - Area(P) - Area(Q).

    Equals the generic number of torus roots of a planar pair (Bernstein).

    Example:
        >>> mixed_volume_2d([(0, 0), (1, 0), (0, 1)], [(0, 0), (1, 0), (0, 1)])
        1
    """
    minkowski = [(a[0] + b[0], a[1] + b[1]) for a in first for b in second]
    return (twice_area(minkowski) - twice_area(first) - twice_area(second)) // 2
