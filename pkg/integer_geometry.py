"""
integer_geometry.py

Exact lattice geometry of circuits.

All minors, gcds and Smith normal forms are computed over Python integers;
angles entering the congruence solver stay exact when given as rational
multiples of pi.

Functions include:
- validate / profile: circuit checks, Gale vector, volumes, signs, kind
- coherent_triangulations / equimodular_check
- normalize_lattice / orthogonal_form / apply_transform
- smith_normal_form / integer_left_kernel / solve_congruences
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
import sympy

from coamoeba_config import CoamoebaConfig
from coamoeba_utils import (
    DegenerateCircuit,
    NonUnimodularKernelBasis,
    NotFullDimensional,
    TorusPoint,
    WrongCardinality,
    fail,
    integer_vectors,
    reduce_angle,
    reduce_over_pi,
)

logger = logging.getLogger(__name__)

IntMatrix = list[list[int]]


# ============================================================================
# CONFIGURATIONS
# ============================================================================


@dataclass(frozen=True)
class Support:
    """
    A finite ordered set of integer exponent vectors.

    Supports of truncations (edges, trinomials) are plain Supports; circuits
    are validated PointConfigurations.
    """

    n: int
    points: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.points)

    def augmented(self) -> IntMatrix:
        """The (n+1) x N matrix with a top row of ones."""
        rows = [[1] * self.size]
        for i in range(self.n):
            rows.append([p[i] for p in self.points])
        return rows

    def truncate(self, indices: Iterable[int]) -> Support:
        """Sub-support on the given point indices, in the given order."""
        return Support(n=self.n, points=tuple(self.points[k] for k in indices))

    def index_of(self, point: Sequence[int]) -> int:
        """Index of a point, or -1 when absent."""
        target = tuple(point)
        try:
            return self.points.index(target)
        except ValueError:
            return -1


@dataclass(frozen=True)
class PointConfiguration(Support):
    """A circuit: N = n + 2 points whose augmented matrix has full rank n + 1."""


def _rank(matrix: IntMatrix) -> int:
    return int(sympy.Matrix(matrix).rank())


def determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant."""
    if not matrix:
        return 1
    return int(sympy.Matrix([list(row) for row in matrix]).det(method="bareiss"))


def validate(points: Sequence[Sequence[int]]) -> PointConfiguration:
    """
    Validate a circuit point configuration.

    Args:
        points: N integer vectors of common length n

    Returns:
        The validated configuration

    Raises:
        WrongCardinality: If N != n + 2
        NotFullDimensional: If the augmented matrix has rank < n + 1

    Example:
        >>> validate([[0], [1], [2]]).n
        1
    """
    vectors = integer_vectors(points)
    if not vectors:
        fail(WrongCardinality, "Empty point configuration")
    n = len(vectors[0])
    if n == 0 or any(len(v) != n for v in vectors):
        fail(WrongCardinality, f"Points must share a positive dimension, got {vectors}")
    if len(vectors) != n + 2:
        fail(
            WrongCardinality,
            f"A circuit in dimension {n} has {n + 2} points, got {len(vectors)}:\n"
            f"  {vectors}",
        )
    config = PointConfiguration(n=n, points=vectors)
    rank = _rank(config.augmented())
    if rank < n + 1:
        fail(
            NotFullDimensional,
            f"Augmented point matrix has rank {rank} < {n + 1}; points do not span dimension {n}:\n"
            f"  {vectors}",
        )
    return config


# ============================================================================
# GALE DUAL AND PROFILE
# ============================================================================


class CircuitKind(Enum):
    VERTEX = "VertexCircuit"
    SIMPLEX = "SimplexCircuit"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class CircuitProfile:
    """
    Gale data of a circuit.

    Attributes:
        raw_gale: b_k = (-1)^k det(A_k), oriented (see profile())
        primitive_gale: raw_gale divided by the gcd of its entries
        volumes: V_k = |b_k|
        signs: delta_k in {-1, 0, +1}
        total_volume: Vol(A) = sum of V_k over delta_k = +1
        kind: vertex, simplex or degenerate circuit
        lattice_index: index of the affine lattice ZA in Z^n
        triangulations: (T_plus, T_minus), maximal simplices as point-index tuples
        orientation: +1 or -1, the sign applied to the signed minors
    """

    raw_gale: tuple[int, ...]
    primitive_gale: tuple[int, ...]
    volumes: tuple[int, ...]
    signs: tuple[int, ...]
    total_volume: int
    kind: CircuitKind
    lattice_index: int
    triangulations: tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]
    orientation: int = 1

    @property
    def normalized_volume(self) -> int:
        """Vol(A) measured in the lattice ZA."""
        return self.total_volume // self.lattice_index

    @property
    def positive(self) -> tuple[int, ...]:
        return tuple(k for k, s in enumerate(self.signs) if s > 0)

    @property
    def negative(self) -> tuple[int, ...]:
        return tuple(k for k, s in enumerate(self.signs) if s < 0)

    @property
    def interior_index(self) -> int | None:
        """The non-vertex point of a simplex circuit."""
        if self.kind is not CircuitKind.SIMPLEX:
            return None
        return self.negative[0]

    def require_nondegenerate(self) -> None:
        if self.kind is CircuitKind.DEGENERATE:
            fail(DegenerateCircuit, f"Circuit is degenerate (pyramid): Gale vector {self.raw_gale}")


def signed_minors(config: Support) -> tuple[int, ...]:
    """(-1)^k det(A_k), A_k the augmented matrix without column k."""
    rows = config.augmented()
    minors: list[int] = []
    for k in range(config.size):
        sub = [[row[j] for j in range(config.size) if j != k] for row in rows]
        minors.append((-1) ** k * determinant(sub))
    return tuple(minors)


def profile(config: PointConfiguration) -> CircuitProfile:
    """
    Compute the Gale data of a circuit.

    Simplex circuits are oriented so the interior point has sign -1; vertex
    and degenerate circuits so the first nonzero entry is positive.

    Args:
        config: Validated circuit

    Returns:
        The circuit profile; degenerate circuits are profiled, not rejected

    Example:
        >>> profile(validate([[0], [1], [2]])).raw_gale
        (1, -2, 1)
    """
    minors = signed_minors(config)
    nonzero = [b for b in minors if b != 0]
    positives = [k for k, b in enumerate(minors) if b > 0]
    negatives = [k for k, b in enumerate(minors) if b < 0]

    if len(nonzero) < len(minors):
        kind = CircuitKind.DEGENERATE
    elif min(len(positives), len(negatives)) == 1:
        kind = CircuitKind.SIMPLEX
    else:
        kind = CircuitKind.VERTEX

    orientation = 1
    if kind is CircuitKind.SIMPLEX:
        interior_is_positive = len(positives) == 1 and len(negatives) != 1
        if interior_is_positive:
            orientation = -1
    elif nonzero and nonzero[0] < 0:
        orientation = -1

    raw = tuple(orientation * b for b in minors)
    g = math.gcd(*raw)
    primitive = tuple(b // g for b in raw) if g else raw
    signs = tuple((b > 0) - (b < 0) for b in raw)
    volumes = tuple(abs(b) for b in raw)
    total = sum(v for v, s in zip(volumes, signs, strict=True) if s > 0)

    def simplices(sign: int) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(j for j in range(config.size) if j != k)
            for k, s in enumerate(signs)
            if s == sign
        )

    result = CircuitProfile(
        raw_gale=raw,
        primitive_gale=primitive,
        volumes=volumes,
        signs=signs,
        total_volume=total,
        kind=kind,
        lattice_index=g,
        triangulations=(simplices(1), simplices(-1)),
        orientation=orientation,
    )
    logger.debug(f"[Gale] {config.points} -> B={raw}, kind={kind.value}, Vol={total}, index={g}")
    return result


def lattice_index(config: PointConfiguration) -> int:
    """Index of ZA in Z^n (the gcd of the maximal minors)."""
    return math.gcd(*signed_minors(config))


def coherent_triangulations(
    prof: CircuitProfile,
) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """
    The two coherent triangulations T_plus and T_minus.

    Raises:
        DegenerateCircuit: For pyramids
    """
    prof.require_nondegenerate()
    return prof.triangulations


@dataclass(frozen=True)
class EquimodularVerdict:
    equimodular: bool
    witness: tuple[tuple[int, ...], ...] | None = None
    witness_sign: int = 0
    volumes: tuple[int, ...] = ()


def equimodular_check(prof: CircuitProfile) -> EquimodularVerdict:
    """
    Decide whether a triangulation using every point has equal volumes.

    The one-simplex triangulation of a simplex circuit skips the interior
    point and is not a candidate.
    """
    prof.require_nondegenerate()
    size = len(prof.signs)
    for sign, triangulation in zip((1, -1), prof.triangulations, strict=True):
        used = {k for simplex in triangulation for k in simplex}
        if len(used) < size:
            continue
        vols = tuple(prof.volumes[k] for k, s in enumerate(prof.signs) if s == sign)
        if len(set(vols)) == 1:
            return EquimodularVerdict(True, triangulation, sign, vols)
    return EquimodularVerdict(False)


# ============================================================================
# SMITH NORMAL FORM
# ============================================================================


@dataclass(frozen=True)
class SmithDecomposition:
    """U * M * V = S with U, V unimodular and S diagonal, s_i | s_(i+1)."""

    left: IntMatrix
    diagonal: IntMatrix
    right: IntMatrix

    @property
    def invariants(self) -> tuple[int, ...]:
        k = min(len(self.diagonal), len(self.diagonal[0]) if self.diagonal else 0)
        return tuple(self.diagonal[i][i] for i in range(k))

    @property
    def rank(self) -> int:
        return sum(1 for s in self.invariants if s != 0)


def _identity(size: int) -> IntMatrix:
    return [[int(i == j) for j in range(size)] for i in range(size)]


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> SmithDecomposition:
    """
    Smith normal form with both transforms, by integer row/column operations.

    Args:
        matrix: m x n integer matrix

    Returns:
        SmithDecomposition(left=U, diagonal=S, right=V) with U*M*V = S
    """
    a = [list(row) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    u = _identity(m)
    v = _identity(n)

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(target: int, source: int, q: int) -> None:
        # row_target += q * row_source
        a[target] = [x + q * y for x, y in zip(a[target], a[source], strict=True)]
        u[target] = [x + q * y for x, y in zip(u[target], u[source], strict=True)]

    def add_col(target: int, source: int, q: int) -> None:
        for row in a:
            row[target] += q * row[source]
        for row in v:
            row[target] += q * row[source]

    for t in range(min(m, n)):
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j] != 0]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)

        while True:
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))

            edge = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
            edge += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
            if edge:
                _, ei, ej = min(edge)
                swap_rows(t, ei)
                swap_cols(t, ej)
                continue

            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    return SmithDecomposition(left=u, diagonal=a, right=v)


def integer_left_kernel(matrix: Sequence[Sequence[int]]) -> IntMatrix:
    """A Z-basis (as rows) of {x in Z^m : x * M = 0}."""
    snf = smith_normal_form(matrix)
    return [list(row) for row in snf.left[snf.rank:]]


def _mat_vec(matrix: Sequence[Sequence[int]], vector: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, vector, strict=True)) for row in matrix]


# ============================================================================
# AFFINE TRANSFORMS
# ============================================================================


@dataclass(frozen=True)
class AffineTransform:
    """
    a -> linear * a + translation.

    Attributes:
        linear: n x n rational matrix; integer on ZA
        translation: rational vector; integer for unimodular transforms
        basepoint: index of the point sent to the origin, when one is
        determinant: det(linear) as a Fraction
    """

    linear: tuple[tuple[Fraction, ...], ...]
    translation: tuple[Fraction, ...]
    basepoint: int | None = None

    @classmethod
    def identity(cls, n: int) -> AffineTransform:
        return cls(
            linear=tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)),
            translation=tuple(Fraction(0) for _ in range(n)),
        )

    @property
    def determinant(self) -> Fraction:
        return Fraction(str(sympy.Matrix([list(r) for r in self.linear]).det()))

    @property
    def is_identity(self) -> bool:
        identity = AffineTransform.identity(len(self.linear))
        return self.linear == identity.linear and all(t == 0 for t in self.translation)

    def map_point(self, point: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(
            sum((c * x for c, x in zip(row, point, strict=True)), Fraction(0)) + t
            for row, t in zip(self.linear, self.translation, strict=True)
        )


def apply_transform(transform: AffineTransform, config: Support) -> Support:
    """
    Apply an affine transform to every point.

    Returns a PointConfiguration when given one.

    Raises:
        ValueError: If some image point is not integral
    """
    images: list[tuple[int, ...]] = []
    for point in config.points:
        image = transform.map_point(point)
        if any(c.denominator != 1 for c in image):
            raise ValueError(
                f"Transform does not map {point} to a lattice point: {tuple(str(c) for c in image)}"
            )
        images.append(tuple(int(c) for c in image))
    if isinstance(config, PointConfiguration):
        return PointConfiguration(n=config.n, points=tuple(images))
    return Support(n=config.n, points=tuple(images))


def random_unimodular(rng: np.random.Generator, n: int, steps: int = 6) -> IntMatrix:
    """Random GL(n, Z) element as a product of elementary matrices."""
    matrix = _identity(n)
    for _ in range(steps):
        if n == 1:
            break
        i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
        q = int(rng.integers(-2, 3))
        matrix[i] = [x + q * y for x, y in zip(matrix[i], matrix[j], strict=True)]
    if rng.random() < 0.5:
        matrix[0] = [-x for x in matrix[0]]
    perm = [int(k) for k in rng.permutation(n)]
    return [matrix[k] for k in perm]


def _basepoint(config: Support) -> int:
    origin = config.index_of([0] * config.n)
    return origin if origin >= 0 else 0


def normalize_lattice(config: PointConfiguration) -> tuple[PointConfiguration, AffineTransform]:
    """
    Re-express the points in a basis of ZA so they span Z^n.

    The origin is used as basepoint when it is a point; otherwise point 0 is
    translated to the origin. Index-one configurations keep their coordinates.

    Returns:
        (normalized configuration, transform)
    """
    base_index = _basepoint(config)
    base = config.points[base_index]
    n = config.n
    differences = [[p[i] - base[i] for p in config.points] for i in range(n)]
    snf = smith_normal_form(differences)
    invariants = snf.invariants
    index = math.prod(invariants)

    if index == 1:
        linear = AffineTransform.identity(n).linear
    else:
        linear = tuple(
            tuple(Fraction(snf.left[i][j], invariants[i]) for j in range(n)) for i in range(n)
        )
    translation = tuple(
        -sum((linear[i][j] * base[j] for j in range(n)), Fraction(0)) for i in range(n)
    )
    transform = AffineTransform(linear=linear, translation=translation, basepoint=base_index)
    normalized = apply_transform(transform, config)
    assert isinstance(normalized, PointConfiguration)
    logger.debug(f"[Lattice] index {index}: {config.points} -> {normalized.points}")
    return normalized, transform


# ============================================================================
# ORTHOGONAL FORM
# ============================================================================


@dataclass(frozen=True)
class OrthogonalForm:
    """
    Result of orthogonal_form().

    Attributes:
        config: Transformed configuration
        transform: The affine map applied
        positive_block: Coordinates carrying the positive-Gale points
        negative_block: Coordinates carrying the negative-Gale points
        special: Whether the axis-point shape was achieved
        kernel_determinant: det of the assembled kernel-row matrix
    """

    config: PointConfiguration
    transform: AffineTransform
    positive_block: tuple[int, ...]
    negative_block: tuple[int, ...]
    special: bool
    kernel_determinant: int


def _axis_basis(block_points: list[tuple[int, ...]]) -> tuple[int, IntMatrix] | None:
    """
    Pick the point that stays off the axes and a unimodular W sending the
    others to -p_i e_i. Returns (position of that point, W) or None.
    """
    m = len(block_points) - 1
    for q_pos in range(m + 1):
        others = [p for k, p in enumerate(block_points) if k != q_pos]
        columns = []
        for p in others:
            g = math.gcd(*p)
            columns.append([-x // g for x in p])
        basis = [[columns[j][i] for j in range(m)] for i in range(m)]
        if abs(determinant(basis)) != 1:
            continue
        inverse = sympy.Matrix(basis).inv()
        w = [[int(inverse[i, j]) for j in range(m)] for i in range(m)]
        return q_pos, w
    return None


def orthogonal_form(config: PointConfiguration, *, strict: bool = True) -> OrthogonalForm:
    """
    Put a circuit in (special) orthogonal form via left-kernel rows.

    Rows v with v * A_2 = 0 give the coordinates of the positive block, rows
    u with u * A_1 = 0 those of the negative block, where A_1 / A_2 are the
    augmented columns of the positive / negative Gale points.

    Args:
        config: Nondegenerate circuit, ideally lattice-normalized
        strict: Raise when the kernel rows are not unimodular; otherwise
            return the (rational) form and log a warning

    Raises:
        DegenerateCircuit: For pyramids
        NonUnimodularKernelBasis: If strict and |det| != 1
    """
    prof = profile(config)
    prof.require_nondegenerate()
    aug = config.augmented()
    pos, neg = prof.positive, prof.negative
    a_pos = [[row[k] for k in pos] for row in aug]
    a_neg = [[row[k] for k in neg] for row in aug]
    v_rows = integer_left_kernel(a_neg)
    u_rows = integer_left_kernel(a_pos)
    kernel_matrix = [[1] + [0] * config.n, *v_rows, *u_rows]
    det = determinant(kernel_matrix)

    if abs(det) != 1:
        msg = (
            f"Kernel-row transform has determinant {det}, not invertible over Z.\n"
            f"  points: {config.points}\n"
            f"  lattice index: {prof.lattice_index}"
        )
        if strict:
            fail(NonUnimodularKernelBasis, msg)
        logger.warning(f"[Orthogonal] {msg}")

    images = [tuple(_mat_vec(kernel_matrix, [1, *p])[1:]) for p in config.points]
    m1 = len(v_rows)
    positive_block = tuple(range(m1))
    negative_block = tuple(range(m1, config.n))

    # Per-block GL(Z) change of basis towards axis points
    w_full = _identity(config.n)
    special = True
    for block, indices in ((positive_block, pos), (negative_block, neg)):
        if not block:
            special = special and all(all(c == 0 for c in images[k]) for k in indices)
            continue
        block_points = [tuple(images[k][i] for i in block) for k in indices]
        choice = _axis_basis(block_points)
        if choice is None:
            special = False
            continue
        _, w = choice
        for r, i in enumerate(block):
            for c, j in enumerate(block):
                w_full[i][j] = w[r][c]

    final_points = tuple(tuple(_mat_vec(w_full, p)) for p in images)
    affine_rows = [row[1:] for row in kernel_matrix[1:]]
    offsets = [row[0] for row in kernel_matrix[1:]]
    linear = [[sum(w_full[i][k] * affine_rows[k][j] for k in range(config.n)) for j in range(config.n)]
              for i in range(config.n)]
    translation = _mat_vec(w_full, offsets)
    transform = AffineTransform(
        linear=tuple(tuple(Fraction(x) for x in row) for row in linear),
        translation=tuple(Fraction(x) for x in translation),
        basepoint=prof.interior_index,
    )
    result = PointConfiguration(n=config.n, points=final_points)
    if special:
        special = special_blocks(result) is not None
    logger.debug(f"[Orthogonal] {config.points} -> {final_points} (special={special}, det={det})")
    return OrthogonalForm(
        config=result,
        transform=transform,
        positive_block=positive_block,
        negative_block=negative_block,
        special=special,
        kernel_determinant=det,
    )


@dataclass(frozen=True)
class SpecialBlock:
    """One coordinate block of a special orthogonal form."""

    coordinates: tuple[int, ...]
    axis_points: tuple[int, ...]  # axis_points[r] sits on coordinate coordinates[r]
    apex: int  # the remaining point, all block coordinates of the opposite sign


@dataclass(frozen=True)
class SpecialShape:
    blocks: tuple[SpecialBlock, ...]
    centre: int | None  # single-point block sitting at the origin, if any


def special_blocks(config: PointConfiguration) -> SpecialShape | None:
    """
    Recognize special orthogonal form.

    Each Gale sign class occupies its own coordinate block; within a block of
    m + 1 points, m points lie on distinct coordinate half-axes of a common
    sign and the last point has all block coordinates of the opposite sign.
    A single-point class must be the origin.
    """
    prof = profile(config)
    if prof.kind is CircuitKind.DEGENERATE:
        return None
    blocks: list[SpecialBlock] = []
    centre: int | None = None
    used: set[int] = set()
    for indices in (prof.positive, prof.negative):
        support = sorted({i for k in indices for i in range(config.n) if config.points[k][i] != 0})
        if len(indices) == 1:
            if support:
                return None
            centre = indices[0]
            continue
        if len(support) != len(indices) - 1 or used & set(support):
            return None
        used |= set(support)
        shape = _match_block(config, indices, tuple(support))
        if shape is None:
            return None
        blocks.append(shape)
    if len(used) != config.n:
        return None
    return SpecialShape(blocks=tuple(blocks), centre=centre)


def _match_block(
    config: PointConfiguration, indices: Sequence[int], coords: tuple[int, ...]
) -> SpecialBlock | None:
    for apex in indices:
        rest = [k for k in indices if k != apex]
        apex_vals = [config.points[apex][i] for i in coords]
        if any(x == 0 for x in apex_vals):
            continue
        apex_sign = 1 if apex_vals[0] > 0 else -1
        if any((x > 0) != (apex_sign > 0) for x in apex_vals):
            continue
        placement: dict[int, int] = {}
        for k in rest:
            nonzero = [i for i in coords if config.points[k][i] != 0]
            if len(nonzero) != 1:
                break
            i = nonzero[0]
            if (config.points[k][i] > 0) == (apex_sign > 0) or i in placement:
                break
            placement[i] = k
        else:
            return SpecialBlock(
                coordinates=coords,
                axis_points=tuple(placement[i] for i in coords),
                apex=apex,
            )
    return None


# ============================================================================
# CONGRUENCES
# ============================================================================


@dataclass(frozen=True)
class CongruenceSystem:
    """
    <lhs_k, x> == rhs_k (mod 2*pi).

    rhs_over_pi holds the exact right-hand sides as multiples of pi when all
    are rational; rhs then mirrors it in radians.
    """

    lhs: tuple[tuple[int, ...], ...]
    rhs: tuple[float, ...]
    rhs_over_pi: tuple[Fraction, ...] | None = None

    @classmethod
    def exact(cls, lhs: Sequence[Sequence[int]], rhs_over_pi: Sequence[Fraction | int]) -> CongruenceSystem:
        exact = tuple(Fraction(c) for c in rhs_over_pi)
        return cls(
            lhs=tuple(tuple(row) for row in lhs),
            rhs=tuple(float(c) * math.pi for c in exact),
            rhs_over_pi=exact,
        )

    @classmethod
    def radians(cls, lhs: Sequence[Sequence[int]], rhs: Sequence[float]) -> CongruenceSystem:
        return cls(lhs=tuple(tuple(row) for row in lhs), rhs=tuple(float(c) for c in rhs))

    @property
    def unknowns(self) -> int:
        return len(self.lhs[0]) if self.lhs else 0


@dataclass(frozen=True)
class CongruenceSolution:
    """
    Solution set: a coset of a closed torus subgroup.

    Attributes:
        consistent: False when the system has no solution
        free_directions: integer directions of the continuous part
        torsion: diagonal invariants of the finite part
        solutions: all solutions when the set is finite, else one particular
    """

    consistent: bool
    free_directions: tuple[tuple[int, ...], ...] = ()
    torsion: tuple[int, ...] = ()
    solutions: tuple[TorusPoint, ...] = field(default_factory=tuple)

    @property
    def finite(self) -> bool:
        return self.consistent and not self.free_directions

    @property
    def count(self) -> int | None:
        if not self.consistent:
            return 0
        return len(self.solutions) if self.finite else None

    @property
    def particular(self) -> TorusPoint | None:
        return self.solutions[0] if self.solutions else None


def solve_congruences(
    system: CongruenceSystem, *, tolerance: float | None = None
) -> CongruenceSolution:
    """
    Solve <lhs_k, x> == rhs_k (mod 2*pi) via Smith normal form.

    With U * L * V = S, substitute x = V y: the system becomes s_i y_i == (U c)_i.
    Rows beyond the rank must have (U c)_i == 0 (mod 2*pi); unknowns beyond the
    rank are free.

    Args:
        system: The congruence system
        tolerance: Consistency tolerance in radians for float right-hand sides
            (default: CoamoebaConfig.ANGLE_TOLERANCE)

    Returns:
        The solution set, with every solution enumerated when it is finite

    Example:
        >>> sol = solve_congruences(CongruenceSystem.exact([[0], [2]], [0, 0]))
        >>> sorted(p.exact for p in sol.solutions)
        [(Fraction(0, 1),), (Fraction(1, 1),)]
    """
    tolerance = CoamoebaConfig.ANGLE_TOLERANCE if tolerance is None else tolerance
    lhs = [list(row) for row in system.lhs]
    d = system.unknowns
    snf = smith_normal_form(lhs)
    invariants = snf.invariants
    rank = snf.rank
    exact = system.rhs_over_pi is not None

    if exact:
        assert system.rhs_over_pi is not None
        transformed: list[Fraction] | list[float] = [
            sum((Fraction(u) * c for u, c in zip(row, system.rhs_over_pi, strict=True)), Fraction(0))
            for row in snf.left
        ]
    else:
        transformed = [
            sum(u * c for u, c in zip(row, system.rhs, strict=True)) for row in snf.left
        ]

    for i in range(rank, len(lhs)):
        value = transformed[i]
        if exact:
            consistent = reduce_over_pi(Fraction(value)) == 0
        else:
            weight = max(1.0, float(sum(abs(u) for u in snf.left[i])))
            residual = reduce_angle(float(value))
            consistent = min(residual, 2 * math.pi - residual) <= tolerance * weight
        if not consistent:
            logger.debug(f"[Congruence] inconsistent row {i}: {value}")
            return CongruenceSolution(consistent=False)

    free = tuple(tuple(snf.right[r][j] for r in range(d)) for j in range(rank, d))
    torsion = tuple(invariants[:rank])

    # y_i = (c_i + 2 j_i) / s_i over pi, or (c_i + 2 pi j_i) / s_i in radians
    choices: list[range] = [range(s) for s in torsion] if not free else [range(1)] * rank

    def point_for(js: Sequence[int]) -> TorusPoint:
        if exact:
            y = [(Fraction(transformed[i]) + 2 * j) / torsion[i] for i, j in enumerate(js)]
            y += [Fraction(0)] * (d - rank)
            x = [sum((snf.right[r][c] * y[c] for c in range(d)), Fraction(0)) for r in range(d)]
            return TorusPoint.from_over_pi(x)
        yf = [(float(transformed[i]) + 2 * math.pi * j) / torsion[i] for i, j in enumerate(js)]
        yf += [0.0] * (d - rank)
        return TorusPoint.from_radians(sum(snf.right[r][c] * yf[c] for c in range(d)) for r in range(d))

    solutions = tuple(point_for(js) for js in itertools.product(*choices))
    logger.debug(
        f"[Congruence] rank {rank}, torsion {torsion}, free {len(free)}, {len(solutions)} listed"
    )
    return CongruenceSolution(
        consistent=True, free_directions=free, torsion=torsion, solutions=solutions
    )


# ============================================================================
# PLANAR HULLS
# ============================================================================


def convex_hull_2d(points: Sequence[Sequence[int]]) -> list[int]:
    """Indices of hull vertices in counterclockwise order (collinear points dropped)."""
    order = sorted(range(len(points)), key=lambda k: (points[k][0], points[k][1]))
    unique: list[int] = []
    for k in order:
        if not unique or tuple(points[unique[-1]]) != tuple(points[k]):
            unique.append(k)
    if len(unique) <= 2:
        return unique

    def cross(o: int, a: int, b: int) -> int:
        return (points[a][0] - points[o][0]) * (points[b][1] - points[o][1]) - (
            points[a][1] - points[o][1]
        ) * (points[b][0] - points[o][0])

    lower: list[int] = []
    for k in unique:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], k) <= 0:
            lower.pop()
        lower.append(k)
    upper: list[int] = []
    for k in reversed(unique):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], k) <= 0:
            upper.pop()
        upper.append(k)
    return lower[:-1] + upper[:-1]


def twice_area(points: Sequence[Sequence[int]]) -> int:
    """Twice the Euclidean area of the convex hull (shoelace)."""
    hull = convex_hull_2d(points)
    if len(hull) < 3:
        return 0
    total = 0
    for a, b in itertools.pairwise([*hull, hull[0]]):
        total += points[a][0] * points[b][1] - points[b][0] * points[a][1]
    return abs(total)
