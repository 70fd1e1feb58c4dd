"""
critical_arguments.py

Critical points of circuit polynomials in special orthogonal form, and the
check that their arguments index the complement of the closed coamoeba.

In special orthogonal form every coordinate i meets exactly two monomials
(its axis point and the apex of its block), so z_i * d_i f = 0 is the
binomial z^(apex - axis) = -(axis)_i f_axis / ((apex)_i f_apex). The target
is a positive multiple of f_axis / f_apex, so its argument is exact whenever
the coefficient arguments are.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from coamoeba_config import CoamoebaConfig
from coamoeba_utils import (
    DegenerateInput,
    NotSpecialOrthogonalForm,
    NumericallyIndeterminate,
    TorusPoint,
    fail,
    format_over_pi,
)
from discriminant_classifier import SpaceLabel, classify_space
from integer_geometry import (
    OrthogonalForm,
    PointConfiguration,
    normalize_lattice,
    orthogonal_form,
    special_blocks,
)
from numeric_kernel import BinomialSystem, UnivariatePoly, roots, solve_binomial_system
from phase_engine import (
    CoefficientVector,
    ColopsidednessVerdict,
    OverPi,
    colopsided_at,
    complement_index_set,
    order_map,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriticalSet:
    """
    Critical points of f with their arguments and phase verdicts.

    Attributes:
        points: Critical points in C_*^n
        arguments: Their argument vectors
        verdicts: Colopsidedness of f at each argument
        order_values: Order value over pi where f is strictly colopsided, else None
        max_residual: Largest relative |z_i d_i f| over the points
    """

    points: tuple[tuple[complex, ...], ...]
    arguments: tuple[TorusPoint, ...]
    verdicts: tuple[ColopsidednessVerdict, ...]
    order_values: tuple[OverPi | None, ...]
    max_residual: float

    @property
    def size(self) -> int:
        return len(self.points)

    def to_json(self) -> dict[str, object]:
        return {
            "critical_points": [[{"re": z.real, "im": z.imag} for z in p] for p in self.points],
            "arguments_over_pi": [[format_over_pi(a) for a in t.over_pi()] for t in self.arguments],
            "verdicts": [v.to_json() for v in self.verdicts],
            "order_values_over_pi": [None if o is None else format_over_pi(o) for o in self.order_values],
            "max_residual": self.max_residual,
        }


def to_special_form(config: PointConfiguration) -> OrthogonalForm:
    """
    Lattice-normalize, then put in special orthogonal form.

    Raises:
        NonUnimodularKernelBasis: If the kernel rows are not unimodular
        NotSpecialOrthogonalForm: If the axis-point shape cannot be reached
    """
    normalized, _ = normalize_lattice(config)
    form = orthogonal_form(normalized)
    if not form.special:
        fail(NotSpecialOrthogonalForm, f"No special orthogonal form found for {config.points}")
    return form


def _critical_system(config: PointConfiguration, coeffs: CoefficientVector) -> BinomialSystem:
    shape = special_blocks(config)
    if shape is None:
        fail(
            NotSpecialOrthogonalForm,
            f"Configuration is not in special orthogonal form:\n  {config.points}\n"
            f"  run critical_arguments.to_special_form() first",
        )
    rows: dict[int, tuple[int, ...]] = {}
    targets: dict[int, complex] = {}
    args: dict[int, Fraction | None] = {}
    for block in shape.blocks:
        apex = config.points[block.apex]
        for i, axis_index in zip(block.coordinates, block.axis_points, strict=True):
            axis = config.points[axis_index]
            rows[i] = tuple(x - y for x, y in zip(apex, axis, strict=True))
            targets[i] = -axis[i] * coeffs.values[axis_index] / (apex[i] * coeffs.values[block.apex])
            if coeffs.arguments_over_pi is not None:
                args[i] = (coeffs.arguments_over_pi[axis_index] - coeffs.arguments_over_pi[block.apex]) % 2
            else:
                args[i] = None
    order = sorted(rows)
    exact = all(args[i] is not None for i in order)
    return BinomialSystem(
        matrix=tuple(rows[i] for i in order),
        targets=tuple(targets[i] for i in order),
        target_args_over_pi=tuple(Fraction(args[i] or 0) for i in order) if exact else None,
    )


def gradient_residual(config: PointConfiguration, coeffs: CoefficientVector, point: tuple[complex, ...]) -> float:
    """max_i |z_i d_i f(z)| relative to the largest monomial term."""
    monomials = [
        coeffs.values[k] * complex(np.prod([z**e for z, e in zip(point, p, strict=True)]))
        for k, p in enumerate(config.points)
    ]
    scale = max(abs(m) for m in monomials)
    worst = 0.0
    for i in range(config.n):
        value = sum(p[i] * m for p, m in zip(config.points, monomials, strict=True))
        worst = max(worst, abs(value) / scale)
    return worst


def critical_set(config: PointConfiguration, coeffs: CoefficientVector) -> CriticalSet:
    """
    All critical points of f on the torus, with phase verdicts at their arguments.

    Args:
        config: Circuit in special orthogonal form
        coeffs: Coefficients

    Returns:
        Vol(A) critical points (normalized lattice)

    Raises:
        NotSpecialOrthogonalForm: If config is not in special orthogonal form
        SingularExponentMatrix: Guarded; cannot occur for nondegenerate circuits
    """
    if coeffs.size != config.size:
        fail(DegenerateInput, f"{coeffs.size} coefficients for {config.size} points")
    solutions = solve_binomial_system(_critical_system(config, coeffs))

    points = tuple(s.point for s in solutions)
    arguments = tuple(s.arguments for s in solutions)
    verdicts = tuple(colopsided_at(config, coeffs, theta) for theta in arguments)
    order_values = tuple(
        order_map(config, coeffs, theta) if v.colopsided and v.strict else None
        for theta, v in zip(arguments, verdicts, strict=True)
    )
    residual = max((gradient_residual(config, coeffs, p) for p in points), default=0.0)
    if residual > CoamoebaConfig.CRITICAL_RESIDUAL_TOLERANCE:
        logger.warning(f"[Critical] gradient residual {residual:.2e} above tolerance")
    logger.debug(f"[Critical] {len(points)} critical points for {config.points}")
    return CriticalSet(
        points=points,
        arguments=arguments,
        verdicts=verdicts,
        order_values=order_values,
        max_residual=residual,
    )


def critical_point_count(config: PointConfiguration, coeffs: CoefficientVector) -> int:
    """
    Number of critical points of a univariate f on C_*, in the given coordinates.

    Counts roots of z f'(z); the count depends on the affine coordinates used.
    """
    if config.n != 1:
        fail(DegenerateInput, f"critical_point_count is univariate, got dimension {config.n}")
    terms: dict[int, complex] = {}
    for (a,), c in zip(config.points, coeffs.values, strict=True):
        if a != 0:
            terms[a] = terms.get(a, 0) + a * c
    poly = UnivariatePoly.from_terms(terms).trimmed()
    if len(poly.coeffs) < 2:
        return 0
    return len(roots(poly))


@dataclass(frozen=True)
class IndexSetReport:
    """
    How the critical arguments meet the complement components.

    Attributes:
        critical: The critical set
        colopsided_count: Critical arguments off the closed lopsided coamoeba
        aligned_count: Critical arguments inside it
        distinct_orders: Order values at colopsided critical arguments are distinct
        index_set_cardinality: cardinality of complement_index_set
        counts_match: colopsided_count == index_set_cardinality
        degenerate_alignment: An order value sits on the zonotope boundary
        space_class: "U0", "U1" or "indeterminate"
        complement_components: Implied by the space class (None when indeterminate)
        aligned_explained: Aligned critical arguments only occur with degenerate
            alignment or in U1
    """

    critical: CriticalSet
    colopsided_count: int
    aligned_count: int
    distinct_orders: bool
    index_set_cardinality: int
    counts_match: bool
    degenerate_alignment: bool
    space_class: str
    complement_components: int | None
    aligned_explained: bool

    @property
    def consistent(self) -> bool:
        return self.distinct_orders and self.counts_match and self.aligned_explained

    def to_json(self) -> dict[str, object]:
        return {
            **self.critical.to_json(),
            "colopsided_count": self.colopsided_count,
            "aligned_count": self.aligned_count,
            "distinct_orders": self.distinct_orders,
            "index_set_cardinality": self.index_set_cardinality,
            "counts_match": self.counts_match,
            "degenerate_alignment": self.degenerate_alignment,
            "class": self.space_class,
            "complement_components": self.complement_components,
            "consistent": self.consistent,
        }


def _distinct(values: list[OverPi]) -> bool:
    for i, a in enumerate(values):
        for b in values[i + 1 :]:
            if isinstance(a, Fraction) and isinstance(b, Fraction):
                if a == b:
                    return False
            elif abs(float(a) - float(b)) <= CoamoebaConfig.SECTOR_TOLERANCE:
                return False
    return True


def verify_index_set(config: PointConfiguration, coeffs: CoefficientVector) -> IndexSetReport:
    """
    Check that critical arguments index the complement components.

    Raises:
        NotSpecialOrthogonalForm: If config is not in special orthogonal form
    """
    critical = critical_set(config, coeffs)
    orders = [o for o in critical.order_values if o is not None]
    colopsided = len(orders)
    aligned = critical.size - colopsided
    index_set = complement_index_set(config, coeffs)
    try:
        space = classify_space(config, coeffs)
        label = space.label.value
        components: int | None = space.complement_components
    except NumericallyIndeterminate:
        label, components = "indeterminate", None
    explained = aligned == 0 or index_set.degenerate_alignment or label == SpaceLabel.U1.value
    report = IndexSetReport(
        critical=critical,
        colopsided_count=colopsided,
        aligned_count=aligned,
        distinct_orders=_distinct(orders),
        index_set_cardinality=index_set.cardinality,
        counts_match=colopsided == index_set.cardinality,
        degenerate_alignment=index_set.degenerate_alignment,
        space_class=label,
        complement_components=components,
        aligned_explained=explained,
    )
    if not report.consistent:
        logger.warning(
            f"[Critical] index-set check failed for {config.points}: "
            f"{colopsided} colopsided, cardinality {index_set.cardinality}, class {label}"
        )
    return report
