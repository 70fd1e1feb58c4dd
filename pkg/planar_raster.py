"""
planar_raster.py

Rasterized coamoebas on the 2-torus and the area checks built on them.

- raster_coamoeba(): pushforward of Z(f) under Arg, one pixel column per fixed
  arg z1, filling the vertical runs traced by each root branch as |z1| varies
- raster_lopsided(): exact colopsidedness test at every pixel centre
- covering_check() / two_colopsided_check(): sampled structure statistics for
  sign-flip trinomial quadruples and one-point truncations
- complement_components(): torus-wrapped connected components of the uncovered set
- write_ppm(): binary P6 output, covered pixels black

Images are indexed [theta2 row, theta1 column], row 0 at theta2 = 0.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from coamoeba_config import CoamoebaConfig
from coamoeba_utils import TWO_PI, DegenerateInput, TorusPoint, ValidationError, fail
from integer_geometry import CircuitKind, PointConfiguration, Support, profile, validate
from numeric_kernel import CurveGrid, batched_fiber_roots, fiber_coefficients
from phase_engine import CoefficientVector, colopsided_at, shell

logger = logging.getLogger(__name__)

# Pixel-run length handled by the vectorized fill; longer runs go through a loop
_VECTOR_SPAN = 8


# ============================================================================
# IMAGES
# ============================================================================


@dataclass(frozen=True)
class RasterImage:
    """
    Bit grid over the 2-torus.

    Attributes:
        resolution: Pixels per 2*pi along each axis
        bits: Boolean array (resolution, resolution), [theta2, theta1]
        skipped_fibers: Degenerate fibers dropped while sampling (pushforward only)
    """

    resolution: int
    bits: np.ndarray
    skipped_fibers: int = 0

    @property
    def pixel_area(self) -> float:
        return CoamoebaConfig.pixel_area(self.resolution)

    @property
    def covered(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def fraction(self) -> float:
        return self.covered / self.bits.size

    def to_json(self) -> dict[str, object]:
        return {
            "resolution": self.resolution,
            "pixels": self.covered,
            "area": area(self),
            "area_over_pi_squared": area(self) / math.pi**2,
            "skipped_fibers": self.skipped_fibers,
        }


def area(image: RasterImage) -> float:
    """Covered pixel count times pixel area."""
    return image.covered * image.pixel_area


def _require_planar(config: Support, coeffs: CoefficientVector) -> None:
    if config.n != 2:
        fail(DegenerateInput, f"Rasterization needs a planar support, got dimension {config.n}")
    if coeffs.size != config.size:
        fail(DegenerateInput, f"{coeffs.size} coefficients for {config.size} points")


def _pixel_centres(resolution: int) -> np.ndarray:
    return TWO_PI * (np.arange(resolution) + 0.5) / resolution


# ============================================================================
# ANGULAR GAPS (VECTORIZED)
# ============================================================================


def max_gaps(angles: np.ndarray) -> np.ndarray:
    """Largest angular gap (radians) along axis 0 of an array of angles."""
    reduced = np.sort(np.mod(angles, TWO_PI), axis=0)
    inner = np.max(np.diff(reduced, axis=0), axis=0) if angles.shape[0] > 1 else np.zeros(angles.shape[1:])
    wrap = reduced[0] + TWO_PI - reduced[-1]
    return np.maximum(inner, wrap)


def _phase_angles(config: Support, coeffs: CoefficientVector, theta1: np.ndarray, theta2: np.ndarray) -> np.ndarray:
    """arg f_k + <a_k, theta> for every k, stacked on axis 0."""
    args = [math.pi * float(coeffs.argument_over_pi(k)) for k in range(coeffs.size)]
    return np.stack(
        [arg + p[0] * theta1 + p[1] * theta2 for arg, p in zip(args, config.points, strict=True)]
    )


def lopsided_mask(config: Support, coeffs: CoefficientVector, theta1: np.ndarray, theta2: np.ndarray) -> np.ndarray:
    """Closed lopsided coamoeba membership: the largest gap is at most pi."""
    return max_gaps(_phase_angles(config, coeffs, theta1, theta2)) <= math.pi + CoamoebaConfig.ANGLE_TOLERANCE


# ============================================================================
# RASTERIZATION
# ============================================================================


def raster_lopsided(config: Support, coeffs: CoefficientVector, resolution: int) -> RasterImage:
    """
    Closed lopsided coamoeba, tested exactly at every pixel centre.
    """
    _require_planar(config, coeffs)
    centres = _pixel_centres(resolution)
    theta1, theta2 = np.meshgrid(centres, centres)  # [row=theta2, col=theta1]
    bits = lopsided_mask(config, coeffs, theta1, theta2)
    logger.debug(f"[Raster] lopsided: {int(bits.sum())} of {bits.size} pixels")
    return RasterImage(resolution=resolution, bits=bits)


def _matched_pairs(found: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Pair roots of consecutive radius steps along each branch.

    Args:
        found: (columns, steps, d) roots, NaN on degenerate fibers

    Returns:
        (previous, following) arrays of shape (columns, steps - 1, d)
    """
    previous, following = found[:, :-1, :], found[:, 1:, :]
    d = found.shape[-1]
    if d == 1:
        return previous, following
    if d > 4:
        order = np.argsort(np.abs(found), axis=-1)
        ordered = np.take_along_axis(found, order, axis=-1)
        return ordered[:, :-1, :], ordered[:, 1:, :]

    perms = list(itertools.permutations(range(d)))
    with np.errstate(divide="ignore", invalid="ignore"):
        costs = np.stack(
            [np.nansum(np.abs(np.log(following[..., list(p)] / previous)), axis=-1) for p in perms]
        )
    best = np.argmin(costs, axis=0)
    table = np.array(perms)[best]  # (columns, steps - 1, d)
    return previous, np.take_along_axis(following, table, axis=-1)


def _fill(bits: np.ndarray, columns: np.ndarray, start: np.ndarray, jump: np.ndarray) -> None:
    """Mark the pixel runs from start to start + jump (radians) in the given columns."""
    resolution = bits.shape[0]
    scale = resolution / TWO_PI
    u0 = start * scale
    u1 = (start + jump) * scale
    lo = np.floor(np.minimum(u0, u1)).astype(np.int64)
    span = np.floor(np.maximum(u0, u1)).astype(np.int64) - lo
    for offset in range(_VECTOR_SPAN + 1):
        mask = span >= offset
        bits[np.mod(lo[mask] + offset, resolution), columns[mask]] = True
    for k in np.flatnonzero(span > _VECTOR_SPAN):
        rows = np.mod(np.arange(lo[k] + _VECTOR_SPAN + 1, lo[k] + span[k] + 1), resolution)
        bits[rows, columns[k]] = True


def raster_coamoeba(
    config: Support,
    coeffs: CoefficientVector,
    resolution: int,
    *,
    grid: CurveGrid | None = None,
    chunk: int = 64,
) -> RasterImage:
    """
    Rasterize the coamoeba by pushing sampled curve points through Arg.

    Each fiber column fixes arg z1 = alpha, so all its points land in one pixel
    column; along each root branch the argument of z2 is continuous in |z1|, and
    consecutive samples are joined when they differ by at most MAX_FILL_JUMP.

    Args:
        config: Planar support
        coeffs: Coefficients
        resolution: Pixels per 2*pi
        grid: Sampling grid (default: tied to the resolution)
        chunk: Fiber columns solved per batch

    Returns:
        The covered pixels
    """
    _require_planar(config, coeffs)
    grid = grid or CurveGrid.for_resolution(resolution)
    bits = np.zeros((resolution, resolution), dtype=bool)
    alphas = grid.angles()
    log_radii = grid.log_radii()
    pixel_columns = np.minimum((alphas / TWO_PI * resolution).astype(np.int64), resolution - 1)
    skipped = 0

    for begin in range(0, len(alphas), chunk):
        alpha = alphas[begin : begin + chunk]
        z1 = np.exp(log_radii[None, :] + 1j * alpha[:, None])
        found, degenerate = batched_fiber_roots(fiber_coefficients(config, coeffs.values, z1))
        skipped += int(np.count_nonzero(degenerate))
        previous, following = _matched_pairs(found)
        valid = np.isfinite(previous) & np.isfinite(following) & (previous != 0) & (following != 0)
        start = np.mod(np.angle(previous), TWO_PI)
        jump = np.angle(following / np.where(valid, previous, 1.0))
        valid &= np.abs(jump) <= CoamoebaConfig.MAX_FILL_JUMP
        columns = np.broadcast_to(pixel_columns[begin : begin + chunk, None, None], previous.shape)
        _fill(bits, columns[valid], start[valid], jump[valid])

    if skipped:
        logger.debug(f"[Raster] skipped {skipped} degenerate fibers")
    logger.debug(f"[Raster] coamoeba: {int(bits.sum())} of {bits.size} pixels at R={resolution}")
    return RasterImage(resolution=resolution, bits=bits, skipped_fibers=skipped)


# ============================================================================
# SIGN-FLIP QUADRUPLES AND TRUNCATIONS
# ============================================================================


@dataclass(frozen=True)
class TrinomialQuadruple:
    """
    A planar trinomial with one marked monomial and its four sign-flip variants.

    Attributes:
        config: Three-point planar support
        coeffs: Coefficients of the base trinomial
        marked: Index of the monomial whose sign never flips
    """

    config: Support
    coeffs: CoefficientVector
    marked: int = 0
    members: tuple[CoefficientVector, ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.config.n != 2 or self.config.size != 3:
            fail(DegenerateInput, f"A quadruple needs a planar trinomial, got {self.config.points}")
        unmarked = [k for k in range(3) if k != self.marked]
        members: list[CoefficientVector] = []
        for signs in itertools.product((1, -1), repeat=2):
            current = self.coeffs
            for k, s in zip(unmarked, signs, strict=True):
                if s < 0:
                    arg = None
                    if self.coeffs.arguments_over_pi is not None:
                        arg = self.coeffs.arguments_over_pi[k] + 1
                    current = current.replace(k, -self.coeffs.values[k], arg)
            members.append(current)
        object.__setattr__(self, "members", tuple(members))

    def hyperplane_distance(self, theta: np.ndarray) -> np.ndarray:
        """Distance (radians, along the normal) from each theta row to the union of member shells."""
        distances = np.full(theta.shape[0], np.inf)
        for member in self.members:
            for family in shell(self.config, member):
                d = np.array(family.direction, dtype=float)
                value = theta @ d
                for offset in family.offsets_over_pi:
                    gap = np.abs(np.angle(np.exp(1j * (value - math.pi * float(offset)))))
                    distances = np.minimum(distances, gap / np.linalg.norm(d))
        return distances


def covering_count(quadruple: TrinomialQuadruple, theta: TorusPoint) -> int:
    """Members whose closed coamoeba contains theta (not strictly colopsided there)."""
    count = 0
    for member in quadruple.members:
        verdict = colopsided_at(quadruple.config, member, theta)
        if not (verdict.colopsided and verdict.strict):
            count += 1
    return count


@dataclass(frozen=True)
class CountStatistics:
    """Histogram of a per-sample count."""

    evaluated: int
    skipped: int
    histogram: dict[int, int]

    @property
    def constant(self) -> int | None:
        """The single observed count, or None when several occur."""
        return next(iter(self.histogram)) if len(self.histogram) == 1 else None

    def to_json(self) -> dict[str, object]:
        return {
            "evaluated": self.evaluated,
            "skipped": self.skipped,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def covering_check(
    quadruple: TrinomialQuadruple,
    samples: int,
    rng: np.random.Generator,
    *,
    margin: float = CoamoebaConfig.H_MARGIN,
) -> CountStatistics:
    """
    Count covering members at uniform random theta away from the member shells.

    For generic theta exactly one member covers it.
    """
    theta = rng.uniform(0.0, TWO_PI, size=(samples, 2))
    keep = quadruple.hyperplane_distance(theta) > margin
    kept = theta[keep]
    counts = np.zeros(kept.shape[0], dtype=np.int64)
    for member in quadruple.members:
        gaps = max_gaps(_phase_angles(quadruple.config, member, kept[:, 0], kept[:, 1]))
        counts += gaps <= math.pi
    histogram = Counter(int(c) for c in counts)
    stats = CountStatistics(evaluated=int(kept.shape[0]), skipped=int(samples - kept.shape[0]), histogram=dict(histogram))
    logger.debug(f"[Covering] {stats.histogram} ({stats.skipped} near the shells)")
    return stats


def two_colopsided_check(
    config: PointConfiguration,
    coeffs: CoefficientVector,
    samples: int,
    rng: np.random.Generator,
    *,
    margin: float = CoamoebaConfig.H_MARGIN,
) -> CountStatistics:
    """
    At random theta inside L_f, count colopsided one-point truncations.

    Samples where f is colopsided, or where two phases are within margin of
    antipodal (or of equal), are skipped.
    """
    _require_planar(config, coeffs)
    theta = rng.uniform(0.0, TWO_PI, size=(samples, 2))
    angles = _phase_angles(config, coeffs, theta[:, 0], theta[:, 1])
    inside = max_gaps(angles) < math.pi - margin
    degenerate = np.zeros(samples, dtype=bool)
    for i, j in itertools.combinations(range(config.size), 2):
        diff = np.abs(np.angle(np.exp(1j * (angles[i] - angles[j]))))
        degenerate |= (np.abs(diff - math.pi) <= margin) | (diff <= margin)
    keep = inside & ~degenerate

    counts = np.zeros(int(keep.sum()), dtype=np.int64)
    for k in range(config.size):
        rest = [j for j in range(config.size) if j != k]
        counts += max_gaps(angles[rest][:, keep]) > math.pi
    stats = CountStatistics(
        evaluated=int(keep.sum()), skipped=int(samples - keep.sum()), histogram=dict(Counter(int(c) for c in counts))
    )
    logger.debug(f"[Truncations] {stats.histogram} ({stats.skipped} skipped)")
    return stats


# ============================================================================
# COMPONENTS, OUTPUT AND RANDOM INPUT
# ============================================================================


def complement_components(image: RasterImage, *, min_size: int = 1) -> int:
    """
    Connected components of the uncovered pixels on the torus.

    4-connected labelling by scipy.ndimage, then labels touching across the
    wrap-around edges are merged. Components smaller than min_size pixels
    are ignored.
    """
    labels, count = ndimage.label(~image.bits)
    parent = list(range(count + 1))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in itertools.chain(zip(labels[0, :], labels[-1, :]), zip(labels[:, 0], labels[:, -1])):
        if a and b:
            parent[find(int(a))] = find(int(b))

    sizes: Counter[int] = Counter()
    for label, size in zip(*np.unique(labels, return_counts=True), strict=True):
        if label:
            sizes[find(int(label))] += int(size)
    return sum(1 for size in sizes.values() if size >= min_size)


def write_ppm(image: RasterImage, path: str | Path) -> Path:
    """Write a binary P6 image: covered pixels black, the rest white."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    grey = np.where(image.bits, 0, 255).astype(np.uint8)
    rgb = np.repeat(grey[:, :, None], 3, axis=2)
    header = f"P6\n{image.resolution} {image.resolution}\n255\n".encode("ascii")
    with target.open("wb") as f:
        f.write(header)
        f.write(rgb.tobytes())
    logger.info(f"[Raster] wrote {target}")
    return target


def random_coefficients(rng: np.random.Generator, size: int) -> CoefficientVector:
    """Moduli log-uniform in MODULUS_RANGE, arguments uniform on the circle."""
    low, high = CoamoebaConfig.MODULUS_RANGE
    moduli = np.exp(rng.uniform(math.log(low), math.log(high), size=size))
    args = rng.uniform(0.0, 2.0, size=size)
    return CoefficientVector.from_polar([float(m) for m in moduli], [float(a) for a in args])


def random_planar_circuit(rng: np.random.Generator, *, box: int = 3, kind: CircuitKind | None = None) -> PointConfiguration:
    """Random nondegenerate planar circuit with coordinates in [-box, box]."""
    while True:
        points = [tuple(int(x) for x in rng.integers(-box, box + 1, size=2)) for _ in range(4)]
        if len(set(points)) < 4:
            continue
        try:
            config = validate(points)
        except ValidationError:
            continue
        prof = profile(config)
        if prof.kind is CircuitKind.DEGENERATE:
            continue
        if kind is None or prof.kind is kind:
            return config
