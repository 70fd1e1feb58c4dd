"""
coamoeba_config.py

Centralized tolerances, defaults and exit codes for the coamoeba toolkit.
Every module reads its numeric thresholds from here so that reports can echo
exactly which settings produced them.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import TypedDict, cast

logger = logging.getLogger(__name__)


class ToleranceSettings(TypedDict):
    """Type definition for overridable numeric settings."""

    angle_tolerance: float
    indeterminacy_tolerance: float
    root_cluster_tolerance: float
    degenerate_fiber_tolerance: float
    sector_tolerance: float
    binomial_residual_tolerance: float
    system_residual_tolerance: float
    critical_residual_tolerance: float


class CoamoebaConfig:
    """
    Configuration constants for coamoeba computations.

    Tolerances are absolute for angles (radians) and relative to a problem
    scale for residuals and discriminant values:
    - ANGLE_TOLERANCE: float angle comparisons (exact rational inputs use none)
    - INDETERMINACY_TOLERANCE: boundary band for the space classification
    - ROOT_CLUSTER_TOLERANCE: relative distance merging near-multiple roots
    - DEGENERATE_FIBER_TOLERANCE: leading-coefficient floor for curve fibers
    - SECTOR_TOLERANCE: argument-pair clustering for sector counts

    H_MARGIN only feeds the sampled structure checks and is not an overridable
    setting.
    """

    TOOL_NAME = "coamoeba"
    VERSION = "0.1.0"

    # Tolerances
    ANGLE_TOLERANCE = 1e-12
    INDETERMINACY_TOLERANCE = 1e-10
    ROOT_CLUSTER_TOLERANCE = 1e-7
    DEGENERATE_FIBER_TOLERANCE = 1e-13
    SECTOR_TOLERANCE = 1e-6
    BINOMIAL_RESIDUAL_TOLERANCE = 1e-10
    SYSTEM_RESIDUAL_TOLERANCE = 1e-8
    CRITICAL_RESIDUAL_TOLERANCE = 1e-9
    H_MARGIN = 1e-6

    # Raster defaults
    DEFAULT_RESOLUTION = 1024
    FIBER_COLUMNS_PER_PIXEL = 2
    RADIUS_STEPS_PER_PIXEL = 2
    LOG_RADIUS_HALF_SPAN = 12.0
    MAX_FILL_JUMP = math.pi / 2

    # Randomized runs
    DEFAULT_SEED = 7
    DEFAULT_TRIALS = 200
    MODULUS_RANGE = (0.125, 8.0)
    MAX_CAMPAIGN_VOLUME = 8
    EXTENDED_PRECISION_DIGITS = 50

    # Exit codes
    EXIT_OK = 0
    EXIT_VALIDATION = 1
    EXIT_DEGENERACY = 2
    EXIT_INDETERMINATE = 3

    DEFAULT_SETTINGS: ToleranceSettings = {
        "angle_tolerance": ANGLE_TOLERANCE,
        "indeterminacy_tolerance": INDETERMINACY_TOLERANCE,
        "root_cluster_tolerance": ROOT_CLUSTER_TOLERANCE,
        "degenerate_fiber_tolerance": DEGENERATE_FIBER_TOLERANCE,
        "sector_tolerance": SECTOR_TOLERANCE,
        "binomial_residual_tolerance": BINOMIAL_RESIDUAL_TOLERANCE,
        "system_residual_tolerance": SYSTEM_RESIDUAL_TOLERANCE,
        "critical_residual_tolerance": CRITICAL_RESIDUAL_TOLERANCE,
    }

    @staticmethod
    def get_tolerance(name: str, settings: ToleranceSettings | None = None) -> float:
        """
        Look up a named tolerance, preferring an override mapping.

        Args:
            name: Settings key (e.g., "sector_tolerance")
            settings: Optional loaded settings; defaults are used when omitted

        Returns:
            The tolerance value

        Raises:
            ValueError: If the name is not a known tolerance

        Example:
            >>> CoamoebaConfig.get_tolerance("sector_tolerance")
            1e-06
        """
        source = settings if settings is not None else CoamoebaConfig.DEFAULT_SETTINGS
        if name not in CoamoebaConfig.DEFAULT_SETTINGS:
            known = ", ".join(sorted(CoamoebaConfig.DEFAULT_SETTINGS))
            raise ValueError(
                f"Unknown tolerance '{name}'.\n"
                f"Known tolerances: {known}"
            )
        return float(source.get(name, CoamoebaConfig.DEFAULT_SETTINGS[name]))  # type: ignore[misc]

    @staticmethod
    def pixel_area(resolution: int) -> float:
        """
        Area of one raster cell on the 2-torus.

        Args:
            resolution: Pixels per 2*pi along each axis

        Returns:
            (2*pi / resolution) ** 2

        Raises:
            ValueError: If resolution is not positive
        """
        if resolution <= 0:
            raise ValueError(f"Resolution must be positive, got {resolution}")
        side = 2.0 * math.pi / resolution
        return side * side


def load_settings(settings_path: str | Path | None = None) -> ToleranceSettings:
    """
    Load tolerance overrides from a JSON file merged over the defaults.

    Nothing is read unless a path is given; coamoeba_settings.json ships as a
    template holding the defaults.

    Unknown keys are ignored with a warning; an unreadable file falls back to
    the defaults.

    Args:
        settings_path: Path to a JSON object of overrides, or None

    Returns:
        Complete settings mapping
    """
    settings = cast("ToleranceSettings", dict(CoamoebaConfig.DEFAULT_SETTINGS))
    if settings_path is None:
        return settings

    path = Path(settings_path)
    if not path.exists():
        logger.warning(f"[Settings] File not found, using defaults: {path}")
        return settings

    try:
        with path.open() as f:
            user_settings = cast("dict[str, float]", json.load(f))
    except (OSError, json.JSONDecodeError) as e:
        logger.warning(f"[Settings] Could not load {path}: {e}")
        return settings

    for key, value in user_settings.items():
        if key not in CoamoebaConfig.DEFAULT_SETTINGS:
            logger.warning(f"[Settings] Ignoring unknown key '{key}'")
            continue
        settings[key] = float(value)  # type: ignore[literal-required]
    return settings


@contextmanager
def applied_settings(settings: ToleranceSettings) -> Iterator[ToleranceSettings]:
    """
    Install settings as the CoamoebaConfig tolerances for the duration of a block.

    Library functions read CoamoebaConfig at call time, so everything run inside
    the block uses the overrides. The previous values are restored on exit.

    Example:
        >>> with applied_settings({**CoamoebaConfig.DEFAULT_SETTINGS, "sector_tolerance": 1e-4}):
        ...     CoamoebaConfig.SECTOR_TOLERANCE
        0.0001
    """
    previous = {name: cast("float", getattr(CoamoebaConfig, name.upper())) for name in CoamoebaConfig.DEFAULT_SETTINGS}
    try:
        for name in CoamoebaConfig.DEFAULT_SETTINGS:
            value = settings.get(name, previous[name])
            setattr(CoamoebaConfig, name.upper(), float(value))  # type: ignore[arg-type]
            logger.debug(f"[Settings] {name} = {value}")
        yield settings
    finally:
        for name, value in previous.items():
            setattr(CoamoebaConfig, name.upper(), value)
