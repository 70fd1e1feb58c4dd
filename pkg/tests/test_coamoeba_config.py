"""
Tests for coamoeba_config module.

Tests the centralized tolerances and the settings-file loader.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import pytest

from coamoeba_config import CoamoebaConfig, applied_settings, load_settings


class TestCoamoebaConfigConstants:
    """Tests for the constant table."""

    def test_default_settings_mirror_constants(self) -> None:
        """Every default setting equals its class constant."""
        for name, value in CoamoebaConfig.DEFAULT_SETTINGS.items():
            assert getattr(CoamoebaConfig, name.upper()) == value

    def test_exit_codes_are_distinct(self) -> None:
        """Exit codes 0..3 are all different."""
        codes = {
            CoamoebaConfig.EXIT_OK,
            CoamoebaConfig.EXIT_VALIDATION,
            CoamoebaConfig.EXIT_DEGENERACY,
            CoamoebaConfig.EXIT_INDETERMINATE,
        }
        assert codes == {0, 1, 2, 3}

    def test_max_fill_jump_is_quarter_turn(self) -> None:
        """Pushforward fill threshold is pi / 2."""
        assert CoamoebaConfig.MAX_FILL_JUMP == pytest.approx(math.pi / 2)


class TestGetTolerance:
    """Tests for get_tolerance."""

    def test_default_lookup(self) -> None:
        """Without settings the constant is returned."""
        assert CoamoebaConfig.get_tolerance("sector_tolerance") == 1e-6

    def test_override_lookup(self) -> None:
        """A loaded mapping takes precedence."""
        settings = dict(CoamoebaConfig.DEFAULT_SETTINGS)
        settings["sector_tolerance"] = 1e-4
        assert CoamoebaConfig.get_tolerance("sector_tolerance", settings) == 1e-4  # type: ignore[arg-type]

    def test_unknown_name_raises(self) -> None:
        """Unknown names list the known ones."""
        with pytest.raises(ValueError, match="Known tolerances"):
            CoamoebaConfig.get_tolerance("no_such_tolerance")


class TestPixelArea:
    """Tests for pixel_area."""

    @pytest.mark.parametrize("resolution", [1, 64, 1024])
    def test_pixels_tile_the_torus(self, resolution: int) -> None:
        """resolution^2 pixels cover 4 pi^2."""
        total = CoamoebaConfig.pixel_area(resolution) * resolution**2
        assert total == pytest.approx(4 * math.pi**2)

    @pytest.mark.parametrize("resolution", [0, -8])
    def test_non_positive_resolution_raises(self, resolution: int) -> None:
        """Resolution must be positive."""
        with pytest.raises(ValueError):
            CoamoebaConfig.pixel_area(resolution)


class TestLoadSettings:
    """Tests for load_settings."""

    def test_none_gives_defaults(self) -> None:
        """No path returns a copy of the defaults."""
        settings = load_settings(None)
        assert settings == CoamoebaConfig.DEFAULT_SETTINGS
        assert settings is not CoamoebaConfig.DEFAULT_SETTINGS

    def test_shipped_settings_file_matches_defaults(self, project_root: Path) -> None:
        """coamoeba_settings.json repeats the built-in defaults."""
        settings = load_settings(project_root / "coamoeba_settings.json")
        assert settings == CoamoebaConfig.DEFAULT_SETTINGS

    def test_override_merges_over_defaults(self, tmp_path: Path) -> None:
        """Known keys are overridden, the rest keep their defaults."""
        path = tmp_path / "settings.json"
        path.write_text(json.dumps({"sector_tolerance": 1e-3}))
        settings = load_settings(path)
        assert settings["sector_tolerance"] == 1e-3
        assert settings["angle_tolerance"] == CoamoebaConfig.ANGLE_TOLERANCE

    def test_unknown_keys_are_ignored(self, tmp_path: Path, caplog: pytest.LogCaptureFixture) -> None:
        """Unknown keys are dropped with a warning."""
        path = tmp_path / "settings.json"
        path.write_text(json.dumps({"bogus": 1.0}))
        settings = load_settings(path)
        assert "bogus" not in settings
        assert "Ignoring unknown key" in caplog.text

    def test_missing_file_falls_back(self, tmp_path: Path) -> None:
        """A missing file gives the defaults."""
        assert load_settings(tmp_path / "absent.json") == CoamoebaConfig.DEFAULT_SETTINGS

    def test_invalid_json_falls_back(self, tmp_path: Path, caplog: pytest.LogCaptureFixture) -> None:
        """Unreadable JSON gives the defaults and a warning."""
        path = tmp_path / "settings.json"
        path.write_text("{not json")
        assert load_settings(path) == CoamoebaConfig.DEFAULT_SETTINGS
        assert "Could not load" in caplog.text

    def test_shipped_file_is_not_read_implicitly(self, project_root: Path) -> None:
        """Without a path the defaults come from the class, not the shipped file."""
        assert (project_root / "coamoeba_settings.json").exists()
        assert load_settings() == CoamoebaConfig.DEFAULT_SETTINGS


class TestAppliedSettings:
    """Tests for applied_settings."""

    def test_installs_and_restores(self) -> None:
        """Overrides are visible inside the block and gone after it."""
        settings = load_settings()
        settings["root_cluster_tolerance"] = 0.5
        with applied_settings(settings):
            assert CoamoebaConfig.ROOT_CLUSTER_TOLERANCE == 0.5
            assert CoamoebaConfig.ANGLE_TOLERANCE == 1e-12
        assert CoamoebaConfig.ROOT_CLUSTER_TOLERANCE == 1e-7

    def test_restores_after_error(self) -> None:
        """An exception inside the block still restores the defaults."""
        settings = load_settings()
        settings["sector_tolerance"] = 1.0
        with pytest.raises(RuntimeError), applied_settings(settings):
            raise RuntimeError("boom")
        assert CoamoebaConfig.SECTOR_TOLERANCE == 1e-6

    def test_every_setting_is_a_constant(self) -> None:
        """Each settings key names a CoamoebaConfig attribute."""
        for name in CoamoebaConfig.DEFAULT_SETTINGS:
            assert hasattr(CoamoebaConfig, name.upper())
        assert "h_margin" not in CoamoebaConfig.DEFAULT_SETTINGS
