"""
Tests for discriminant_classifier module.

The quadratic family 1 + z + xi z^2 is the main oracle: its closed coamoeba is
the set of root arguments, so the U0/U1 label can be read off the roots.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from conftest import angles_over_pi, exact_coeffs, polar_coeffs
from hypothesis import given, settings
from hypothesis import strategies as st

from coamoeba_utils import DegenerateCircuit, DegenerateInput, NumericallyIndeterminate
from discriminant_classifier import (
    Certificate,
    SignConvention,
    SpaceLabel,
    classify_space,
    closed_form_value,
    discriminant,
    discriminant_in,
    in_discriminant_coamoeba,
    restriction_minimum,
    space_inequality,
    sweep,
    univariate_component_count,
)
from integer_geometry import PointConfiguration, profile, validate
from numeric_kernel import roots
from phase_engine import phase_arguments
from planar_raster import random_planar_circuit


class TestDiscriminant:
    """Tests for the binomial discriminant."""

    def test_quadratic(self, quadratic: PointConfiguration) -> None:
        """1 + z + xi z^2 has Delta_B = 1 - 4 xi."""
        disc = discriminant(quadratic)
        assert disc.describe() == "1 - 4*xi"
        assert disc.evaluate([1, 1, Fraction(1, 4)]) == 0

    def test_hypocycloid(self, hypocycloid: PointConfiguration) -> None:
        """Delta = f3^3 + 27 f0 f1 f2."""
        disc = discriminant(hypocycloid)
        assert disc.plus_constant == 1
        assert disc.minus_constant == -27
        assert disc.plus_exponents == (0, 0, 0, 3)
        assert disc.minus_exponents == (1, 1, 1, 0)
        assert disc.evaluate([1, 1, 1, -3]) == 0
        assert disc.evaluate([1, 1, 1, 1]) == 28

    def test_reduced_polynomial_root(self, quadratic: PointConfiguration) -> None:
        """The reduced form vanishes at xi = c_plus / c_minus."""
        found = roots(discriminant(quadratic).reduced_polynomial())
        assert found[0] == pytest.approx(0.25)

    def test_reduced_variable(self, hypocycloid: PointConfiguration) -> None:
        """xi = prod f_k^b_k."""
        assert discriminant(hypocycloid).reduced_variable([1, 2, 3, -1]) == pytest.approx(-6)

    def test_pyramid(self) -> None:
        """Pyramids have no circuit discriminant."""
        with pytest.raises(DegenerateCircuit):
            discriminant(validate([[0, 0], [1, 0], [2, 0], [0, 1]]))

    def test_discriminant_in_one_coefficient(self, quadratic: PointConfiguration) -> None:
        """Varying the top coefficient, f is singular at xi = 1/4."""
        poly = discriminant_in(quadratic, exact_coeffs(1, 1, 1), 2)
        assert roots(poly)[0] == pytest.approx(0.25)

    def test_discriminant_in_bad_index(self, quadratic: PointConfiguration) -> None:
        """kappa must index a point."""
        with pytest.raises(DegenerateInput):
            discriminant_in(quadratic, exact_coeffs(1, 1, 1), 3)


class TestDiscriminantCoamoeba:
    """Tests for in_discriminant_coamoeba."""

    @pytest.mark.parametrize("argument,member", [(0, True), (1, False), ("1/2", False)])
    def test_quadratic_membership(self, quadratic: PointConfiguration, argument: int | str, member: bool) -> None:
        """Only positive real xi aligns the phases with the Gale signs."""
        coeffs = polar_coeffs([1.0, 1.0, 0.5], [0, 0, argument])
        result = in_discriminant_coamoeba(quadratic, coeffs)
        assert result.member is member
        assert result.scalar_agrees

    @pytest.mark.parametrize("argument", ["2/3", "4/3", 0])
    def test_witness_aligns_phases(self, vertex_family: PointConfiguration, argument: str | int) -> None:
        """At the witness, rotating by phi puts every phase on its Gale sign."""
        coeffs = polar_coeffs([1.0, 1.0, 1.0, 2.0], [0, 0, 0, argument])
        result = in_discriminant_coamoeba(vertex_family, coeffs)
        assert result.member
        assert result.witness is not None
        assert result.phase_over_pi is not None
        phases = phase_arguments(vertex_family, coeffs, result.witness)
        signs = (1, -1, -1, 1)
        for phase, sign in zip(phases, signs, strict=True):
            assert (Fraction(phase) + Fraction(result.phase_over_pi)) % 2 == (0 if sign > 0 else 1)

    def test_float_arguments(self, quadratic: PointConfiguration) -> None:
        """Inexact arguments go through the radian congruence."""
        coeffs = polar_coeffs([1.0, 1.0, 0.2], [0.0, 0.0, 0.3])
        assert not in_discriminant_coamoeba(quadratic, coeffs).member

    @settings(max_examples=80, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=2**16),
        shift=angles_over_pi(3),
        free=angles_over_pi(4),
        aligned=st.booleans(),
        inexact=st.booleans(),
    )
    def test_congruence_agrees_with_scalar_test(
        self, seed: int, shift: list[Fraction], free: list[Fraction], aligned: bool, inexact: bool
    ) -> None:
        """On random circuits the Smith-form solve and the Gale-sum congruence give the same answer."""
        config = random_planar_circuit(np.random.default_rng(seed))
        if aligned:
            theta, phi = shift[:2], shift[2]
            signs = profile(config).signs
            arguments = [
                (0 if s > 0 else 1) - (a[0] * theta[0] + a[1] * theta[1]) - phi
                for a, s in zip(config.points, signs, strict=True)
            ]
        else:
            arguments = free
        values: list[str | float] = [float(a) if inexact else str(a) for a in arguments]
        result = in_discriminant_coamoeba(config, polar_coeffs([1.0] * 4, values))
        assert result.scalar_agrees
        if aligned:
            assert result.member


class TestClassifySpace:
    """Tests for classify_space."""

    @pytest.mark.parametrize(
        "modulus,label",
        [(0.1, SpaceLabel.U1), (0.25, SpaceLabel.U1), (0.3, SpaceLabel.U0), (2.0, SpaceLabel.U0)],
    )
    def test_quadratic_real_positive(self, quadratic: PointConfiguration, modulus: float, label: SpaceLabel) -> None:
        """1 + z + xi z^2 with 0 < xi <= 1/4 is U1."""
        result = classify_space(quadratic, polar_coeffs([1.0, 1.0, modulus], [0, 0, 0]))
        assert result.label is label
        assert result.complement_components == (1 if label is SpaceLabel.U1 else 2)

    def test_off_discriminant_coamoeba(self, quadratic: PointConfiguration) -> None:
        """Negative xi is U0 by the membership certificate."""
        result = classify_space(quadratic, exact_coeffs(1, 1, -1))
        assert result.label is SpaceLabel.U0
        assert result.certificate is Certificate.OFF_DISCRIMINANT_COAMOEBA
        assert result.witness is None

    @pytest.mark.parametrize("argument,label", [(0, "U1"), ("2/3", "U1"), ("4/3", "U1"), ("1/3", "U0"), (1, "U0")])
    def test_vertex_family(self, vertex_family: PointConfiguration, argument: str | int, label: str) -> None:
        """Vertex circuits are U1 exactly on the discriminant coamoeba."""
        result = classify_space(vertex_family, polar_coeffs([1.0, 1.0, 1.0, 5.0], [0, 0, 0, argument]))
        assert result.label.value == label
        assert result.complement_components == (9 if label == "U1" else 10)

    @pytest.mark.parametrize("c,label", [(2.0, SpaceLabel.U0), (3.0, SpaceLabel.U1), (4.0, SpaceLabel.U1)])
    def test_hypocycloid_family(self, hypocycloid: PointConfiguration, c: float, label: SpaceLabel) -> None:
        """1 + z w^2 + z^2 w - c z w is U1 for c >= 3."""
        result = classify_space(hypocycloid, polar_coeffs([1.0, 1.0, 1.0, c], [0, 0, 0, 1]))
        assert result.label is label
        assert result.restriction_minimum == pytest.approx(3.0 - c, abs=1e-9)

    def test_indeterminate_band(self, hypocycloid: PointConfiguration) -> None:
        """A minimum inside the band with a nonzero closed form is reported."""
        with pytest.raises(NumericallyIndeterminate):
            classify_space(hypocycloid, polar_coeffs([1.0, 1.0, 1.0, 3.0 + 1e-12], [0, 0, 0, 1]))

    def test_json(self, quadratic: PointConfiguration) -> None:
        """JSON keys of a simplex classification."""
        data = classify_space(quadratic, polar_coeffs([1.0, 1.0, 0.1], [0, 0, 0])).to_json()
        assert data["class"] == "U1"
        assert data["certificate"] == "test_point_covered"
        assert data["witness_over_pi"] is not None


class TestClosedForm:
    """Tests for closed_form_value and space_inequality."""

    @pytest.mark.parametrize("c", [1.0, 2.5, 3.0, 3.5, 10.0])
    def test_calibrated_matches_classifier(self, hypocycloid: PointConfiguration, c: float) -> None:
        """The calibrated sign agrees with the test-point classification."""
        coeffs = polar_coeffs([1.0, 1.0, 1.0, c], [0, 0, 0, 1])
        u1 = classify_space(hypocycloid, coeffs).label is SpaceLabel.U1
        assert space_inequality(hypocycloid, coeffs) is u1

    def test_printed_convention_mirrors(self, hypocycloid: PointConfiguration) -> None:
        """The printed convention flips the strict cases."""
        coeffs = polar_coeffs([1.0, 1.0, 1.0, 2.0], [0, 0, 0, 1])
        assert space_inequality(hypocycloid, coeffs, convention=SignConvention.PRINTED)
        assert not space_inequality(hypocycloid, coeffs)

    def test_closed_form_exact(self, hypocycloid: PointConfiguration) -> None:
        """(-1)^3 (27 - c^3) at c = 2 is -19."""
        assert closed_form_value(hypocycloid, polar_coeffs([1.0, 1.0, 1.0, 2.0], [0, 0, 0, 1])) == -19

    def test_restriction_minimum_am_gm(self, quadratic: PointConfiguration) -> None:
        """For 1 + z + xi z^2 the minimum is 2 sqrt(xi) - 1."""
        assert restriction_minimum(quadratic, polar_coeffs([1.0, 1.0, 0.09], [0, 0, 0])) == pytest.approx(-0.4)

    def test_restriction_minimum_needs_simplex(self, unit_square: PointConfiguration) -> None:
        """Vertex circuits have no interior point."""
        with pytest.raises(DegenerateInput):
            restriction_minimum(unit_square, exact_coeffs(1, -1, -1, 1))


class TestSweep:
    """Tests for sweep and the univariate oracle."""

    def test_oracle_agrees_with_classifier(self, quadratic: PointConfiguration) -> None:
        """Component counts from the roots match the labels off the boundary."""
        rows = sweep(
            quadratic, exact_coeffs(1, 1, 1), 2, [0.1, 0.2, 0.5, 2.0], [0, Fraction(1, 2), 1, 0.3]
        )
        assert len(rows) == 16
        for row in rows:
            coeffs = polar_coeffs([1.0, 1.0, row.modulus], [0, 0, row.argument_over_pi])
            count = univariate_component_count(quadratic, coeffs)
            assert (count == 1) == (row.label == "U1"), row
        labels = {(row.modulus, float(row.argument_over_pi)): row.label for row in rows}
        assert labels[(0.1, 0.0)] == "U1"
        assert labels[(0.5, 0.0)] == "U0"

    def test_boundary_row(self, quadratic: PointConfiguration) -> None:
        """xi = 1/4 sits on the boundary and counts as U1."""
        rows = sweep(quadratic, exact_coeffs(1, 1, 1), 2, [0.25], [0])
        assert rows[0].label == "U1"
        assert rows[0].to_json()["argument_over_pi"] == "0"

    def test_oracle_needs_univariate(self, hypocycloid: PointConfiguration) -> None:
        """The root oracle is one-dimensional."""
        with pytest.raises(DegenerateInput):
            univariate_component_count(hypocycloid, exact_coeffs(1, 1, 1, -3))
