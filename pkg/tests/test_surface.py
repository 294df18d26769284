import numpy as np
import pytest
from src.core.errors import (
    DegenerateSingularity,
    HermitianViolation,
    ParabolicInput,
    ParameterOutOfRange,
    RemainderOrderError,
)
from src.core.surface import (
    HermitianHomPoly,
    PolyZZbar,
    SurfaceGerm,
    angular_derivative,
    angular_profile,
    example_4_1_epsilon_window,
    is_isolated_cr_singularity,
    make_bishop_quadric,
    make_example_4_1,
    make_power,
    subharmonicity_report,
    wirtinger_dz,
    wirtinger_dzbar,
)


class TestPolyZZbar:
    """Test suite for sparse polynomials in z and zbar."""

    def test_zero_coefficients_are_dropped(self):
        # Act
        p = PolyZZbar({(1, 0): 0.0, (0, 1): 2.0})

        # Assert
        assert p.terms == {(0, 1): 2.0}

    def test_rejects_negative_exponent(self):
        with pytest.raises(ParameterOutOfRange):
            PolyZZbar({(-1, 2): 1.0})

    def test_evaluate_modulus_squared(self):
        # Arrange
        p = PolyZZbar.monomial(1, 1)

        # Act & Assert
        assert p.evaluate(3.0 + 4.0j) == pytest.approx(25.0)

    def test_wirtinger_derivatives_of_mixed_monomial(self):
        """Test d/dz and d/dzbar of 2 z^3 zbar^2."""
        # Arrange
        p = PolyZZbar.monomial(3, 2, 2.0)

        # Act & Assert
        assert wirtinger_dz(p).terms == {(2, 2): 6.0}
        assert wirtinger_dzbar(p).terms == {(3, 1): 4.0}

    def test_holomorphic_polynomial_has_zero_dzbar(self):
        # Arrange
        p = PolyZZbar({(2, 0): 1.0, (5, 0): -3.0j})

        # Act & Assert
        assert p.d_zbar().is_zero

    def test_mixed_derivatives_commute(self):
        # Arrange
        p = PolyZZbar({(3, 1): 1.0 + 2.0j, (2, 2): 0.5, (0, 4): -1.0})

        # Act & Assert
        assert p.d_z().d_zbar().terms == pytest.approx(p.d_zbar().d_z().terms)

    def test_derivative_matches_finite_difference(self):
        """Test d/dzbar = (d/dx + i d/dy) / 2 at a sample point."""
        # Arrange
        p = PolyZZbar({(2, 1): 1.0 - 1.0j, (0, 3): 0.3, (1, 1): 2.0})
        z0, h = 0.3 - 0.2j, 1e-6
        dx = (p.evaluate(z0 + h) - p.evaluate(z0 - h)) / (2 * h)
        dy = (p.evaluate(z0 + 1j * h) - p.evaluate(z0 - 1j * h)) / (2 * h)

        # Act & Assert
        assert p.d_zbar().evaluate(z0) == pytest.approx(0.5 * (dx + 1j * dy), abs=1e-8)
        assert p.d_z().evaluate(z0) == pytest.approx(0.5 * (dx - 1j * dy), abs=1e-8)

    def test_real_and_imaginary_parts(self):
        # Arrange
        p = PolyZZbar({(3, 0): 1.0 + 1.0j, (1, 2): -2.0})
        z = np.array([0.2 + 0.1j, -0.4j, 0.7])

        # Act & Assert
        assert np.allclose(p.real_part().evaluate(z), p.evaluate(z).real, atol=1e-14)
        assert np.allclose(p.imag_part().evaluate(z), p.evaluate(z).imag, atol=1e-14)
        assert p.real_part().hermitian_defect() is None

    def test_product_and_order(self):
        # Act
        p = PolyZZbar.monomial(1, 0) * PolyZZbar({(1, 1): 1.0, (0, 3): 2.0})

        # Assert
        assert p.terms == {(2, 1): 1.0, (1, 3): 2.0}
        assert p.order == 3
        assert p.degree == 4


class TestHermitianHomPoly:
    """Test suite for real-valued homogeneous leading terms."""

    def test_violation_names_offending_monomial(self):
        with pytest.raises(HermitianViolation) as exc_info:
            HermitianHomPoly.from_terms(2, {(2, 0): 1.0})

        assert (exc_info.value.mu, exc_info.value.nu) == (2, 0)

    def test_rejects_inhomogeneous_terms(self):
        with pytest.raises(ParameterOutOfRange):
            HermitianHomPoly.from_terms(2, {(1, 1): 1.0, (2, 1): 1.0, (1, 2): 1.0})

    def test_rejects_degree_below_two(self):
        with pytest.raises(ParameterOutOfRange):
            HermitianHomPoly.from_terms(1, {(1, 0): 1.0, (0, 1): 1.0})

    def test_values_are_real(self):
        # Arrange
        F = HermitianHomPoly.from_terms(3, {(2, 1): 1.0 + 2.0j, (1, 2): 1.0 - 2.0j})

        # Act
        values = F.evaluate(np.array([0.5 + 0.5j, -1.0j]))

        # Assert
        assert values.dtype == np.float64

    @pytest.mark.parametrize("m", [2, 3, 4, 6])
    def test_homogeneous_of_degree_m(self, m):
        """Test F(t z) = t^m F(z) for real t > 0."""
        # Arrange
        rng = np.random.default_rng(m)
        terms = {}
        for mu in range(m + 1):
            c = complex(rng.normal(), rng.normal())
            terms[(mu, m - mu)] = terms.get((mu, m - mu), 0.0) + c
            terms[(m - mu, mu)] = terms.get((m - mu, mu), 0.0) + np.conj(c)
        F = HermitianHomPoly.from_terms(m, terms)
        z = rng.uniform(0.2, 1.0, 8) * np.exp(2j * np.pi * rng.uniform(size=8))
        t = np.array([0.01, 0.5, 3.0])[:, None]

        # Act
        scaled = F.evaluate(t * z)

        # Assert
        assert np.allclose(scaled / t**m, F.evaluate(z), atol=1e-12)


class TestSurfaceGerm:
    """Test suite for germ construction and validation."""

    def test_quadric_profile(self):
        """Test f(theta) = 1 + 2 gamma cos(2 theta)."""
        # Arrange
        germ = make_bishop_quadric(0.3)

        # Act
        profile = angular_profile(germ.leading, 256)

        # Assert
        assert np.allclose(profile.real_values, 1.0 + 0.6 * np.cos(2 * profile.theta), atol=1e-14)

    def test_profile_derivative_is_exact(self):
        # Arrange
        F = make_bishop_quadric(0.3).leading
        angles = np.array([0.1, 1.0, 2.5])

        # Act & Assert
        assert np.allclose(angular_derivative(F, angles), -1.2 * np.sin(2 * angles), atol=1e-14)

    def test_parabolic_quadric_is_refused(self):
        with pytest.raises(ParabolicInput):
            make_bishop_quadric(0.5)

    def test_negative_gamma_is_refused(self):
        with pytest.raises(ParameterOutOfRange):
            make_bishop_quadric(-0.1)

    def test_remainder_of_low_order_is_refused(self):
        with pytest.raises(RemainderOrderError):
            make_bishop_quadric(0.2, PolyZZbar.monomial(1, 1, 0.1))

    def test_graph_function_includes_remainder(self):
        # Arrange
        germ = make_bishop_quadric(0.0, PolyZZbar.monomial(3, 0, 0.5))

        # Act & Assert
        assert germ.evaluate(0.2) == pytest.approx(0.04 + 0.5 * 0.008)

    def test_nonpositive_radius_is_refused(self):
        with pytest.raises(ParameterOutOfRange):
            make_power(2, radius=0.0)

    def test_odd_power_is_refused(self):
        with pytest.raises(ParameterOutOfRange):
            make_power(3)

    def test_square_of_real_part_is_degenerate(self):
        """Test (z + zbar)^2, whose profile has a double zero."""
        F = HermitianHomPoly.from_terms(2, {(2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0})

        assert not is_isolated_cr_singularity(F).isolated
        with pytest.raises(DegenerateSingularity):
            SurfaceGerm(F)

    def test_example_parameter_outside_range(self):
        with pytest.raises(ParameterOutOfRange):
            make_example_4_1(0.7, 0.8)

    def test_reflected_germ_negates_graph(self):
        # Arrange
        germ = SurfaceGerm(
            HermitianHomPoly.from_terms(2, {(1, 1): -1.0, (2, 0): 0.1, (0, 2): 0.1}),
            PolyZZbar({(0, 3): 0.2j, (2, 1): 0.05}),
        )
        z = np.array([0.3, 0.1 - 0.2j, -0.4j])

        # Act
        reflected = germ.reflected()

        # Assert
        assert np.allclose(reflected.evaluate(z), -germ.evaluate(z), atol=1e-15)
        assert reflected.reflected().graph_function == germ.graph_function
        assert float(np.min(angular_profile(reflected.leading, 256).real_values)) > 0.0


class TestSubharmonicity:
    """Test suite for the Laplacian scan of the leading term."""

    def test_power_is_subharmonic(self):
        # Act
        report = subharmonicity_report(make_power(4).leading)

        # Assert
        assert report.everywhere_subharmonic
        assert report.min_value == pytest.approx(4.0)

    def test_quartic_fails_near_right_angles(self):
        """Test the Laplacian profile 4 + 6 eps cos(2 theta) at eps = 0.7."""
        # Act
        report = subharmonicity_report(make_example_4_1(0.7, 0.5).leading)

        # Assert
        assert not report.everywhere_subharmonic
        assert report.min_value == pytest.approx(-0.2, abs=1e-12)
        assert sorted(report.fails_at) == pytest.approx([np.pi / 2, 3 * np.pi / 2], abs=1e-3)

    def test_quartic_profile_stays_positive_in_window(self):
        # Arrange
        F = make_example_4_1(0.7, 0.5).leading

        # Act & Assert
        assert float(np.min(angular_profile(F, 4096).real_values)) == pytest.approx(0.01, abs=1e-5)

    def test_epsilon_window(self):
        """Test the window (2/3, sqrt(1/2)) for C = 1/2."""
        # Act
        lower, upper = example_4_1_epsilon_window(0.5)

        # Assert
        assert lower == pytest.approx(2.0 / 3.0, abs=1e-9)
        assert upper == pytest.approx(np.sqrt(0.5), abs=1e-4)
