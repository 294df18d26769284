import numpy as np
import pytest
from src.core import bishop
from src.core.bishop import (
    CONVERGED,
    FAILED,
    HoloPerturbation,
    SolveConfig,
    apply_A_inv,
    apply_Lambda,
    assemble_disc,
    disc_family,
    find_convergence_radius,
    fixed_point_defect,
    iterate_H,
    nonexistence_probe,
    prepare_problem,
    solve_disc,
    taylor_tail_Q,
    verify_attachment,
)
from src.core.circle import CircleFunction
from src.core.errors import (
    IndexPositive,
    InvalidGrid,
    NoConvergence,
    NotAnalytic,
    ParameterOutOfRange,
    RadiusOutOfRange,
)
from src.core.surface import (
    HermitianHomPoly,
    PolyZZbar,
    SurfaceGerm,
    make_bishop_quadric,
    make_example_4_1,
    make_power,
)
from tests.test_mocks import MockSolverObserver

# 0.05 * 2 |z|^2 Re z: real valued, so F2 stays constant
REAL_REMAINDER = PolyZZbar({(2, 1): 0.05, (1, 2): 0.05})


def trig(coefficients, n=1024, is_real=False):
    return CircleFunction.from_coefficients(coefficients, n, is_real=is_real)


@pytest.fixture(scope="module")
def perturbed_problem():
    return prepare_problem(make_power(2, REAL_REMAINDER), 1024)


@pytest.fixture(scope="module")
def ellipse_problem():
    return prepare_problem(make_bishop_quadric(0.25), 1024)


@pytest.fixture(scope="module")
def round_trip_problems(ellipse_problem):
    return {
        "modulus_squared": prepare_problem(make_power(2), 1024),
        "modulus_fourth": prepare_problem(make_power(4), 1024),
        "ellipse": ellipse_problem,
    }


class TestConfigAndTypes:
    """Test suite for solver configuration and perturbation types."""

    @pytest.mark.parametrize("delta", [0.5, 1.0, 0.2])
    def test_delta_outside_open_interval(self, delta):
        with pytest.raises(ParameterOutOfRange):
            SolveConfig(delta=delta)

    def test_grid_must_be_power_of_two(self):
        with pytest.raises(InvalidGrid):
            SolveConfig(n_samples=1000)

    def test_nonpositive_tolerance(self):
        with pytest.raises(ParameterOutOfRange):
            SolveConfig(tol=0.0)

    def test_perturbation_rejects_negative_modes(self):
        with pytest.raises(NotAnalytic):
            HoloPerturbation(trig({-1: 1.0}, 64))

    def test_perturbation_rejects_imaginary_mean(self):
        with pytest.raises(NotAnalytic):
            HoloPerturbation(trig({0: 0.5j, 1: 1.0}, 64))

    def test_projection_keeps_holomorphic_part(self):
        projected = HoloPerturbation.project(trig({-2: 3.0, 0: 1.0 + 2.0j, 3: 0.5}, 64))

        expected = trig({0: 1.0, 3: 0.5}, 64)
        assert np.allclose(projected.values, expected.values, atol=1e-14)


class TestOperators:
    """Test suite for the Taylor tail, Lambda and its inverse."""

    def test_tail_of_modulus_squared(self):
        # Arrange
        F = make_power(2).leading
        X = trig({1: 0.3, 2: 0.1})
        Y = trig({0: 0.02, 1: -0.01j})

        # Act
        tail = taylor_tail_Q(F, X, Y)

        # Assert
        assert np.allclose(tail.real_values, np.abs(Y.values) ** 2, atol=1e-15)

    def test_tail_is_exact_remainder_of_linearization(self):
        """Test Q(X, Y) = F(X + Y) - F(X) - 2 Re(dF/dz(X) Y) for the quartic."""
        # Arrange
        F = make_example_4_1(0.7, 0.5).leading
        X = trig({1: 0.4, 3: 0.05j})
        Y = trig({0: 0.03, 2: 0.02 - 0.01j})

        # Act
        tail = taylor_tail_Q(F, X, Y)

        # Assert
        x, y = X.values, Y.values
        expected = (
            F.evaluate(x + y) - F.evaluate(x) - 2.0 * np.real(F.poly.d_z().evaluate(x) * y)
        )
        assert np.allclose(tail.real_values, expected, atol=1e-14)

    def test_lambda_on_disc(self):
        """Test Lambda(zeta) = 2 kappa r for w = |z|^2, where g_r = r zeta / 2."""
        # Arrange
        problem = prepare_problem(make_power(2), 256)
        zeta = trig({1: 1.0}, 256)

        # Act
        image = apply_Lambda(problem.germ.leading, problem.cmap, 0.2, zeta)

        # Assert
        assert np.allclose(image.real_values, 0.2, atol=1e-14)

    @pytest.mark.parametrize("r", [0.01, 0.05, 0.2])
    @pytest.mark.parametrize("name", ["modulus_squared", "modulus_fourth", "ellipse"])
    def test_round_trip(self, round_trip_problems, name, r):
        """Test Lambda(A_inv f) = f for 50 random real trigonometric polynomials."""
        problem = round_trip_problems[name]
        F, cmap, R = problem.germ.leading, problem.cmap, problem.R
        rng = np.random.default_rng(7)
        for _ in range(50):
            # Arrange
            coefficients = {0: rng.normal()}
            for mode in range(1, 9):
                c = complex(rng.normal(), rng.normal())
                coefficients[mode] = c
                coefficients[-mode] = np.conj(c)
            f = trig(coefficients, is_real=True)

            # Act
            a = apply_A_inv(cmap, R, r, F.m, f)

            # Assert
            assert a.a.negative_mode_energy() < 1e-20
            image = apply_Lambda(F, cmap, r, a)
            assert np.allclose(image.real_values, f.real_values, atol=1e-9 * f.sup_norm())


class TestSolveDisc:
    """Test suite for single-radius solves."""

    @pytest.mark.parametrize("m, height", [(2, 0.05**2), (4, 0.05**4)])
    def test_power_without_remainder_is_exact(self, m, height):
        """Test that a = 0 is the fixed point when the remainder vanishes."""
        # Arrange
        problem = prepare_problem(make_power(m), 256)

        # Act
        disc = solve_disc(problem, 0.1, SolveConfig(n_samples=256), MockSolverObserver())

        # Assert
        assert disc.diagnostics.iterations == 1
        assert disc.perturbation.sup_norm() == 0.0
        assert disc.residual < 1e-15
        assert disc.certified
        assert np.allclose(disc.f2_boundary.values, height)

    def test_ellipse_without_remainder(self, ellipse_problem):
        # Act
        disc = solve_disc(ellipse_problem, 0.3, observer=MockSolverObserver())

        # Assert
        assert disc.certified
        assert disc.residual < 1e-12
        assert verify_attachment(disc, ellipse_problem.germ).f1_negative_energy < 1e-18

    def test_perturbed_germ_converges(self, perturbed_problem):
        # Arrange
        observer = MockSolverObserver()

        # Act
        disc = solve_disc(perturbed_problem, 0.1, observer=observer)

        # Assert
        diagnostics = disc.diagnostics
        assert disc.certified
        assert disc.residual < 1e-9
        assert not diagnostics.ball_escape
        assert 0.0 < diagnostics.contraction_ratio < 0.1
        assert len(observer.get_iteration_logs()) == diagnostics.iterations
        assert observer.get_converged_logs() == [(0.1, diagnostics.iterations, disc.residual)]
        assert observer.get_failure_logs() == []

    def test_fixed_point_certificate(self, perturbed_problem):
        # Arrange
        config = SolveConfig()
        disc = solve_disc(perturbed_problem, 0.1, config, MockSolverObserver())

        # Act
        defect = fixed_point_defect(perturbed_problem, 0.1, disc.perturbation)

        # Assert
        assert defect < 2.0 * config.tol

    def test_perturbation_decays_quadratically(self, perturbed_problem):
        """Test that sup |a_r| behaves like r^2 as r shrinks."""
        # Arrange
        radii = np.array([0.1, 0.05, 0.025])
        sizes = [
            solve_disc(perturbed_problem, r, observer=MockSolverObserver()).perturbation.sup_norm()
            for r in radii
        ]

        # Act
        exponent = np.polyfit(np.log(radii), np.log(sizes), 1)[0]

        # Assert
        assert exponent >= 1.8

    def test_holomorphic_remainder_needs_no_correction(self):
        """Test w = |z|^2 + 0.05 z^3: F1 = g_r and F2 picks up the remainder."""
        # Arrange
        problem = prepare_problem(make_power(2, PolyZZbar.monomial(3, 0, 0.05)), 1024)

        # Act
        disc = solve_disc(problem, 0.05, observer=MockSolverObserver())

        # Assert
        assert disc.diagnostics.iterations == 1
        assert disc.perturbation.sup_norm() < 1e-16
        assert disc.residual < 1e-12
        assert float(np.ptp(disc.f2_boundary.values.imag)) > 1e-7

    def test_complex_remainder_lifts_second_component(self):
        # Arrange
        germ = make_power(2, PolyZZbar({(0, 3): 0.05, (2, 1): 0.02j, (1, 2): -0.02j}))
        problem = prepare_problem(germ, 1024)

        # Act
        disc = solve_disc(problem, 0.2, observer=MockSolverObserver())
        certificate = verify_attachment(disc, germ)

        # Assert
        assert disc.certified
        assert float(np.ptp(disc.f2_boundary.values.imag)) > 1e-6
        assert certificate.f2_negative_energy < 1e-20

    def test_ball_escape_is_flagged_once(self):
        """Test a remainder large enough to leave the ball of radius r^(1 + delta)."""
        # Arrange
        germ = make_power(2, PolyZZbar({(2, 1): 2.5, (1, 2): 2.5}))
        problem = prepare_problem(germ, 1024)
        observer = MockSolverObserver()

        # Act
        disc = solve_disc(problem, 0.04, SolveConfig(delta=0.99), observer)

        # Assert
        assert disc.diagnostics.ball_escape
        assert len(observer.get_escape_logs()) == 1

    def test_iteration_budget_exhausted(self, perturbed_problem):
        # Arrange
        observer = MockSolverObserver()

        # Act & Assert
        with pytest.raises(NoConvergence) as exc_info:
            iterate_H(perturbed_problem, 0.1, SolveConfig(max_iter=1), observer)

        assert exc_info.value.last_ratio is None
        assert len(observer.get_failure_logs()) == 1

    def test_divergence_is_reported(self):
        # Arrange
        germ = make_power(2, PolyZZbar({(2, 1): 50.0, (1, 2): 50.0}))
        problem = prepare_problem(germ, 256)

        # Act & Assert
        with pytest.raises(NoConvergence):
            iterate_H(problem, 0.7, SolveConfig(n_samples=256), MockSolverObserver())

    def test_radius_beyond_three_quarters(self, perturbed_problem):
        with pytest.raises(RadiusOutOfRange):
            iterate_H(perturbed_problem, 0.8, observer=MockSolverObserver())

    def test_perturbed_attachment_is_detected(self):
        """Test that a boundary pushed off the surface is not certified."""
        # Arrange
        problem = prepare_problem(make_power(2), 1024)
        off_surface = trig({-1: 1e-3})

        # Act
        disc = assemble_disc(problem, 0.15, off_surface)
        certificate = verify_attachment(disc, problem.germ)

        # Assert
        assert not disc.certified
        assert certificate.residual == pytest.approx(1.51e-4, rel=1e-2)
        assert certificate.f1_negative_energy == pytest.approx(1e-6 / (0.075**2 + 1e-6), rel=1e-6)


class TestQuarticNotSubharmonic:
    """Test suite for discs on a quartic of positive index that is not subharmonic."""

    def test_disc_on_quartic(self):
        # Arrange
        germ = make_example_4_1(0.67, 0.5, PolyZZbar({(3, 2): 0.01, (2, 3): 0.01}))
        problem = prepare_problem(germ, 4096)

        # Act
        disc = solve_disc(problem, 0.05, SolveConfig(n_samples=4096), MockSolverObserver())

        # Assert
        assert float(np.min(problem.R.real_values)) > 0.0
        assert disc.certified


class TestFamily:
    """Test suite for radius families, probes and the convergence radius."""

    def test_family_records_and_smoothness(self):
        """Test that refining the radius grid reproduces the difference quotients."""
        # Arrange
        germ = make_power(2, REAL_REMAINDER)
        observer = MockSolverObserver()

        # Act
        coarse = disc_family(germ, 0.01, 0.05, 5, observer=observer)
        fine = disc_family(germ, 0.01, 0.05, 9, observer=observer)

        # Assert
        assert all(record.status == CONVERGED for record in coarse.records)
        assert coarse.empirical_R0 == pytest.approx(0.05)
        assert len(coarse.discs) == 5
        assert list(coarse.sup_norms) == sorted(coarse.sup_norms)
        assert coarse.sup_norms[0] < 0.06
        assert all(record.iterations <= 50 for record in coarse.records + fine.records)
        assert len(observer.get_converged_logs()) == 14

        fine_mid = np.array([pair[0] for pair in fine.smoothness_diag])
        fine_quotient = np.array([pair[1] for pair in fine.smoothness_diag])
        for r_mid, quotient in coarse.smoothness_diag:
            interpolated = np.interp(r_mid, fine_mid, fine_quotient)
            assert quotient == pytest.approx(interpolated, rel=0.1)

    @pytest.mark.parametrize("m", [2, 4])
    def test_exact_discs_across_radii(self, m):
        """Test the discs zeta -> (r zeta / 2, (r / 2)^m) of w = |z|^m on r in [0.01, 0.1]."""
        # Act
        family = disc_family(
            make_power(m), 0.01, 0.1, 10, SolveConfig(n_samples=256), observer=MockSolverObserver()
        )

        # Assert
        assert len(family.discs) == 10
        assert max(family.residuals) < 1e-12
        for disc in family.discs:
            zeta = np.exp(1j * disc.f1_boundary.theta)
            assert np.allclose(disc.f1_boundary.values, disc.r * zeta / 2.0, atol=1e-14)
            assert np.allclose(disc.f2_boundary.values, (disc.r / 2.0) ** m, atol=1e-16)
            assert disc.sup_norm == pytest.approx(np.hypot(disc.r / 2.0, (disc.r / 2.0) ** m))

    def test_negative_definite_germ_is_solved_for_minus_w(self):
        """Test that w = -|z|^2 - R carries the discs of |z|^2 + R with F2 negated."""
        # Arrange
        negative = SurfaceGerm(HermitianHomPoly.from_terms(2, {(1, 1): -1.0}), -REAL_REMAINDER)
        positive = make_power(2, REAL_REMAINDER)

        # Act
        family = disc_family(negative, 0.01, 0.05, 3, observer=MockSolverObserver())
        reference = disc_family(positive, 0.01, 0.05, 3, observer=MockSolverObserver())

        # Assert
        assert [record.status for record in family.records] == [CONVERGED] * 3
        for disc, twin in zip(family.discs, reference.discs):
            assert disc.certified
            assert verify_attachment(disc, negative).residual < 1e-9
            assert np.allclose(disc.f1_boundary.values, twin.f1_boundary.values, atol=1e-15)
            assert np.allclose(disc.f2_boundary.values, -twin.f2_boundary.values, atol=1e-15)
            assert float(np.max(disc.f2_boundary.values.real)) < 0.0

    def test_negative_definite_problem_keeps_orientation(self):
        # Arrange
        germ = SurfaceGerm(HermitianHomPoly.from_terms(2, {(1, 1): -1.0}))

        # Act
        problem = prepare_problem(germ, 256)

        # Assert
        assert problem.orientation == -1
        assert problem.source_germ.graph_function == germ.graph_function
        assert problem.cmap.kappa == pytest.approx(0.5)

    def test_probe_refuses_negative_definite_germ(self):
        with pytest.raises(IndexPositive):
            nonexistence_probe(SurfaceGerm(HermitianHomPoly.from_terms(2, {(1, 1): -1.0})))

    def test_family_summary(self, perturbed_problem):
        # Arrange
        family = disc_family(
            perturbed_problem.germ,
            0.02,
            0.06,
            3,
            observer=MockSolverObserver(),
            problem=perturbed_problem,
        )

        # Act
        summary = family.summary()

        # Assert
        assert summary["radii"] == 3
        assert summary["converged"] == 3
        assert summary["all_certified"]
        assert len(family.sup_norms) == 3

    def test_hyperbolic_family_is_empty(self):
        # Act
        family = disc_family(make_bishop_quadric(1.0), 0.1, 0.2, 3, observer=MockSolverObserver())

        # Assert
        assert family.discs == ()
        assert family.empirical_R0 is None
        assert all(record.status == FAILED for record in family.records)
        assert "ProfileNotPositive" in family.records[0].message

    def test_family_radius_order(self):
        with pytest.raises(ParameterOutOfRange):
            disc_family(make_power(2), 0.2, 0.1, 3, observer=MockSolverObserver())

    def test_probe_on_hyperbolic_quadric(self):
        # Act
        report = nonexistence_probe(make_bishop_quadric(1.0))

        # Assert
        assert report.index == -1
        assert report.zero_count == 4
        assert report.construction_inapplicable
        assert report.real_remainder
        assert report.sign_change_angles == pytest.approx(np.pi / 3 * np.array([1, 2, 4, 5]))

    def test_probe_flags_complex_remainder(self):
        # Act
        report = nonexistence_probe(make_bishop_quadric(1.0, PolyZZbar.monomial(3, 0, 0.1)))

        # Assert
        assert not report.real_remainder

    def test_probe_refuses_positive_index(self):
        with pytest.raises(IndexPositive):
            nonexistence_probe(make_power(2))

    def test_convergence_radius_when_every_radius_converges(self):
        # Arrange
        problem = prepare_problem(make_power(2), 256)

        # Act
        radius = find_convergence_radius(problem, 0.1, config=SolveConfig(n_samples=256))

        # Assert
        assert radius == pytest.approx(problem.max_radius)

    def test_convergence_radius_bisection(self, monkeypatch):
        # Arrange
        problem = prepare_problem(make_power(2), 256)
        monkeypatch.setattr(bishop, "_converges", lambda problem, r, config: r < 0.3)

        # Act
        radius = find_convergence_radius(problem, 0.1, 0.7, r_tol=1e-4)

        # Assert
        assert 0.3 - 1e-4 <= radius < 0.3
