"""Normalized Riemann map of the unit disc onto the region {F_m < 1}.

The region is star-shaped with polar radius rho(theta) = f(theta)^(-1/m), so
the boundary correspondence is found with Theodorsen's equation

    phi(theta) = theta + H[log rho(phi)](theta),

solved by damped fixed-point iteration. If the damped iteration stalls, the
same equation is finished with Jacobian-free Newton-Krylov steps.
"""

from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.optimize import NoConvergence as KrylovNoConvergence
from scipy.optimize import newton_krylov

from ..infrastructure.logger import logger
from ..ports import MapSample
from .circle import (
    DEFAULT_GRID,
    CircleFunction,
    hilbert,
    power_series,
)
from .errors import (
    NoConvergence,
    NonUnivalent,
    ParameterOutOfRange,
    ProfileNotPositive,
    RNotPositiveReal,
)
from .surface import CHECK_TOL, HermitianHomPoly, angular_profile

THEODORSEN_DAMPING = 0.5
THEODORSEN_TOL = 1e-11
THEODORSEN_BUDGET = 10000
STALL_WINDOW = 50
NEWTON_STEPS = 40
CONTINUATION_STAGES = 8
# G extends holomorphically a little past the circle; evaluation is allowed
# up to this radius.
REFLECTION_RADIUS = 1.05


class PolarRadiusSampler:
    """Exact evaluator theta -> F(e^{i theta})^(-1/m) of the level curve."""

    def __init__(self, leading: HermitianHomPoly):
        self.leading = leading

    def __call__(self, angles: np.ndarray) -> np.ndarray:
        profile = self.leading.evaluate(np.exp(1j * np.asarray(angles, dtype=float)))
        return profile ** (-1.0 / self.leading.m)


@dataclass(frozen=True, eq=False)
class ConformalMap:
    """Boundary data of G: D -> {F_m < 1}, G(0) = 0, G'(0) > 0."""

    rho: CircleFunction
    phi: CircleFunction
    g_boundary: CircleFunction
    g_deriv: CircleFunction
    kappa: float
    g_prime_at_0: float
    iterations: int = 0
    method: str = "damped"

    @property
    def n_samples(self) -> int:
        return self.g_boundary.n_samples

    @property
    def correspondence(self) -> np.ndarray:
        """Boundary correspondence theta -> phi(theta) (not reduced mod 2*pi)."""
        return self.g_boundary.theta + self.phi.real_values

    def scaled_boundary(self, r: float) -> CircleFunction:
        """g_r = kappa * r * g."""
        return self.g_boundary * (self.kappa * r)

    def evaluate(self, zeta):
        """G (or its reflection extension) at |zeta| <= REFLECTION_RADIUS."""
        zeta = np.asarray(zeta, dtype=complex)
        if np.any(np.abs(zeta) > REFLECTION_RADIUS):
            raise ParameterOutOfRange(f"|zeta| must not exceed {REFLECTION_RADIUS}")
        return power_series(self.g_boundary.coefficients.nonnegative(), zeta)

    def invariant_residuals(self) -> dict:
        leading = self.g_boundary.coefficients[1]
        on_curve = np.abs(self.g_boundary.values) - self.rho.evaluate_at(self.correspondence)
        return {
            "negative_mode_energy": self.g_boundary.negative_mode_energy(),
            "mode_zero": abs(self.g_boundary.coefficients[0]),
            "leading_phase": abs(leading.imag) / abs(leading),
            "min_derivative": float(np.min(np.abs(self.g_deriv.values))),
            "on_curve": float(np.max(np.abs(on_curve))),
        }


def level_curve(F: HermitianHomPoly, n_samples: int = DEFAULT_GRID) -> CircleFunction:
    """Polar radius of F^{-1}{1}; needs a strictly positive angular profile."""
    profile = angular_profile(F, n_samples)
    values = profile.real_values
    index = int(np.argmin(values))
    if values[index] <= CHECK_TOL * F.scale:
        witness = float(profile.theta[index])
        raise ProfileNotPositive(
            f"angular profile is not positive (min {values[index]:.3e} at theta = "
            f"{witness:.6f}); F = 1 is not a closed curve around the origin",
            witnesses=(witness,),
        )
    rho = values ** (-1.0 / F.m)
    residual = float(np.max(np.abs(F.evaluate(rho * np.exp(1j * profile.theta)) - 1.0)))
    logger.debug(f"Level curve on {n_samples} points, on-curve residual {residual:.2e}")
    return CircleFunction(rho, is_real=True, sampler=PolarRadiusSampler(F))


def _theodorsen_image(rho: CircleFunction, shift: np.ndarray) -> np.ndarray:
    log_radius = np.log(rho.evaluate_at(rho.theta + shift))
    return hilbert(CircleFunction(log_radius, is_real=True)).real_values


def _krylov_theodorsen(
    rho: CircleFunction, shift: np.ndarray, tol: float, max_steps: int = NEWTON_STEPS
) -> tuple:
    """Newton-Krylov solve of shift = H[log rho(theta + shift)].

    Starts from the given shift; if that fails, the equation with log rho
    scaled by t is followed from t = 0 to t = 1.
    """
    steps = [0]

    def count(*_):
        steps[0] += 1

    def solve(start: np.ndarray, weight: float, f_tol: float) -> np.ndarray:
        def residual(candidate: np.ndarray) -> np.ndarray:
            return candidate - weight * _theodorsen_image(rho, candidate)

        solution = newton_krylov(
            residual, start, f_tol=f_tol, maxiter=max_steps, method="lgmres", callback=count
        )
        if not np.all(np.isfinite(solution)):
            raise KrylovNoConvergence("non-finite iterate")
        return solution

    try:
        return solve(shift, 1.0, tol), steps[0]
    except (KrylovNoConvergence, ValueError):
        logger.warning("Newton-Krylov from the stalled iterate failed; using continuation in log rho")
    current = np.zeros_like(shift)
    for stage in range(1, CONTINUATION_STAGES + 1):
        weight = stage / CONTINUATION_STAGES
        try:
            current = solve(current, weight, tol if stage == CONTINUATION_STAGES else 1e-8)
        except (KrylovNoConvergence, ValueError) as exc:
            raise NoConvergence(
                f"Theodorsen equation not solved at continuation weight {weight:.3f}"
            ) from exc
    return current, steps[0]


def riemann_map(
    rho: CircleFunction,
    damping: float = THEODORSEN_DAMPING,
    tol: float = THEODORSEN_TOL,
    max_iter: int = THEODORSEN_BUDGET,
) -> ConformalMap:
    """Riemann map onto the star-shaped region bounded by r = rho(theta)."""
    if float(np.min(rho.real_values)) <= 0.0:
        raise ParameterOutOfRange("polar radius must be strictly positive")
    theta = rho.theta
    shift = np.zeros(rho.n_samples)
    best_step, best_shift, since_best = np.inf, shift, 0
    method = "damped"
    iterations = 0
    converged = False
    while iterations < max_iter:
        iterations += 1
        updated = (1.0 - damping) * shift + damping * _theodorsen_image(rho, shift)
        step = float(np.max(np.abs(updated - shift)))
        if not np.isfinite(step):
            since_best = STALL_WINDOW
        else:
            shift = updated
            if step < tol:
                converged = True
                break
            if step < best_step:
                best_step, best_shift, since_best = step, shift, 0
            else:
                since_best += 1
        if since_best >= STALL_WINDOW:
            logger.warning(
                f"Damped Theodorsen iteration stalled at step {best_step:.2e} after "
                f"{iterations} iterations; continuing with Newton-Krylov steps"
            )
            shift, newton_steps = _krylov_theodorsen(rho, best_shift, tol)
            iterations += newton_steps
            method = "newton-krylov"
            converged = True
            break
    if not converged:
        raise NoConvergence(
            f"Theodorsen iteration budget {max_iter} exhausted (last step {step:.2e})"
        )

    correspondence = theta + shift
    gaps = np.diff(np.append(correspondence, correspondence[0] + 2.0 * np.pi))
    if np.any(gaps <= 0.0):
        raise NonUnivalent("boundary correspondence is not strictly increasing")

    radius = rho.evaluate_at(correspondence)
    g_boundary = CircleFunction(radius * np.exp(1j * correspondence))
    g_deriv = CircleFunction(g_boundary.derivative().values / (1j * np.exp(1j * theta)))
    g_prime_at_0 = float(np.exp(np.mean(np.log(radius))))
    cmap = ConformalMap(
        rho=rho,
        phi=CircleFunction(shift, is_real=True),
        g_boundary=g_boundary,
        g_deriv=g_deriv,
        kappa=kappa_of_boundary(g_boundary),
        g_prime_at_0=g_prime_at_0,
        iterations=iterations,
        method=method,
    )
    logger.info(
        f"Riemann map built on {rho.n_samples} points in {iterations} {method} "
        f"iterations: G'(0) = {g_prime_at_0:.12g}, kappa = {cmap.kappa:.12g}"
    )
    return cmap


def kappa_of_boundary(g_boundary: CircleFunction) -> float:
    return 0.5 / g_boundary.sup_norm()


def kappa_of(cmap: ConformalMap) -> float:
    """kappa = (1/2) / sup|g|, so that sup|kappa g| = 1/2."""
    return kappa_of_boundary(cmap.g_boundary)


def aux_R(F: HermitianHomPoly, cmap: ConformalMap) -> CircleFunction:
    """R(zeta) = kappa * zeta * G'(zeta) * (dF/dz)(kappa g(zeta)); real and positive."""
    zeta = np.exp(1j * cmap.g_boundary.theta)
    values = (
        cmap.kappa
        * zeta
        * cmap.g_deriv.values
        * F.poly.d_z().evaluate(cmap.kappa * cmap.g_boundary.values)
    )
    scale = float(np.max(np.abs(values)))
    imag = float(np.max(np.abs(values.imag)))
    if imag >= 1e-8 * scale:
        raise RNotPositiveReal(f"R has imaginary part {imag:.3e} (scale {scale:.3e})")
    if float(np.min(values.real)) <= 0.0:
        raise RNotPositiveReal(f"R has minimum {float(np.min(values.real)):.3e} <= 0")
    return CircleFunction(values.real, is_real=True)


def annulus_quotient(
    F: HermitianHomPoly, cmap: ConformalMap, r: float, s: float
) -> np.ndarray:
    """(F(kappa r G(s zeta)) - (kappa r)^m) / (r^m (s^2 - 1)) on the grid."""
    zeta = np.exp(1j * cmap.g_boundary.theta)
    scaled = cmap.kappa * r * cmap.evaluate(s * zeta)
    return (F.evaluate(scaled) - (cmap.kappa * r) ** F.m) / (r**F.m * (s**2 - 1.0))


def map_table(cmap: ConformalMap, R: CircleFunction) -> List[MapSample]:
    """Rows (theta, Re g, Im g, rho, phi, R) for export."""
    theta = cmap.g_boundary.theta
    correspondence = cmap.correspondence
    rho = cmap.rho.evaluate_at(correspondence)
    return [
        MapSample(
            theta=float(theta[k]),
            re_g=float(cmap.g_boundary.values[k].real),
            im_g=float(cmap.g_boundary.values[k].imag),
            rho=float(rho[k]),
            phi=float(correspondence[k]),
            R=float(R.real_values[k]),
        )
        for k in range(cmap.n_samples)
    ]
