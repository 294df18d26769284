"""Bishop discs attached to a surface germ w = F_m(z) + R(z) of positive index.

For 0 < r < 3*rho/4 the disc boundary is sought as

    F1 = g_r + a,    F2 = (kappa r)^m + i A[Im R(F1)],

with g_r = kappa * r * g the scaled Riemann map boundary and a a holomorphic
perturbation with real mean. Attachment F2 = (F_m + R)(F1) on the circle is
the fixed-point equation a = H(a; r), solved by Picard iteration.
"""

from dataclasses import dataclass, field
from math import factorial
from typing import List, Optional, Tuple, Union

import numpy as np

from ..infrastructure.logger import logger
from ..ports import IterationInfo, SolverObserverPort
from .circle import (
    ANALYTIC_TOL,
    DEFAULT_ALPHA,
    DEFAULT_GRID,
    CircleFunction,
    analytic_completion,
    grid_angles,
    hilbert,
    holder_norm,
)
from .conformal import ConformalMap, aux_R, level_curve, riemann_map
from .errors import (
    BishopDiscsError,
    DegenerateDisc,
    IndexPositive,
    InvalidGrid,
    NoConvergence,
    NotAnalytic,
    ParameterOutOfRange,
    ProfileNotPositive,
    RadiusOutOfRange,
    RoundTripFailure,
)
from .maslov import index_via_zero_count, profile_zeros
from .surface import CHECK_TOL, HermitianHomPoly, SurfaceGerm, angular_profile

ROUNDTRIP_TOL = 1e-8
RESIDUAL_CERTIFICATE = 1e-7
CONVERGED = "converged"
FAILED = "failed"


@dataclass(frozen=True)
class SolveConfig:
    delta: float = 0.75
    tol: float = 1e-10
    max_iter: int = 200
    alpha: float = DEFAULT_ALPHA
    n_samples: int = DEFAULT_GRID

    def __post_init__(self):
        if not 0.5 < self.delta < 1.0:
            raise ParameterOutOfRange(f"delta must lie in (1/2, 1), got {self.delta}")
        if not self.tol > 0.0:
            raise ParameterOutOfRange(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ParameterOutOfRange(f"max_iter must be >= 1, got {self.max_iter}")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterOutOfRange(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n_samples < 64 or self.n_samples & (self.n_samples - 1):
            raise InvalidGrid(f"grid size must be a power of two >= 64, got {self.n_samples}")


@dataclass(frozen=True, eq=False)
class HoloPerturbation:
    """Boundary values of a holomorphic function with real value at 0."""

    a: CircleFunction

    def __post_init__(self):
        energy = self.a.negative_mode_energy()
        if energy >= ANALYTIC_TOL:
            raise NotAnalytic(f"perturbation has negative-mode energy {energy:.3e}")
        scale = max(self.a.sup_norm(), 1.0)
        if abs(self.a.coefficients.spectrum[0].imag) >= ANALYTIC_TOL * scale:
            raise NotAnalytic("perturbation has a non-real mean")

    @classmethod
    def zero(cls, n_samples: int = DEFAULT_GRID) -> "HoloPerturbation":
        return cls(CircleFunction(np.zeros(n_samples, dtype=complex)))

    @classmethod
    def project(cls, f: CircleFunction) -> "HoloPerturbation":
        """Drop the negative modes and the imaginary part of the mean."""
        n = f.n_samples
        spectrum = np.fft.fft(f.values)
        spectrum[n // 2 :] = 0.0
        spectrum[0] = spectrum[0].real
        return cls(CircleFunction(np.fft.ifft(spectrum)))

    @property
    def values(self) -> np.ndarray:
        return self.a.values

    def sup_norm(self) -> float:
        return self.a.sup_norm()


@dataclass(frozen=True, eq=False)
class BishopProblem:
    """Everything a single-radius solve needs; shared read-only by workers.

    germ always has a positive leading term. With orientation -1 it is the
    reflection of the input germ, and assembled discs are reflected back.
    """

    germ: SurfaceGerm
    cmap: ConformalMap
    R: CircleFunction
    orientation: int = 1

    @property
    def max_radius(self) -> float:
        return 0.75 * self.germ.radius

    @property
    def source_germ(self) -> SurfaceGerm:
        return self.germ.reflected() if self.orientation < 0 else self.germ


@dataclass(frozen=True)
class IterationDiagnostics:
    iterations: int
    steps: Tuple[float, ...]
    ratios: Tuple[float, ...]
    holder_norms: Tuple[float, ...]
    ball_radius: float
    ball_escape: bool

    @property
    def contraction_ratio(self) -> float:
        """Geometric mean of the step ratios; 0 when the first step already vanished."""
        positive = [step for step in self.steps if step > 0.0]
        if len(positive) < 2:
            return 0.0
        return float((positive[-1] / positive[0]) ** (1.0 / (len(positive) - 1)))


@dataclass(frozen=True, eq=False)
class BishopDisc:
    r: float
    f1_boundary: CircleFunction
    f2_boundary: CircleFunction
    residual: float
    sup_norm: float
    certified: bool = True
    perturbation: Optional[HoloPerturbation] = field(default=None, repr=False)
    diagnostics: Optional[IterationDiagnostics] = field(default=None, repr=False)


@dataclass(frozen=True)
class AttachmentCertificate:
    residual: float
    f1_negative_energy: float
    f2_negative_energy: float


@dataclass(frozen=True)
class FamilyRecord:
    """One exported row of a disc family."""

    r: float
    status: str
    residual: Optional[float] = None
    sup_norm: Optional[float] = None
    contraction_ratio: Optional[float] = None
    iterations: Optional[int] = None
    message: str = ""


@dataclass(frozen=True, eq=False)
class DiscFamily:
    r_grid: Tuple[float, ...]
    discs: Tuple[BishopDisc, ...]
    records: Tuple[FamilyRecord, ...]
    smoothness_diag: Tuple[Tuple[float, float], ...]
    empirical_R0: Optional[float] = None

    @property
    def sup_norms(self) -> Tuple[float, ...]:
        return tuple(disc.sup_norm for disc in self.discs)

    @property
    def residuals(self) -> Tuple[float, ...]:
        return tuple(disc.residual for disc in self.discs)

    def summary(self) -> dict:
        converged = [record for record in self.records if record.status == CONVERGED]
        return {
            "radii": len(self.records),
            "converged": len(converged),
            "empirical_R0": self.empirical_R0,
            "max_residual": max((d.residual for d in self.discs), default=None),
            "all_certified": all(d.certified for d in self.discs),
            "smoothness": [list(pair) for pair in self.smoothness_diag],
        }


@dataclass(frozen=True)
class ProbeReport:
    index: int
    zero_count: int
    sign_change_angles: Tuple[float, ...]
    construction_inapplicable: bool
    reason: str
    real_remainder: bool

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "zero_count": self.zero_count,
            "sign_change_angles": list(self.sign_change_angles),
            "construction_inapplicable": self.construction_inapplicable,
            "reason": self.reason,
            "real_remainder": self.real_remainder,
        }


def _values(a: Union[HoloPerturbation, CircleFunction]) -> CircleFunction:
    return a.a if isinstance(a, HoloPerturbation) else a


def _check_radius(r: float, max_radius: float) -> None:
    if not 0.0 < r < max_radius:
        raise RadiusOutOfRange(f"r = {r} must lie in (0, {max_radius})")


def _default_observer() -> SolverObserverPort:
    from ..adapters import LoggerSolverObserverAdapter

    return LoggerSolverObserverAdapter()


def taylor_tail_Q(
    F: HermitianHomPoly, X: CircleFunction, Y: CircleFunction
) -> CircleFunction:
    """Second and higher order Taylor terms of F at X in the direction Y."""
    x, y = X.values, Y.values
    total = np.zeros(X.n_samples, dtype=complex)
    for j in range(2, F.m + 1):
        for mu in range(j + 1):
            nu = j - mu
            derivative = F.poly
            for _ in range(mu):
                derivative = derivative.d_z()
            for _ in range(nu):
                derivative = derivative.d_zbar()
            if derivative.is_zero:
                continue
            weight = 1.0 / (factorial(mu) * factorial(nu))
            total += weight * derivative.evaluate(x) * y**mu * np.conj(y) ** nu
    scale = 1.0 + float(np.max(np.abs(total)))
    imag = float(np.max(np.abs(total.imag)))
    if imag >= 1e-10 * scale:
        raise NotAnalytic(f"Taylor tail has imaginary part {imag:.3e}")
    return CircleFunction(total.real, is_real=True)


def apply_Lambda(
    F: HermitianHomPoly,
    cmap: ConformalMap,
    r: float,
    a: Union[HoloPerturbation, CircleFunction],
) -> CircleFunction:
    """2 Re{(dF/dz)(g_r) a}."""
    g_r = cmap.scaled_boundary(r)
    values = 2.0 * np.real(F.poly.d_z().evaluate(g_r.values) * _values(a).values)
    return CircleFunction(values, is_real=True)


def apply_A_inv(
    cmap: ConformalMap, R: CircleFunction, r: float, m: int, f: CircleFunction
) -> HoloPerturbation:
    """Holomorphic a with apply_Lambda(F, cmap, r, a) = f.

    a = zeta * kappa * G'(zeta) * A[f / R] / (2 r^(m-1)); the result is checked
    against f through (dF/dz)(g_r) = r^(m-1) R / (kappa zeta G').
    """
    if not r > 0.0:
        raise RadiusOutOfRange(f"r must be positive, got {r}")
    zeta = np.exp(1j * grid_angles(f.n_samples))
    scale = cmap.kappa * zeta * cmap.g_deriv.values / (2.0 * r ** (m - 1))
    completed = analytic_completion(f / R)
    a = HoloPerturbation.project(CircleFunction(scale * completed.values))

    image = 2.0 * r ** (m - 1) * R.real_values / cmap.kappa
    image = image * np.real(a.values / (zeta * cmap.g_deriv.values))
    error = float(np.max(np.abs(image - f.real_values)))
    bound = ROUNDTRIP_TOL * f.sup_norm()
    if error > bound:
        raise RoundTripFailure(
            f"Lambda(A_inv f) misses f by {error:.3e} (allowed {bound:.3e}); "
            f"refine the grid"
        )
    return a


def apply_H(
    problem: BishopProblem, r: float, a: Union[HoloPerturbation, CircleFunction]
) -> HoloPerturbation:
    """One application of H(a; r) = -A_inv[Q(g_r, a) + Re R(g_r + a) + H[Im R(g_r + a)]]."""
    germ, cmap = problem.germ, problem.cmap
    g_r = cmap.scaled_boundary(r)
    perturbation = _values(a)
    point = (g_r + perturbation).values
    datum = taylor_tail_Q(germ.leading, g_r, perturbation)
    if not germ.remainder.is_zero:
        real_part = CircleFunction(germ.remainder.real_part().evaluate(point).real, is_real=True)
        imag_part = CircleFunction(germ.remainder.imag_part().evaluate(point).real, is_real=True)
        datum = datum + real_part + hilbert(imag_part)
    image = apply_A_inv(cmap, problem.R, r, germ.m, datum)
    return HoloPerturbation(-image.a)


def prepare_problem(germ: SurfaceGerm, n_samples: int = DEFAULT_GRID) -> BishopProblem:
    """Level curve, Riemann map and R for a germ of positive index.

    A negative definite leading term is solved for -w.
    """
    profile = angular_profile(germ.leading, n_samples).real_values
    orientation = -1 if float(np.max(profile)) < -CHECK_TOL * germ.leading.scale else 1
    target = germ.reflected() if orientation < 0 else germ
    if orientation < 0:
        logger.info("Leading term is negative definite; solving for -w")
    cmap = riemann_map(level_curve(target.leading, n_samples))
    return BishopProblem(
        germ=target, cmap=cmap, R=aux_R(target.leading, cmap), orientation=orientation
    )


def iterate_H(
    problem: BishopProblem,
    r: float,
    config: Optional[SolveConfig] = None,
    observer: Optional[SolverObserverPort] = None,
) -> Tuple[HoloPerturbation, IterationDiagnostics]:
    """Picard iteration a_{k+1} = H(a_k; r) from a_0 = 0."""
    config = config or SolveConfig(n_samples=problem.cmap.n_samples)
    observer = observer or _default_observer()
    _check_radius(r, problem.max_radius)
    # |g_r| <= r/2, so this keeps F1 inside |z| < 3*rho/4
    divergence_bound = 0.375 * problem.germ.radius
    ball_radius = r ** (1.0 + config.delta)

    a = HoloPerturbation.zero(problem.cmap.n_samples)
    steps: List[float] = []
    ratios: List[float] = []
    holder_norms: List[float] = []
    ball_escape = False
    for iteration in range(1, config.max_iter + 1):
        updated = apply_H(problem, r, a)
        step = float(np.max(np.abs(updated.values - a.values)))
        size = updated.sup_norm()
        ratio = step / steps[-1] if steps and steps[-1] > 0.0 else None
        if not np.isfinite(step) or size > divergence_bound:
            observer.log_failure(r, f"iterates diverged at step {iteration}")
            raise NoConvergence(
                f"fixed-point iteration diverged at r = {r} (step {iteration})",
                last_ratio=ratio if ratio is not None else (ratios[-1] if ratios else None),
            )
        steps.append(step)
        if ratio is not None:
            ratios.append(ratio)
        holder = holder_norm(updated.a, config.alpha)
        holder_norms.append(holder)
        info = IterationInfo(
            r=r,
            iteration=iteration,
            step=step,
            ratio=ratio,
            holder=holder,
            ball_radius=ball_radius,
        )
        observer.log_iteration(info)
        if holder > ball_radius and not ball_escape:
            ball_escape = True
            observer.log_ball_escape(info)
        a = updated
        if step < config.tol:
            diagnostics = IterationDiagnostics(
                iterations=iteration,
                steps=tuple(steps),
                ratios=tuple(ratios),
                holder_norms=tuple(holder_norms),
                ball_radius=ball_radius,
                ball_escape=ball_escape,
            )
            return a, diagnostics

    last_ratio = ratios[-1] if ratios else None
    observer.log_failure(r, f"no convergence in {config.max_iter} steps")
    raise NoConvergence(
        f"fixed-point iteration did not converge at r = {r} within {config.max_iter} "
        f"steps (last ratio {last_ratio})",
        last_ratio=last_ratio,
    )


def fixed_point_defect(
    problem: BishopProblem, r: float, a: Union[HoloPerturbation, CircleFunction]
) -> float:
    """sup |a - H(a; r)|."""
    return float(np.max(np.abs(_values(a).values - apply_H(problem, r, a).values)))


def _attachment_residual(germ: SurfaceGerm, f1: CircleFunction, f2: CircleFunction) -> float:
    return float(np.max(np.abs(f2.values - germ.evaluate(f1.values))))


def assemble_disc(
    problem: BishopProblem,
    r: float,
    a: Union[HoloPerturbation, CircleFunction],
    diagnostics: Optional[IterationDiagnostics] = None,
) -> BishopDisc:
    germ, cmap = problem.germ, problem.cmap
    f1 = cmap.scaled_boundary(r) + _values(a)
    if float(np.max(np.abs(f1.values - f1.mean()))) == 0.0:
        raise DegenerateDisc(f"disc at r = {r} is constant")
    height = (cmap.kappa * r) ** germ.m
    if germ.remainder.is_zero:
        f2 = CircleFunction.constant(height, f1.n_samples)
    else:
        imag_part = germ.remainder.imag_part().evaluate(f1.values).real
        completed = analytic_completion(CircleFunction(imag_part, is_real=True))
        f2 = CircleFunction(height + 1j * completed.values)
    if problem.orientation < 0:
        f2 = -f2
    residual = _attachment_residual(problem.source_germ, f1, f2)
    sup_norm = float(np.max(np.sqrt(np.abs(f1.values) ** 2 + np.abs(f2.values) ** 2)))
    certified = residual < RESIDUAL_CERTIFICATE
    if not certified:
        logger.warning(f"Disc at r = {r} is not certified: residual {residual:.3e}")
    return BishopDisc(
        r=r,
        f1_boundary=f1,
        f2_boundary=f2,
        residual=residual,
        sup_norm=sup_norm,
        certified=certified,
        perturbation=a if isinstance(a, HoloPerturbation) else None,
        diagnostics=diagnostics,
    )


def verify_attachment(disc: BishopDisc, germ: SurfaceGerm) -> AttachmentCertificate:
    """Recomputed attachment residual and the analyticity of both components."""
    return AttachmentCertificate(
        residual=_attachment_residual(germ, disc.f1_boundary, disc.f2_boundary),
        f1_negative_energy=disc.f1_boundary.negative_mode_energy(),
        f2_negative_energy=disc.f2_boundary.negative_mode_energy(),
    )


def solve_disc(
    problem: BishopProblem,
    r: float,
    config: Optional[SolveConfig] = None,
    observer: Optional[SolverObserverPort] = None,
) -> BishopDisc:
    observer = observer or _default_observer()
    a, diagnostics = iterate_H(problem, r, config, observer)
    disc = assemble_disc(problem, r, a, diagnostics)
    observer.log_converged(r, diagnostics.iterations, disc.residual)
    return disc


def _solve_radius(
    problem: BishopProblem,
    r: float,
    config: SolveConfig,
    observer: Optional[SolverObserverPort],
) -> Tuple[float, Optional[BishopDisc], str]:
    """Worker entry point; failures come back as messages."""
    try:
        return r, solve_disc(problem, r, config, observer), ""
    except BishopDiscsError as exc:
        return r, None, f"{type(exc).__name__}: {exc}"


def _record(r: float, disc: Optional[BishopDisc], message: str) -> FamilyRecord:
    if disc is None:
        return FamilyRecord(r=r, status=FAILED, message=message)
    diagnostics = disc.diagnostics
    return FamilyRecord(
        r=r,
        status=CONVERGED,
        residual=disc.residual,
        sup_norm=disc.sup_norm,
        contraction_ratio=diagnostics.contraction_ratio if diagnostics else None,
        iterations=diagnostics.iterations if diagnostics else None,
        message="" if disc.certified else "uncertified",
    )


def _smoothness(discs: List[BishopDisc], r_grid: np.ndarray) -> Tuple[Tuple[float, float], ...]:
    """(r_mid, sup|a_{k+1} - a_k| / dr) for adjacent grid radii that both converged."""
    by_radius = {disc.r: disc for disc in discs}
    quotients = []
    for left, right in zip(r_grid[:-1], r_grid[1:]):
        if left in by_radius and right in by_radius:
            a_left = by_radius[left].perturbation
            a_right = by_radius[right].perturbation
            jump = float(np.max(np.abs(a_right.values - a_left.values)))
            quotients.append((float(0.5 * (left + right)), jump / float(right - left)))
    return tuple(quotients)


def disc_family(
    germ: SurfaceGerm,
    r_min: float,
    r_max: float,
    steps: int,
    config: Optional[SolveConfig] = None,
    n_workers: int = 1,
    observer: Optional[SolverObserverPort] = None,
    problem: Optional[BishopProblem] = None,
) -> DiscFamily:
    """Solve on an evenly spaced radius grid; per-radius failures are recorded.

    With more than one worker the observer runs inside the worker processes.
    """
    from ..application.solve_handler import SolveHandler

    if not 0.0 < r_min < r_max:
        raise ParameterOutOfRange(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    if steps < 2:
        raise ParameterOutOfRange(f"need at least two radii, got {steps}")
    config = config or SolveConfig()
    observer = observer or _default_observer()
    r_grid = np.linspace(r_min, r_max, steps)

    if problem is None:
        try:
            problem = prepare_problem(germ, config.n_samples)
        except ProfileNotPositive as exc:
            logger.warning(f"No disc family: {exc}")
            records = tuple(
                FamilyRecord(r=float(r), status=FAILED, message=f"ProfileNotPositive: {exc}")
                for r in r_grid
            )
            return DiscFamily(tuple(r_grid.tolist()), (), records, (), None)

    tasks = [(problem, float(r), config, observer) for r in r_grid]
    with SolveHandler(n_workers) as handler:
        outcomes = handler.execute_batch(_solve_radius, tasks)
    outcomes.sort(key=lambda outcome: outcome[0])

    discs = [disc for _, disc, _ in outcomes if disc is not None]
    records = tuple(_record(r, disc, message) for r, disc, message in outcomes)
    empirical_R0 = max((disc.r for disc in discs), default=None)
    logger.info(
        f"Disc family on {steps} radii in [{r_min}, {r_max}]: {len(discs)} converged, "
        f"empirical R0 = {empirical_R0}"
    )
    return DiscFamily(
        r_grid=tuple(r_grid.tolist()),
        discs=tuple(discs),
        records=records,
        smoothness_diag=_smoothness(discs, r_grid),
        empirical_R0=empirical_R0,
    )


def _converges(problem: BishopProblem, r: float, config: SolveConfig) -> bool:
    observer = _default_observer()
    try:
        iterate_H(problem, r, config, observer)
    except (NoConvergence, RoundTripFailure, NotAnalytic):
        return False
    return True


def find_convergence_radius(
    problem: BishopProblem,
    r_good: float,
    r_bad: Optional[float] = None,
    config: Optional[SolveConfig] = None,
    r_tol: float = 1e-3,
) -> float:
    """Bisect between a convergent and a failing radius.

    r_bad defaults to just below the admissible bound 3*rho/4; if that radius
    still converges it is returned.
    """
    config = config or SolveConfig(n_samples=problem.cmap.n_samples)
    upper = problem.max_radius * (1.0 - 1e-9) if r_bad is None else r_bad
    if not 0.0 < r_good < upper:
        raise ParameterOutOfRange(f"need 0 < r_good < r_bad, got {r_good}, {upper}")
    if not _converges(problem, r_good, config):
        raise NoConvergence(f"solver does not converge at the lower radius {r_good}")
    if _converges(problem, upper, config):
        return upper
    lower = r_good
    while upper - lower > r_tol:
        middle = 0.5 * (lower + upper)
        if _converges(problem, middle, config):
            lower = middle
        else:
            upper = middle
    logger.info(f"Empirical convergence radius {lower:.6g} (bracket {upper - lower:.1e})")
    return lower


def nonexistence_probe(germ: SurfaceGerm) -> ProbeReport:
    """Explain why no disc family starts at a germ of nonpositive index."""
    index, zero_count = index_via_zero_count(germ.leading)
    if index > 0:
        raise IndexPositive(f"index is {index} > 0; the disc construction applies")
    angles = profile_zeros(germ.leading)
    try:
        level_curve(germ.leading)
        inapplicable, reason = False, ""
    except ProfileNotPositive as exc:
        inapplicable, reason = True, str(exc)
    return ProbeReport(
        index=index,
        zero_count=zero_count,
        sign_change_angles=angles,
        construction_inapplicable=inapplicable,
        reason=reason,
        real_remainder=germ.remainder.hermitian_defect() is None,
    )
