"""Maslov-type index of an isolated CR singularity.

Three independent formulas are implemented and cross-checked:

* winding number of dF/dzbar along a small circle;
* 1 - (number of zeros of the angular profile) / 2;
* 2M - (m - 1), where M counts the roots in the unit disc of the polynomial
  obtained from dF/dzbar by substituting 1 for zbar.
"""

from dataclasses import asdict, dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from ..infrastructure.logger import logger
from .circle import DEFAULT_GRID, CircleFunction, grid_angles, power_series, winding_number
from .errors import (
    CurveThroughOrigin,
    DegenerateSingularity,
    Disagreement,
    NonSimpleZero,
    ParameterOutOfRange,
    RadiusOutOfRange,
    RootOnCircle,
    UnresolvedWinding,
    Unstable,
)
from .surface import (
    CHECK_TOL,
    SCAN_GRID,
    HermitianHomPoly,
    PolyZZbar,
    SurfaceGerm,
    angular_derivative,
    is_isolated_cr_singularity,
)

POSITIVE_INDEX = "positive_index"
NONPOSITIVE_INDEX = "nonpositive_index"
ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"

ZERO_XTOL = 1e-12


@dataclass(frozen=True)
class IndexReport:
    ind_winding: int
    ind_zero_count: int
    ind_roots: int
    agree: bool
    zero_count: int
    classification: str
    nondegenerate_class: Optional[str] = None

    @property
    def index(self) -> int:
        return self.ind_winding

    @property
    def is_positive(self) -> bool:
        return self.classification == POSITIVE_INDEX

    def to_dict(self) -> dict:
        return asdict(self)


def index_via_winding(
    germ: SurfaceGerm, r: float, n_samples: int = DEFAULT_GRID
) -> int:
    """Winding number of theta -> d(F + R)/dzbar (r e^{i theta}).

    The count is repeated at r/2 and r/4; all three must agree.
    """
    if not 0.0 < r < germ.radius:
        raise RadiusOutOfRange(f"r = {r} must lie in (0, {germ.radius})")
    derivative = germ.graph_function.d_zbar()
    unit_circle = np.exp(1j * grid_angles(n_samples))
    windings = []
    for radius in (r, r / 2.0, r / 4.0):
        curve = CircleFunction(derivative.evaluate(radius * unit_circle))
        windings.append(winding_number(curve))
    if len(set(windings)) > 1:
        raise Unstable(f"winding numbers at r, r/2, r/4 disagree: {windings}")
    return windings[0]


def profile_zeros(F: HermitianHomPoly, n_samples: int = SCAN_GRID) -> Tuple[float, ...]:
    """Zeros of the angular profile in [0, 2*pi), refined to 1e-12."""
    check = is_isolated_cr_singularity(F, n_samples)
    if not check.isolated:
        raise DegenerateSingularity(
            f"dF/dzbar vanishes near theta = {check.witness:.6f} (margin {check.margin:.3e})"
        )
    theta = grid_angles(n_samples)
    step = 2.0 * np.pi / n_samples
    values = F.evaluate(np.exp(1j * theta))

    def profile(angle: float) -> float:
        return float(F.evaluate(np.exp(1j * angle)))

    roots = [float(theta[k]) for k in np.flatnonzero(values == 0.0)]
    following = np.roll(values, -1)
    for k in np.flatnonzero(values * following < 0.0):
        root = brentq(profile, theta[k], theta[k] + step, xtol=ZERO_XTOL)
        roots.append(root % (2.0 * np.pi))

    for root in roots:
        slope = float(angular_derivative(F, root))
        if abs(slope) < CHECK_TOL * F.scale:
            raise NonSimpleZero(f"profile zero at theta = {root:.12f} is not simple")
    return tuple(sorted(roots))


def index_via_zero_count(F: HermitianHomPoly) -> Tuple[int, int]:
    """Returns (1 - count/2, count) with count the number of profile zeros."""
    count = len(profile_zeros(F))
    if count % 2:
        raise NonSimpleZero(f"odd number of profile zeros ({count})")
    return 1 - count // 2, count


def root_polynomial(poly: PolyZZbar) -> np.ndarray:
    """Coefficients of p(z) = Q(z, 1), Q(z, w) = dF/dzbar with w for zbar."""
    derivative = poly.d_zbar()
    coefficients = np.zeros(max(poly.degree, 1), dtype=complex)
    for (mu, _nu), c in derivative.terms.items():
        coefficients[mu] += c
    return coefficients


def index_via_roots(
    F: Union[HermitianHomPoly, PolyZZbar], n_samples: int = DEFAULT_GRID
) -> int:
    """2M - (m - 1), M = number of roots of p in the unit disc (argument principle)."""
    poly = F.poly if isinstance(F, HermitianHomPoly) else F
    m = poly.degree
    if poly.is_zero or not poly.is_homogeneous(m):
        raise ParameterOutOfRange("index_via_roots needs a nonzero homogeneous polynomial")
    coefficients = root_polynomial(poly)
    curve = CircleFunction(power_series(coefficients, np.exp(1j * grid_angles(n_samples))))
    try:
        roots_inside = winding_number(curve)
    except (CurveThroughOrigin, UnresolvedWinding) as exc:
        raise RootOnCircle(f"root polynomial vanishes on or near the unit circle: {exc}") from exc
    return 2 * roots_inside - (m - 1)


def index_report(germ: SurfaceGerm, r: float, n_samples: int = DEFAULT_GRID) -> IndexReport:
    """Run all three formulas and classify the germ."""
    ind_winding = index_via_winding(germ, r, n_samples)
    ind_zero_count, zero_count = index_via_zero_count(germ.leading)
    ind_roots = index_via_roots(germ.leading, n_samples)
    agree = ind_winding == ind_zero_count == ind_roots
    nondegenerate_class = None
    if germ.m == 2:
        nondegenerate_class = ELLIPTIC if ind_winding > 0 else HYPERBOLIC
    report = IndexReport(
        ind_winding=ind_winding,
        ind_zero_count=ind_zero_count,
        ind_roots=ind_roots,
        agree=agree,
        zero_count=zero_count,
        classification=POSITIVE_INDEX if ind_winding > 0 else NONPOSITIVE_INDEX,
        nondegenerate_class=nondegenerate_class,
    )
    if not agree:
        raise Disagreement(
            f"index formulas disagree: winding={ind_winding}, "
            f"zero count={ind_zero_count}, roots={ind_roots}",
            report,
        )
    logger.debug(
        f"Index {ind_winding} ({report.classification}) with {zero_count} profile zeros"
    )
    return report
