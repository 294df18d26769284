"""Surface germs w = F_m(z) + R(z) over the z-plane.

Polynomials are kept as sparse maps (mu, nu) -> c for the monomial
z^mu * conj(z)^nu, which makes Wirtinger calculus a coefficient shift.
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .circle import DEFAULT_GRID, CircleFunction, grid_angles
from .errors import (
    DegenerateSingularity,
    HermitianViolation,
    NonRealProfile,
    ParabolicInput,
    ParameterOutOfRange,
    RemainderOrderError,
)

Monomial = Tuple[int, int]

SCAN_GRID = 4096
CHECK_TOL = 1e-9
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class PolyZZbar:
    """Polynomial sum c[mu, nu] z^mu zbar^nu with no stored zero terms."""

    terms: Mapping[Monomial, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned: Dict[Monomial, complex] = {}
        for (mu, nu), coefficient in self.terms.items():
            mu, nu = int(mu), int(nu)
            if mu < 0 or nu < 0:
                raise ParameterOutOfRange(f"negative exponent in monomial ({mu}, {nu})")
            coefficient = complex(coefficient)
            if coefficient != 0:
                cleaned[(mu, nu)] = coefficient
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))

    @classmethod
    def monomial(cls, mu: int, nu: int, coefficient: complex = 1.0) -> "PolyZZbar":
        return cls({(mu, nu): coefficient})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((mu + nu for mu, nu in self.terms), default=0)

    @property
    def order(self) -> Optional[int]:
        """Lowest total degree of a term; None for the zero polynomial."""
        return min((mu + nu for mu, nu in self.terms), default=None)

    @property
    def scale(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_homogeneous(self, m: int) -> bool:
        return all(mu + nu == m for mu, nu in self.terms)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        zbar = np.conj(z)
        result = np.zeros_like(z)
        for (mu, nu), coefficient in self.terms.items():
            result = result + coefficient * z**mu * zbar**nu
        return result

    def d_z(self) -> "PolyZZbar":
        return PolyZZbar(
            {(mu - 1, nu): mu * c for (mu, nu), c in self.terms.items() if mu > 0}
        )

    def d_zbar(self) -> "PolyZZbar":
        return PolyZZbar(
            {(mu, nu - 1): nu * c for (mu, nu), c in self.terms.items() if nu > 0}
        )

    def conjugate(self) -> "PolyZZbar":
        """The polynomial whose values are the complex conjugates of ours."""
        return PolyZZbar({(nu, mu): np.conj(c) for (mu, nu), c in self.terms.items()})

    def real_part(self) -> "PolyZZbar":
        return (self + self.conjugate()) * 0.5

    def imag_part(self) -> "PolyZZbar":
        return (self - self.conjugate()) * (-0.5j)

    def hermitian_defect(self, tol: float = HERMITIAN_TOL) -> Optional[Monomial]:
        """First (mu, nu) with c[nu, mu] != conj(c[mu, nu]), or None."""
        bound = tol * max(self.scale, 1.0)
        for (mu, nu), coefficient in self.terms.items():
            mirror = self.terms.get((nu, mu), 0.0)
            if abs(mirror - np.conj(coefficient)) > bound:
                return (mu, nu)
        return None

    def __add__(self, other: "PolyZZbar") -> "PolyZZbar":
        merged = dict(self.terms)
        for key, coefficient in other.terms.items():
            merged[key] = merged.get(key, 0.0) + coefficient
        return PolyZZbar(merged)

    def __neg__(self) -> "PolyZZbar":
        return PolyZZbar({key: -c for key, c in self.terms.items()})

    def __sub__(self, other: "PolyZZbar") -> "PolyZZbar":
        return self + (-other)

    def __mul__(self, other) -> "PolyZZbar":
        if isinstance(other, PolyZZbar):
            product: Dict[Monomial, complex] = {}
            for (mu1, nu1), c1 in self.terms.items():
                for (mu2, nu2), c2 in other.terms.items():
                    key = (mu1 + mu2, nu1 + nu2)
                    product[key] = product.get(key, 0.0) + c1 * c2
            return PolyZZbar(product)
        scalar = complex(other)
        return PolyZZbar({key: scalar * c for key, c in self.terms.items()})

    __rmul__ = __mul__


@dataclass(frozen=True)
class HermitianHomPoly:
    """Real-valued polynomial homogeneous of degree m in (z, zbar)."""

    m: int
    poly: PolyZZbar

    def __post_init__(self):
        if self.m < 2:
            raise ParameterOutOfRange(f"degree must be >= 2, got {self.m}")
        if self.poly.is_zero:
            raise ParameterOutOfRange("leading term is the zero polynomial")
        for mu, nu in self.poly.terms:
            if mu + nu != self.m:
                raise ParameterOutOfRange(
                    f"term ({mu}, {nu}) has degree {mu + nu}, expected {self.m}"
                )
        defect = self.poly.hermitian_defect()
        if defect is not None:
            raise HermitianViolation(*defect)

    @classmethod
    def from_terms(cls, m: int, terms: Mapping[Monomial, complex]) -> "HermitianHomPoly":
        return cls(m, PolyZZbar(terms))

    @property
    def scale(self) -> float:
        return self.poly.scale

    def evaluate(self, z):
        return np.real(self.poly.evaluate(z))


@dataclass(frozen=True)
class SurfaceGerm:
    """Germ of w = F_m(z) + R(z) at the origin, valid for |z| < radius."""

    leading: HermitianHomPoly
    remainder: PolyZZbar = field(default_factory=PolyZZbar)
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ParameterOutOfRange(f"radius of validity must be positive, got {self.radius}")
        order = self.remainder.order
        if order is not None and order < self.m + 1:
            raise RemainderOrderError(
                f"remainder has a term of degree {order}; need degree >= {self.m + 1}"
            )
        check = is_isolated_cr_singularity(self.leading)
        if not check.isolated:
            raise DegenerateSingularity(
                f"leading term has a non-isolated CR singularity "
                f"(margin {check.margin:.3e} at theta = {check.witness:.6f})"
            )

    @property
    def m(self) -> int:
        return self.leading.m

    def reflected(self) -> "SurfaceGerm":
        """The germ of -w, positive where this one is negative."""
        leading = HermitianHomPoly(self.m, -self.leading.poly)
        return SurfaceGerm(leading, -self.remainder, self.radius)

    @property
    def graph_function(self) -> PolyZZbar:
        return self.leading.poly + self.remainder

    def evaluate(self, z):
        return self.graph_function.evaluate(z)


@dataclass(frozen=True)
class SingularityCheck:
    isolated: bool
    margin: float
    witness: Optional[float]


@dataclass(frozen=True)
class SubharmonicityReport:
    everywhere_subharmonic: bool
    fails_at: Tuple[float, ...]
    min_value: float
    min_angle: float


class ProfileSampler:
    """Exact evaluator theta -> F(e^{i theta}); picklable for worker pools."""

    def __init__(self, leading: HermitianHomPoly):
        self.leading = leading

    def __call__(self, angles: np.ndarray) -> np.ndarray:
        return self.leading.evaluate(np.exp(1j * np.asarray(angles, dtype=float)))


def evaluate(p: PolyZZbar, z):
    return p.evaluate(z)


def wirtinger_dz(p: PolyZZbar) -> PolyZZbar:
    return p.d_z()


def wirtinger_dzbar(p: PolyZZbar) -> PolyZZbar:
    return p.d_zbar()


def angular_profile(F: HermitianHomPoly, n_samples: int = DEFAULT_GRID) -> CircleFunction:
    """f(theta) with F(r e^{i theta}) = r^m f(theta)."""
    values = F.poly.evaluate(np.exp(1j * grid_angles(n_samples)))
    imag = float(np.max(np.abs(values.imag)))
    if imag >= 1e-12 * max(F.scale, 1.0):
        raise NonRealProfile(f"angular profile has imaginary part {imag:.3e}")
    return CircleFunction(values.real, is_real=True, sampler=ProfileSampler(F))


def angular_derivative(F: HermitianHomPoly, angles) -> np.ndarray:
    """Exact f'(theta) = 2 Re(i z dF/dz) on z = e^{i theta}."""
    z = np.exp(1j * np.asarray(angles, dtype=float))
    return 2.0 * np.real(1j * z * F.poly.d_z().evaluate(z))


def is_isolated_cr_singularity(
    F: HermitianHomPoly, n_samples: int = SCAN_GRID
) -> SingularityCheck:
    """dF/dzbar vanishes off the origin iff m*f and f' share a zero."""
    profile = angular_profile(F, n_samples)
    slope = profile.derivative().real_values
    combined = (F.m * profile.real_values) ** 2 + slope**2
    index = int(np.argmin(combined))
    margin = float(combined[index])
    isolated = margin > CHECK_TOL * F.scale**2
    return SingularityCheck(
        isolated=isolated,
        margin=margin,
        witness=None if isolated else float(profile.theta[index]),
    )


def _negative_arcs(mask: np.ndarray) -> list:
    """Index runs (cyclic) where mask holds."""
    if not np.any(mask):
        return []
    n = mask.shape[0]
    if np.all(mask):
        return [np.arange(n)]
    start = int(np.argmin(mask))  # first index outside every run
    order = (np.arange(n) + start) % n
    rolled = mask[order]
    arcs, current = [], []
    for position, flag in zip(order, rolled):
        if flag:
            current.append(position)
        elif current:
            arcs.append(np.array(current))
            current = []
    if current:
        arcs.append(np.array(current))
    return arcs


def subharmonicity_report(
    F: HermitianHomPoly, n_samples: int = SCAN_GRID
) -> SubharmonicityReport:
    """Sign scan of the angular profile of d^2F/dz dzbar."""
    theta = grid_angles(n_samples)
    laplacian = F.poly.d_z().d_zbar().evaluate(np.exp(1j * theta)).real
    failing = laplacian < -CHECK_TOL * F.scale
    fails_at = tuple(
        float(theta[arc[np.argmin(laplacian[arc])]]) for arc in _negative_arcs(failing)
    )
    index = int(np.argmin(laplacian))
    return SubharmonicityReport(
        everywhere_subharmonic=not fails_at,
        fails_at=fails_at,
        min_value=float(laplacian[index]),
        min_angle=float(theta[index]),
    )


def _require_remainder(remainder: Optional[PolyZZbar]) -> PolyZZbar:
    return PolyZZbar() if remainder is None else remainder


def bishop_quadric_leading(gamma: float) -> HermitianHomPoly:
    return HermitianHomPoly.from_terms(2, {(1, 1): 1.0, (2, 0): gamma, (0, 2): gamma})


def make_bishop_quadric(
    gamma: float, remainder: Optional[PolyZZbar] = None, radius: float = 1.0
) -> SurfaceGerm:
    """Bishop normal form w = |z|^2 + gamma (z^2 + zbar^2) + remainder."""
    if gamma < 0.0:
        raise ParameterOutOfRange(f"Bishop invariant must be >= 0, got {gamma}")
    if abs(gamma - 0.5) < 1e-12:
        raise ParabolicInput("gamma = 1/2 is parabolic and excluded")
    return SurfaceGerm(bishop_quadric_leading(gamma), _require_remainder(remainder), radius)


def example_4_1_leading(eps: float, C: float) -> HermitianHomPoly:
    """(C/2)(z^4 + zbar^4) + eps (z^3 zbar + z zbar^3) + |z|^4."""
    return HermitianHomPoly.from_terms(
        4,
        {(4, 0): C / 2.0, (0, 4): C / 2.0, (3, 1): eps, (1, 3): eps, (2, 2): 1.0},
    )


def _check_example_parameter(C: float) -> None:
    if not 1.0 / 3.0 < C < 2.0 / 3.0:
        raise ParameterOutOfRange(f"C must lie in (1/3, 2/3), got {C}")


def make_example_4_1(
    eps: float, C: float, remainder: Optional[PolyZZbar] = None, radius: float = 1.0
) -> SurfaceGerm:
    """Quartic family with positive index that need not be subharmonic."""
    _check_example_parameter(C)
    return SurfaceGerm(example_4_1_leading(eps, C), _require_remainder(remainder), radius)


def example_4_1_epsilon_window(C: float) -> Tuple[float, float]:
    """Open eps-interval on which the quartic has a positive profile but is
    not subharmonic: (subharmonicity threshold, positivity threshold)."""
    _check_example_parameter(C)

    def laplacian_min(eps: float) -> float:
        return subharmonicity_report(example_4_1_leading(eps, C)).min_value

    def profile_min(eps: float) -> float:
        return float(np.min(angular_profile(example_4_1_leading(eps, C), SCAN_GRID).real_values))

    lower = brentq(laplacian_min, 0.0, 2.0, xtol=1e-13)
    upper = brentq(profile_min, lower, 2.0, xtol=1e-13)
    return lower, upper


def make_power(m: int, remainder: Optional[PolyZZbar] = None, radius: float = 1.0) -> SurfaceGerm:
    """w = |z|^m for even m."""
    if m < 2 or m % 2:
        raise ParameterOutOfRange(f"|z|^m needs an even m >= 2, got {m}")
    leading = HermitianHomPoly.from_terms(m, {(m // 2, m // 2): 1.0})
    return SurfaceGerm(leading, _require_remainder(remainder), radius)
