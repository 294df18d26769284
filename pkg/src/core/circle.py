"""Spectral engine for functions on the unit circle.

Functions are stored as samples on the uniform grid theta_k = 2*pi*k/n and
analysed with the FFT. Nonlinear operations act pointwise on the samples;
linear boundary operators (conjugation, analytic completion, differentiation)
act as Fourier multipliers.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    CurveThroughOrigin,
    InvalidGrid,
    NonRealInput,
    NotAnalytic,
    ParameterOutOfRange,
    UnresolvedWinding,
)

DEFAULT_GRID = 1024
MIN_GRID = 64
HOLDER_SUBGRID = 256
DEFAULT_ALPHA = 0.5
REALNESS_TOL = 1e-12
ANALYTIC_TOL = 1e-10
# Modes below this fraction of the largest coefficient are skipped when
# evaluating off the grid.
INTERPOLATION_CUTOFF = 1e-17

Scalar = Union[int, float, complex]


def grid_angles(n_samples: int) -> np.ndarray:
    """Uniform angles 2*pi*k/n_samples, k = 0..n_samples-1."""
    return 2.0 * np.pi * np.arange(n_samples) / n_samples


def mode_numbers(n_samples: int) -> np.ndarray:
    """Integer mode numbers in FFT order."""
    return np.fft.fftfreq(n_samples, 1.0 / n_samples).astype(int)


def _check_grid(n_samples: int) -> None:
    if n_samples < MIN_GRID or n_samples & (n_samples - 1):
        raise InvalidGrid(
            f"grid size must be a power of two >= {MIN_GRID}, got {n_samples}"
        )


@dataclass(frozen=True, eq=False)
class FourierCoeffs:
    """Normalized discrete Fourier coefficients of a circle function.

    Mode n is available for |n| <= n_samples/2 - 1; the Nyquist mode is kept
    in ``spectrum`` for exact resynthesis but is not addressable by index.
    """

    n_samples: int
    spectrum: np.ndarray

    @property
    def max_mode(self) -> int:
        return self.n_samples // 2 - 1

    def __getitem__(self, mode: int) -> complex:
        if abs(mode) > self.max_mode:
            raise IndexError(f"mode {mode} outside |n| <= {self.max_mode}")
        return complex(self.spectrum[mode % self.n_samples])

    def nonnegative(self) -> np.ndarray:
        """Coefficients of modes 0..max_mode, in order."""
        return self.spectrum[: self.max_mode + 1].copy()

    def negative(self) -> np.ndarray:
        """Coefficients of modes -max_mode..-1, in order."""
        return self.spectrum[self.n_samples // 2 + 1 :].copy()

    def negative_energy_ratio(self) -> float:
        total = float(np.sum(np.abs(self.spectrum) ** 2))
        if total == 0.0:
            return 0.0
        return float(np.sum(np.abs(self.negative()) ** 2)) / total


@dataclass(frozen=True, eq=False)
class CircleFunction:
    """Complex or real function on the unit circle, sampled uniformly.

    ``sampler`` optionally holds an exact evaluator used for off-grid
    evaluation; when absent, trigonometric interpolation is used.
    """

    values: np.ndarray
    is_real: bool = False
    sampler: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False
    )

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.ndim != 1:
            raise InvalidGrid("circle samples must be one-dimensional")
        _check_grid(values.shape[0])
        if self.is_real:
            scale = 1.0 + float(np.max(np.abs(values)))
            imag = float(np.max(np.abs(values.imag)))
            if imag >= REALNESS_TOL * scale:
                raise NonRealInput(
                    f"samples flagged real carry imaginary part {imag:.3e}"
                )
            values = values.real.astype(complex)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    # Constructors

    @classmethod
    def from_function(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        n_samples: int = DEFAULT_GRID,
        is_real: bool = False,
        keep_sampler: bool = False,
    ) -> "CircleFunction":
        _check_grid(n_samples)
        values = np.asarray(func(grid_angles(n_samples)), dtype=complex)
        return cls(values, is_real=is_real, sampler=func if keep_sampler else None)

    @classmethod
    def constant(cls, value: Scalar, n_samples: int = DEFAULT_GRID) -> "CircleFunction":
        _check_grid(n_samples)
        is_real = complex(value).imag == 0.0
        return cls(np.full(n_samples, value, dtype=complex), is_real=is_real)

    @classmethod
    def from_coefficients(
        cls, coefficients: dict, n_samples: int = DEFAULT_GRID, is_real: bool = False
    ) -> "CircleFunction":
        """Synthesize sum_n c_n e^{i n theta} from a {mode: coefficient} map."""
        theta = grid_angles(n_samples)
        values = np.zeros(n_samples, dtype=complex)
        for mode, coefficient in coefficients.items():
            values += coefficient * np.exp(1j * mode * theta)
        if is_real:
            values = values.real
        return cls(values, is_real=is_real)

    # Basic properties

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def theta(self) -> np.ndarray:
        return grid_angles(self.n_samples)

    @property
    def real_values(self) -> np.ndarray:
        return self.values.real

    @property
    def coefficients(self) -> FourierCoeffs:
        return FourierCoeffs(self.n_samples, np.fft.fft(self.values) / self.n_samples)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> complex:
        return complex(np.mean(self.values))

    def negative_mode_energy(self) -> float:
        """Energy in negative modes as a fraction of the total energy."""
        return self.coefficients.negative_energy_ratio()

    # Pointwise algebra

    def _combine(self, other, operation) -> "CircleFunction":
        if isinstance(other, CircleFunction):
            if other.n_samples != self.n_samples:
                raise InvalidGrid(
                    f"grid mismatch: {self.n_samples} vs {other.n_samples}"
                )
            return CircleFunction(
                operation(self.values, other.values),
                is_real=self.is_real and other.is_real,
            )
        scalar = complex(other)
        return CircleFunction(
            operation(self.values, scalar),
            is_real=self.is_real and scalar.imag == 0.0,
        )

    def __add__(self, other):
        return self._combine(other, np.add)

    def __radd__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __rsub__(self, other):
        return self._combine(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    def __rmul__(self, other):
        return self._combine(other, np.multiply)

    def __truediv__(self, other):
        return self._combine(other, np.divide)

    def __neg__(self):
        return CircleFunction(-self.values, is_real=self.is_real)

    def shifted(self, steps: int) -> "CircleFunction":
        """Rotate by steps grid cells: new(theta) = old(theta - 2*pi*steps/n)."""
        return CircleFunction(np.roll(self.values, steps), is_real=self.is_real)

    # Spectral operations

    def derivative(self) -> "CircleFunction":
        """Spectral d/dtheta; the Nyquist mode is dropped."""
        n = self.n_samples
        multiplier = 1j * mode_numbers(n).astype(float)
        multiplier[n // 2] = 0.0
        values = np.fft.ifft(multiplier * np.fft.fft(self.values))
        if self.is_real:
            values = values.real
        return CircleFunction(values, is_real=self.is_real)

    def resample(self, n_samples: int) -> "CircleFunction":
        """Band-limited upsampling by zero padding in Fourier space."""
        _check_grid(n_samples)
        n = self.n_samples
        if n_samples < n:
            raise InvalidGrid("resample only refines the grid")
        if n_samples == n:
            return self
        spectrum = np.fft.fft(self.values) / n
        half = n // 2
        padded = np.zeros(n_samples, dtype=complex)
        padded[:half] = spectrum[:half]
        padded[n_samples - half + 1 :] = spectrum[half + 1 :]
        # split the Nyquist term so samples on the old grid are unchanged
        padded[half] += spectrum[half] / 2.0
        padded[n_samples - half] += spectrum[half] / 2.0
        values = np.fft.ifft(padded) * n_samples
        if self.is_real:
            values = values.real
        return CircleFunction(values, is_real=self.is_real, sampler=self.sampler)

    def evaluate_at(self, angles: np.ndarray) -> np.ndarray:
        """Evaluate at arbitrary angles (exact sampler or trigonometric sum)."""
        angles = np.asarray(angles, dtype=float)
        if self.sampler is not None:
            result = np.asarray(self.sampler(angles), dtype=complex)
        else:
            n = self.n_samples
            spectrum = np.fft.fft(self.values) / n
            modes = mode_numbers(n)
            nyquist = spectrum[n // 2]
            keep = np.abs(spectrum) > INTERPOLATION_CUTOFF * np.max(np.abs(spectrum))
            keep[n // 2] = False
            result = np.exp(1j * np.outer(angles, modes[keep])) @ spectrum[keep]
            if nyquist != 0.0:
                result = result + nyquist * np.cos(0.5 * n * angles)
        return result.real if self.is_real else result


def _real_samples(f: CircleFunction, operation: str) -> np.ndarray:
    values = f.values
    if not f.is_real:
        scale = 1.0 + float(np.max(np.abs(values)))
        if float(np.max(np.abs(values.imag))) >= REALNESS_TOL * scale:
            raise NonRealInput(f"{operation} requires a real-valued circle function")
    return values.real


def hilbert(f: CircleFunction) -> CircleFunction:
    """Conjugation operator: multiplier -i*sgn(n), mean-zero output."""
    samples = _real_samples(f, "hilbert")
    n = f.n_samples
    multiplier = -1j * np.sign(mode_numbers(n)).astype(complex)
    multiplier[n // 2] = 0.0
    conjugate = np.fft.ifft(multiplier * np.fft.fft(samples)).real
    return CircleFunction(conjugate, is_real=True)


def analytic_completion(psi: CircleFunction) -> CircleFunction:
    """psi + i*hilbert(psi): boundary values of a holomorphic function."""
    samples = _real_samples(psi, "analytic_completion")
    return CircleFunction(samples + 1j * hilbert(psi).real_values)


def winding_number(
    gamma: CircleFunction, tol_zero: Optional[float] = None, max_doublings: int = 4
) -> int:
    """Winding number of a sampled closed curve around the origin.

    Consecutive argument increments must stay below pi/2; otherwise the curve
    is refined spectrally and the count retried.
    """
    curve = gamma
    scale = curve.sup_norm()
    if scale == 0.0:
        raise CurveThroughOrigin("curve is identically zero")
    threshold = 1e-9 * scale if tol_zero is None else tol_zero
    for attempt in range(max_doublings + 1):
        values = curve.values
        if float(np.min(np.abs(values))) <= threshold:
            raise CurveThroughOrigin(
                f"curve passes within {threshold:.3e} of the origin"
            )
        increments = np.angle(np.roll(values, -1) / values)
        if np.all(np.abs(increments) < np.pi / 2):
            return int(np.rint(np.sum(increments) / (2.0 * np.pi)))
        if attempt < max_doublings:
            curve = curve.resample(2 * curve.n_samples)
    raise UnresolvedWinding(
        f"argument increments still exceed pi/2 after {max_doublings} doublings"
    )


def holder_norm(
    f: CircleFunction, alpha: float = DEFAULT_ALPHA, subgrid: int = HOLDER_SUBGRID
) -> float:
    """Estimated Hoelder norm: sup norm plus a pairwise lower bound of the
    alpha-seminorm on a subgrid."""
    if not 0.0 < alpha < 1.0:
        raise ParameterOutOfRange(f"Hoelder exponent must lie in (0, 1), got {alpha}")
    sup = f.sup_norm()
    step = max(1, f.n_samples // subgrid)
    samples = f.values[::step]
    angles = f.theta[::step]
    gap = np.abs(angles[:, None] - angles[None, :])
    gap = np.minimum(gap, 2.0 * np.pi - gap)
    jumps = np.abs(samples[:, None] - samples[None, :])
    off_diagonal = gap > 0.0
    if not np.any(off_diagonal):
        return sup
    seminorm = float(np.max(jumps[off_diagonal] / gap[off_diagonal] ** alpha))
    return sup + seminorm


def power_series(coefficients: np.ndarray, zeta):
    """Evaluate sum_n c_n zeta^n (coefficients in increasing order)."""
    return np.polynomial.polynomial.polyval(zeta, coefficients)


def extend_inside(f: CircleFunction, zeta, tol: float = ANALYTIC_TOL):
    """Value at zeta (|zeta| <= 1) of the holomorphic extension of f."""
    energy = f.negative_mode_energy()
    if energy >= tol:
        raise NotAnalytic(f"negative-mode energy {energy:.3e} exceeds {tol:.1e}")
    zeta_array = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta_array) > 1.0 + 1e-12):
        raise ParameterOutOfRange("extend_inside needs |zeta| <= 1")
    result = power_series(f.coefficients.nonnegative(), zeta_array)
    return complex(result) if np.ndim(result) == 0 else result
