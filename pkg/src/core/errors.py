"""Error hierarchy for bishop-discs.

Every error carries the process exit code the CLI should use: input problems
exit with 1, mathematical failures with 2.
"""

from typing import Optional


class BishopDiscsError(Exception):
    """Base class for all bishop-discs errors."""

    exit_code: int = 2


class InputError(BishopDiscsError):
    """The caller supplied malformed or out-of-range input."""

    exit_code = 1


class MathError(BishopDiscsError):
    """A numerical or mathematical precondition failed."""

    exit_code = 2


# Input errors


class SpecParseError(InputError):
    """A surface spec file could not be parsed."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        context = []
        if line is not None:
            context.append(f"line {line}")
        if field is not None:
            context.append(f"field '{field}'")
        prefix = f"[{', '.join(context)}] " if context else ""
        super().__init__(f"{prefix}{message}")
        self.field = field
        self.line = line


class HermitianViolation(InputError):
    """Leading term is not real-valued: c[nu, mu] != conj(c[mu, nu])."""

    def __init__(self, mu: int, nu: int, detail: str = ""):
        message = f"Hermitian symmetry violated at (mu, nu) = ({mu}, {nu})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.mu = mu
        self.nu = nu


class ParameterOutOfRange(InputError):
    pass


class ParabolicInput(ParameterOutOfRange):
    pass


class RemainderOrderError(InputError):
    pass


class InvalidGrid(InputError):
    pass


# Math errors


class NonRealInput(MathError):
    pass


class NonRealProfile(MathError):
    pass


class CurveThroughOrigin(MathError):
    pass


class UnresolvedWinding(MathError):
    pass


class NotAnalytic(MathError):
    pass


class DegenerateSingularity(MathError):
    pass


class NonSimpleZero(MathError):
    pass


class RootOnCircle(MathError):
    pass


class Unstable(MathError):
    pass


class Disagreement(MathError):
    """The three index formulas returned different integers."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ProfileNotPositive(MathError):
    """The angular profile vanishes somewhere; no level curve exists."""

    def __init__(self, message: str, witnesses: tuple = ()):
        super().__init__(message)
        self.witnesses = tuple(witnesses)


class NoConvergence(MathError):
    def __init__(self, message: str, last_ratio: Optional[float] = None):
        super().__init__(message)
        self.last_ratio = last_ratio


class NonUnivalent(MathError):
    pass


class RNotPositiveReal(MathError):
    pass


class RoundTripFailure(MathError):
    pass


class IndexPositive(MathError):
    pass


class IndexNotPositive(MathError):
    pass


class RadiusOutOfRange(MathError):
    pass


class DegenerateDisc(MathError):
    pass
