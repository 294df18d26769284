from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

if TYPE_CHECKING:
    from ..core.bishop import BishopDisc, FamilyRecord
    from ..core.surface import SurfaceGerm


@dataclass(frozen=True)
class MapSample:
    """One grid row of a conformal map export."""

    theta: float
    re_g: float
    im_g: float
    rho: float
    phi: float
    R: float


@dataclass(frozen=True)
class IterationInfo:
    """Diagnostics of a single Picard step of the Bishop solver."""

    r: float
    iteration: int
    step: float
    ratio: Optional[float]
    holder: float
    ball_radius: float


class SolverObserverPort(ABC):
    """Port interface for following the Bishop solver."""

    @abstractmethod
    def log_iteration(self, info: IterationInfo) -> None:
        """Called after every fixed-point step."""
        pass

    @abstractmethod
    def log_ball_escape(self, info: IterationInfo) -> None:
        """Called when the Hoelder estimate leaves the r^(1+delta) ball."""
        pass

    @abstractmethod
    def log_converged(self, r: float, iterations: int, residual: float) -> None:
        pass

    @abstractmethod
    def log_failure(self, r: float, reason: str) -> None:
        pass


class SurfaceSpecPort(ABC):
    """Port interface for reading and writing surface specs."""

    @abstractmethod
    def load(self, path: str) -> "SurfaceGerm":
        """
        Parse a spec file.

        Args:
            path: Location of the spec file

        Returns:
            The validated surface germ
        """
        pass

    @abstractmethod
    def loads(self, text: str) -> "SurfaceGerm":
        pass

    @abstractmethod
    def dumps(self, germ: "SurfaceGerm") -> str:
        """Serialize a germ so that loads(dumps(germ)) rebuilds it."""
        pass


class ExportPort(ABC):
    """Port interface for tabular exports."""

    @abstractmethod
    def write_family(self, records: Sequence["FamilyRecord"], path: str) -> None:
        pass

    @abstractmethod
    def write_boundaries(self, discs: Sequence["BishopDisc"], path: str) -> None:
        """One row per (r, theta) with the boundary values of F1 and F2."""
        pass

    @abstractmethod
    def write_conformal_map(self, samples: Sequence[MapSample], path: str) -> None:
        pass
